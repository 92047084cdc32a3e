#pragma once

#include <cstddef>
#include <functional>

namespace conelab {

// Worker cap used by the mode-parallel kernels. Defaults to CONE_LAB_JOBS when
// set, otherwise the hardware concurrency.
unsigned default_jobs();
void set_default_jobs(unsigned jobs);

// Runs body(i) for i in [0, count). Each index is handled exactly once; after
// all workers join, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned jobs = 0);

}  // namespace conelab
