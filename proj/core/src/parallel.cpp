#include "conelab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace conelab {

namespace {

unsigned env_jobs() {
    if (const char* v = std::getenv("CONE_LAB_JOBS")) {
        try {
            long j = std::stol(v);
            if (j > 0) return static_cast<unsigned>(j);
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::atomic<unsigned> g_jobs{0};

}  // namespace

unsigned default_jobs() {
    unsigned j = g_jobs.load();
    return j == 0 ? env_jobs() : j;
}

void set_default_jobs(unsigned jobs) { g_jobs.store(jobs); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, unsigned jobs) {
    if (jobs == 0) jobs = default_jobs();
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(count);
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t n = std::min<std::size_t>(jobs, count);
    for (std::size_t k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace conelab
