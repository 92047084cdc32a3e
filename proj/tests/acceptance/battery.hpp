#pragma once

#include <string>
#include <vector>

namespace conelab::acceptance {

struct Options {
    // Coarser grids for the quick self test.
    bool reduced = false;
};

struct Outcome {
    std::string id;  // A1 .. A10
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

const std::vector<std::string>& criterion_ids();
std::string criterion_title(const std::string& id);
// Accepts "A7", "a7" or "7"; returns an empty string when unknown.
std::string normalize_id(const std::string& id);

Outcome run_criterion(const std::string& id, const Options& opts = {});
std::string format_line(const Outcome& o);

}  // namespace conelab::acceptance
