#include "battery.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Acceptance battery"};
    std::vector<std::string> only;
    bool reduced = false;
    app.add_option("--criteria", only, "Criteria to run (A1..A10)");
    app.add_flag("--reduced", reduced, "Use the coarse self-test grids");
    CLI11_PARSE(app, argc, argv);

    const auto& ids = only.empty() ? conelab::acceptance::criterion_ids() : only;
    int failed = 0;
    for (const auto& id : ids) {
        if (conelab::acceptance::normalize_id(id).empty()) {
            std::cerr << "unknown criterion " << id << '\n';
            return 2;
        }
        const auto o = conelab::acceptance::run_criterion(id, {reduced});
        std::cout << conelab::acceptance::format_line(o) << std::endl;
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
