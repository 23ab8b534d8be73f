#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "twogroups/acceptance.hpp"

// Prints one PASS/FAIL line per criterion; exit status 1 if any fails.
int main(int argc, char** argv) {
    twogroups::AcceptanceOptions opts;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) ids.push_back(std::atoi(argv[++i]));
        else if (a == "--seed" && i + 1 < argc) opts.seed = std::strtoull(argv[++i], nullptr, 10);
        else if (a == "--workers" && i + 1 < argc) opts.workers = std::strtoull(argv[++i], nullptr, 10);
        else {
            std::cerr << "usage: twogroups_acceptance [--criterion N]... [--seed S] [--workers W]\n";
            return 2;
        }
    }
    if (ids.empty()) {
        for (int i = 1; i <= twogroups::kCriterionCount; ++i) ids.push_back(i);
    }
    bool all = true;
    for (int id : ids) {
        const auto r = twogroups::run_criterion(id, opts);
        std::cout << twogroups::format_result(r, true) << std::endl;
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
