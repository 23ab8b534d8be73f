#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace twogroups {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::vector<std::string> details;  // one line per individual check
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20250101;
    std::size_t workers = 1;
};

constexpr int kCriterionCount = 10;
bool is_slow_criterion(int id);

CriterionResult run_criterion(int id, const AcceptanceOptions& options);

// "PASS 3 modified-BH FDR identity (12.3 s)" followed by indented detail lines.
std::string format_result(const CriterionResult& result, bool with_details);

}  // namespace twogroups
