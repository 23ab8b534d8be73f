#pragma once

#include <cstddef>
#include <vector>

namespace twogroups {

// Per-hypothesis reject/accept output of any testing procedure.
struct DecisionVector {
    std::vector<bool> reject;

    DecisionVector() = default;
    explicit DecisionVector(std::size_t m, bool value = false) : reject(m, value) {}

    std::size_t size() const { return reject.size(); }
    std::size_t rejections() const {
        std::size_t n = 0;
        for (bool r : reject) n += r ? 1 : 0;
        return n;
    }
    bool operator==(const DecisionVector&) const = default;
};

}  // namespace twogroups
