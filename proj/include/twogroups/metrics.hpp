#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "twogroups/decision.hpp"

namespace twogroups {

// U: true nulls accepted, V: false rejections, T: missed signals, S: true discoveries.
struct ConfusionCounts {
    std::size_t U = 0, V = 0, T = 0, S = 0;

    std::size_t m0() const { return U + V; }
    std::size_t m1() const { return T + S; }
    std::size_t R() const { return V + S; }
    std::size_t W() const { return U + T; }
    std::size_t m() const { return m0() + m1(); }
    // V / R with 0/0 = 0.
    double fdp() const { return R() ? static_cast<double>(V) / static_cast<double>(R()) : 0.0; }
    double misclassified_fraction() const { return m() ? static_cast<double>(V + T) / static_cast<double>(m()) : 0.0; }
    bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion(const DecisionVector& decisions, const std::vector<bool>& gamma);

struct Estimate {
    double value = 0.0;
    double se = 0.0;
    std::size_t reps = 0;
};

struct MetricEstimates {
    Estimate fdr;
    Estimate mp;
    std::optional<Estimate> pfdr;        // absent when no replicate rejected anything
    std::optional<Estimate> power;       // absent when no replicate had a signal
    std::optional<Estimate> efficiency;  // oracle MP / MP, absent without an oracle or when MP = 0
    std::size_t reps = 0;
};

// Mean and standard error (sample sd / sqrt(n)). Values are summed in sorted
// order, so the result does not depend on the order of the replicates.
Estimate mean_and_se(std::vector<double> values);

MetricEstimates summarize(std::span<const ConfusionCounts> per_replicate, std::optional<double> oracle_mp = std::nullopt);

}  // namespace twogroups
