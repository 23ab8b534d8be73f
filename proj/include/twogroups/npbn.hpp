#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "twogroups/decision.hpp"

namespace twogroups {

// Discretized mixing distribution: an atom at 0 plus a slab on a uniform grid.
// density holds the slab measure, so atom0_mass + sum(density * quad_weights) = 1;
// normalized_density() divides out the slab mass.
struct MixingEstimate {
    double atom0_mass = 1.0;
    std::vector<double> grid;
    std::vector<double> density;
    std::vector<double> quad_weights;

    double signal_mass() const;
    double total_mass() const { return atom0_mass + signal_mass(); }
    std::vector<double> normalized_density() const;
};

struct NpbnGridSpec {
    std::size_t points = 2048;
    std::optional<double> half_width;  // default max(6 sqrt(sigma2 + tau2), max|x| + 4 sigma)
};

enum class FeedOrder { AscendingMagnitude, AsGiven };

// Fraction of observations whose N(0, sigma2) density is below the N(0, sigma2 + tau2) density.
double npbn_calibrate_p0(std::span<const double> x, double sigma2, double tau2);

double npbn_half_width(std::span<const double> x, double sigma2, double tau2);

// (1 - p0) delta_0 + p0 N(0, tau2) with the slab discretized on [-K, K].
MixingEstimate npbn_initial(std::span<const double> x, double sigma2, double tau2, double p0,
                            const NpbnGridSpec& grid = {});

// One update P <- (1 - w) P + w phi_sigma(x - .) P / normalizer.
// Returns the mass defect corrected by renormalization.
double npbn_step(MixingEstimate& est, double x, double weight, double sigma2);

// Newton's recursion with weights 1/(i + 1). mass_defects, when given,
// receives the pre-correction defect |total - 1| after every step.
MixingEstimate npbn_recursion(std::span<const double> x, double sigma2, double tau2, double p0,
                              const NpbnGridSpec& grid = {}, FeedOrder order = FeedOrder::AscendingMagnitude,
                              std::vector<double>* mass_defects = nullptr);

// Replaces the slab by its mirror average f(mu)/2 + f(-mu)/2. The effects are
// symmetric under the model, and a symmetric slab makes the odds monotone in |x|.
void npbn_symmetrize(MixingEstimate& est);
// (1/p_m - 1) phi_sigma(x) / int phi_sigma(x - mu) f_m(mu) dmu.
double npbn_odds(double x, const MixingEstimate& est, double sigma2);

// Reject iff the odds statistic is below 1. p_m = 0 rejects none, p_m = 1 rejects all.
DecisionVector npbn_decide(std::span<const double> x, const MixingEstimate& est, double sigma2);

// Whole procedure with the usual configuration tau2 = sigma2; the final slab is symmetrized.
DecisionVector npbn_procedure(std::span<const double> x, double sigma2, std::optional<double> tau2 = std::nullopt,
                              const NpbnGridSpec& grid = {});

}  // namespace twogroups
