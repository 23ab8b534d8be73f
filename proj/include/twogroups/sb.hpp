#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "twogroups/posterior.hpp"
#include "twogroups/random.hpp"

namespace twogroups {

// Full Bayes two-groups model with p ~ Beta(1, beta), pi(sigma2) = 1/sigma2 and
// pi(tau2 | sigma2) = sigma2 / (sigma2 + tau2)^2.
struct SbConfig {
    double beta = 22.76;
    int n_iter = 5000;
    int n_burn = 1000;
    std::optional<double> sigma2_known;
    double proposal_sd = 0.5;  // initial random-walk sd on log variances, tuned during burn-in
    int mh_steps = 3;          // Metropolis updates per variance per sweep
    double target_acceptance = 0.35;
    void validate() const;
};

// Gibbs sampler over (gamma, p, tau2[, sigma2]). Observations are visited in
// ascending order of value, so the chain depends on the data only through
// its multiset of values. prob_null is the Rao-Blackwellized average of
// P(gamma_i = 0 | p, sigma2, tau2, x_i) over kept sweeps.
PosteriorSummary sb_run(std::span<const double> x, const SbConfig& cfg, Stream& stream);

// Conjugate draw p | gamma ~ Beta(1 + signals, beta + m - signals).
double sb_draw_p(std::size_t signals, std::size_t m, double beta, Stream& stream);

inline DecisionVector sb_decide(const PosteriorSummary& summary) { return posterior_decide(summary); }

}  // namespace twogroups
