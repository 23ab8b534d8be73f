#pragma once

#include <cstddef>
#include <span>

#include "twogroups/decision.hpp"
#include "twogroups/model.hpp"

namespace twogroups {

// Step-up thresholds i * alpha / m_eff. m_eff = m is classic BH, m_eff = m0
// the adaptive rule and m_eff = m (1 - p) the modified rule.
struct StepUpConfig {
    double alpha = 0.05;
    double m_eff = 1.0;
    void validate() const;
};

// Reject p-values at or below alpha / m.
DecisionVector bonferroni(std::span<const double> pvalues, double alpha);

// Largest rank k (1-based) with P_(k) <= k alpha / m_eff; 0 when none qualifies.
std::size_t step_up_cutoff_rank(std::span<const double> pvalues, const StepUpConfig& cfg);

// Rejects every hypothesis whose p-value is at most P_(k).
DecisionVector bh_step_up(std::span<const double> pvalues, const StepUpConfig& cfg);

// m (1 - p_hat) with p_hat >= 1 pulled back to 1 - 1/(2m).
double modified_bh_denominator(std::size_t m, double p_hat);

// c = inf{x > 0 : (1-p)(1 - Phi0(x)) / (1 - F(x)) < alpha}; reject when |X| > c.
// Requires p > 0 (throws NoThresholdError otherwise). m sets the initial
// bisection bracket [0, sigma sqrt(2 log m) + 6 sigma].
double bfdr_threshold(const ModelParams& params, double alpha, std::size_t m);

// The tail ratio inside bfdr_threshold, i.e. the BFDR of the rule |X| > x.
double bfdr_tail_ratio(const ModelParams& params, double x);

}  // namespace twogroups
