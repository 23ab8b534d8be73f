#pragma once

#include <cstddef>
#include <span>

#include "twogroups/decision.hpp"
#include "twogroups/model.hpp"

namespace twogroups {

// Loss delta0 for a false rejection, deltaA for a missed signal.
struct LossMatrix {
    double delta0 = 1.0;
    double deltaA = 1.0;
    void validate() const;
};

// BFDR control at level alpha is Bayes-risk control under this loss.
inline LossMatrix bfdr_loss(double alpha) { return {1.0 - alpha, alpha}; }

// Per-test probabilities of type I (t1) and type II (t2) errors.
struct ErrorRates {
    double t1 = 0.0;
    double t2 = 0.0;
};

// Threshold c of the Bayes oracle, which rejects when x^2 > c^2 with
//   c^2 = 2 sigma2 (sigma2 + tau2) / tau2 * (0.5 log((sigma2 + tau2) / sigma2)
//                                            + log(delta0 (1 - p) / (deltaA p))).
// Returns +inf when p = 0 (reject nothing) and 0 when c^2 <= 0 (reject all).
double oracle_threshold(const ModelParams& params, const LossMatrix& loss = {});

// Error rates of the rule |X| > c: t1 = 2(1 - Phi(c/sigma)), t2 = 2 Phi(c/sqrt(sigma2+tau2)) - 1.
ErrorRates per_test_error_rates(const ModelParams& params, double threshold);

// delta0 (1 - p) t1 + deltaA p t2. Under 0-1 loss this is the misclassification probability.
double bayes_risk(const ModelParams& params, const ErrorRates& rates, const LossMatrix& loss = {});

// P(a single test rejects) = (1-p) t1 + p (1 - t2).
double rejection_probability(const ModelParams& params, const ErrorRates& rates);

// (1-p) t1 / ((1-p) t1 + p (1 - t2)); 1 when the denominator vanishes.
double bfdr_of_threshold(const ModelParams& params, const ErrorRates& rates);

// Frequentist FDR of a fixed-threshold rule over m independent tests:
// FDR = pFDR * P(R > 0) with pFDR = BFDR.
double fdr_of_threshold(const ModelParams& params, const ErrorRates& rates, std::size_t m);

struct BfdrRiskAgreement {
    bool bfdr_below = false;  // BFDR < alpha
    bool risk_below = false;  // (1-alpha)(1-p) t1 + alpha p t2 < alpha p
    bool agree() const { return bfdr_below == risk_below; }
};

BfdrRiskAgreement bfdr_risk_equivalence_check(const ModelParams& params, const ErrorRates& rates, double alpha);

// P(H_A | x) under the true mixture.
double posterior_alt_probability(double x, const ModelParams& params);

// f_A(x) / f_0(x) = sqrt(sigma2 / (sigma2+tau2)) exp(x^2 tau2 / (2 sigma2 (sigma2+tau2))).
double likelihood_ratio(double x, const ModelParams& params);

DecisionVector threshold_decide(std::span<const double> x, double threshold);

DecisionVector oracle_decide(std::span<const double> x, const ModelParams& params, const LossMatrix& loss = {});

}  // namespace twogroups
