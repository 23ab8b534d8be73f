#include "twogroups/bayes.hpp"

#include <cmath>
#include <limits>

#include "twogroups/error.hpp"
#include "twogroups/normal.hpp"

namespace twogroups {

void LossMatrix::validate() const {
    if (!(delta0 >= 0.0) || !(deltaA >= 0.0) || !(delta0 + deltaA > 0.0)) {
        throw DomainError("LossMatrix: losses must be nonnegative with positive sum");
    }
}

double oracle_threshold(const ModelParams& params, const LossMatrix& loss) {
    params.validate();
    loss.validate();
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double p = params.p;
    if (p == 0.0 || loss.deltaA == 0.0) return inf;
    if (p == 1.0 || loss.delta0 == 0.0) return 0.0;
    const double s2 = params.sigma2;
    const double v = params.alt_var();
    const double log_odds = std::log(loss.delta0) + std::log1p(-p) - std::log(loss.deltaA) - std::log(p);
    const double c2 = 2.0 * v * s2 / params.tau2 * (0.5 * std::log(v / s2) + log_odds);
    return c2 > 0.0 ? std::sqrt(c2) : 0.0;
}

ErrorRates per_test_error_rates(const ModelParams& params, double threshold) {
    params.validate();
    if (!(threshold >= 0.0)) throw DomainError("per_test_error_rates: threshold must be nonnegative");
    if (std::isinf(threshold)) return {0.0, 1.0};
    const double t1 = 2.0 * normal_sf(threshold / params.sigma());
    const double t2 = 1.0 - 2.0 * normal_sf(threshold / std::sqrt(params.alt_var()));
    return {t1, t2};
}

double bayes_risk(const ModelParams& params, const ErrorRates& rates, const LossMatrix& loss) {
    loss.validate();
    return loss.delta0 * (1.0 - params.p) * rates.t1 + loss.deltaA * params.p * rates.t2;
}

double rejection_probability(const ModelParams& params, const ErrorRates& rates) {
    return (1.0 - params.p) * rates.t1 + params.p * (1.0 - rates.t2);
}

double bfdr_of_threshold(const ModelParams& params, const ErrorRates& rates) {
    const double num = (1.0 - params.p) * rates.t1;
    const double den = num + params.p * (1.0 - rates.t2);
    if (!(den > 0.0)) return 1.0;
    return num / den;
}

double fdr_of_threshold(const ModelParams& params, const ErrorRates& rates, std::size_t m) {
    const double rho = rejection_probability(params, rates);
    if (rho >= 1.0) return bfdr_of_threshold(params, rates);
    // 1 - (1 - rho)^m, computed stably for small rho.
    const double any_rejection = -std::expm1(static_cast<double>(m) * std::log1p(-rho));
    return bfdr_of_threshold(params, rates) * any_rejection;
}

BfdrRiskAgreement bfdr_risk_equivalence_check(const ModelParams& params, const ErrorRates& rates, double alpha) {
    BfdrRiskAgreement out;
    out.bfdr_below = bfdr_of_threshold(params, rates) < alpha;
    const double p = params.p;
    out.risk_below = (1.0 - alpha) * (1.0 - p) * rates.t1 + alpha * p * rates.t2 < alpha * p;
    return out;
}

double likelihood_ratio(double x, const ModelParams& params) {
    const double s2 = params.sigma2;
    const double v = params.alt_var();
    return std::sqrt(s2 / v) * std::exp(0.5 * x * x * params.tau2 / (s2 * v));
}

double posterior_alt_probability(double x, const ModelParams& params) {
    params.validate();
    if (params.p == 0.0) return 0.0;
    if (params.p == 1.0) return 1.0;
    const double log_alt = std::log(params.p) + log_normal_pdf(x, params.alt_var());
    const double log_null = std::log1p(-params.p) + log_normal_pdf(x, params.null_var());
    return 1.0 / (1.0 + std::exp(log_null - log_alt));
}

DecisionVector threshold_decide(std::span<const double> x, double threshold) {
    DecisionVector out(x.size());
    if (std::isinf(threshold)) return out;
    const double c2 = threshold * threshold;
    for (std::size_t i = 0; i < x.size(); ++i) out.reject[i] = x[i] * x[i] > c2;
    return out;
}

DecisionVector oracle_decide(std::span<const double> x, const ModelParams& params, const LossMatrix& loss) {
    const double c = oracle_threshold(params, loss);
    if (c == 0.0) return DecisionVector(x.size(), true);
    return threshold_decide(x, c);
}

}  // namespace twogroups
