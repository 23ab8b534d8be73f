#include "twogroups/frequentist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "twogroups/error.hpp"
#include "twogroups/normal.hpp"

namespace twogroups {

void StepUpConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("StepUpConfig: alpha must lie in (0,1)");
    if (!(m_eff > 0.0)) throw DomainError("StepUpConfig: m_eff must be positive");
}

DecisionVector bonferroni(std::span<const double> pvalues, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("bonferroni: alpha must lie in (0,1)");
    DecisionVector out(pvalues.size());
    if (pvalues.empty()) return out;
    const double level = alpha / static_cast<double>(pvalues.size());
    for (std::size_t i = 0; i < pvalues.size(); ++i) out.reject[i] = pvalues[i] <= level;
    return out;
}

std::size_t step_up_cutoff_rank(std::span<const double> pvalues, const StepUpConfig& cfg) {
    cfg.validate();
    std::vector<double> sorted(pvalues.begin(), pvalues.end());
    std::stable_sort(sorted.begin(), sorted.end());
    const double step = cfg.alpha / cfg.m_eff;
    for (std::size_t k = sorted.size(); k >= 1; --k) {
        if (sorted[k - 1] <= static_cast<double>(k) * step) return k;
    }
    return 0;
}

DecisionVector bh_step_up(std::span<const double> pvalues, const StepUpConfig& cfg) {
    cfg.validate();
    DecisionVector out(pvalues.size());
    std::vector<double> sorted(pvalues.begin(), pvalues.end());
    std::stable_sort(sorted.begin(), sorted.end());
    const double step = cfg.alpha / cfg.m_eff;
    std::size_t k = 0;
    for (std::size_t i = sorted.size(); i >= 1; --i) {
        if (sorted[i - 1] <= static_cast<double>(i) * step) {
            k = i;
            break;
        }
    }
    if (k == 0) return out;
    const double cutoff = sorted[k - 1];
    for (std::size_t i = 0; i < pvalues.size(); ++i) out.reject[i] = pvalues[i] <= cutoff;
    return out;
}

double modified_bh_denominator(std::size_t m, double p_hat) {
    const double md = static_cast<double>(m);
    if (p_hat >= 1.0) p_hat = 1.0 - 1.0 / (2.0 * md);
    return md * (1.0 - std::max(p_hat, 0.0));
}

double bfdr_tail_ratio(const ModelParams& params, double x) {
    // Two-sided and one-sided tails give the same ratio by symmetry.
    const double null_tail = normal_sf(x / params.sigma());
    const double alt_tail = normal_sf(x / std::sqrt(params.alt_var()));
    const double num = (1.0 - params.p) * null_tail;
    const double den = num + params.p * alt_tail;
    if (den <= 0.0) return 0.0;
    return num / den;
}

double bfdr_threshold(const ModelParams& params, double alpha, std::size_t m) {
    params.validate();
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("bfdr_threshold: alpha must lie in (0,1)");
    if (params.p == 0.0) throw NoThresholdError("bfdr_threshold: p = 0, BFDR is identically 1");
    if (bfdr_tail_ratio(params, 0.0) < alpha) return 0.0;

    const double sigma = params.sigma();
    double lo = 0.0;
    double hi = sigma * std::sqrt(2.0 * std::log(std::max<double>(static_cast<double>(m), 2.0))) + 6.0 * sigma;
    int expansions = 0;
    while (bfdr_tail_ratio(params, hi) >= alpha) {
        lo = hi;
        hi *= 2.0;
        if (++expansions > 60) throw NoThresholdError("bfdr_threshold: ratio never drops below alpha");
    }
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (bfdr_tail_ratio(params, mid) < alpha) hi = mid;
        else lo = mid;
    }
    return hi;
}

}  // namespace twogroups
