#include "twogroups/identifiability.hpp"

#include <algorithm>
#include <cmath>

#include "twogroups/error.hpp"
#include "twogroups/normal.hpp"

namespace twogroups {

namespace {

double draw_observation(const ModelParams& params, Stream& stream) {
    const bool signal = stream.uniform() < params.p;
    const double sd = std::sqrt(signal ? params.alt_var() : params.null_var());
    return sd * stream.normal();
}

}  // namespace

double log_ratio(double x, const ModelParams& params1, const ModelParams& params2) {
    return log_marginal_density(x, params1) - log_marginal_density(x, params2);
}

KlStats kl_mc(const ModelParams& params1, const ModelParams& params2, std::size_t n, Stream& stream) {
    params1.validate();
    params2.validate();
    if (n < 1000) throw DomainError("kl_mc: need at least 1000 draws");
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double l = log_ratio(draw_observation(params1, stream), params1, params2);
        sum += l;
        sum2 += l * l;
    }
    KlStats s;
    const double nd = static_cast<double>(n);
    s.n_mc = n;
    s.k12 = sum / nd;
    s.v12 = sum2 / nd;
    s.se_k12 = std::sqrt(std::max(s.v12 - s.k12 * s.k12, 0.0) / nd);
    return s;
}

double wrong_model_prob(const KlStats& stats, std::size_t m) {
    const double var = stats.variance();
    if (!(var > 0.0)) throw DomainError("wrong_model_prob: log-ratio variance must be positive");
    const double md = static_cast<double>(m);
    return normal_cdf(-md * stats.k12 / std::sqrt(md * var));
}

double wrong_model_prob_uncentered(const KlStats& stats, std::size_t m) {
    if (!(stats.v12 > 0.0)) throw DomainError("wrong_model_prob_uncentered: second moment must be positive");
    const double md = static_cast<double>(m);
    return normal_cdf(-md * stats.k12 / std::sqrt(md * stats.v12));
}

double wrong_model_prob_direct(const ModelParams& params1, const ModelParams& params2, std::size_t m, std::size_t reps,
                               Stream& stream) {
    params1.validate();
    params2.validate();
    if (reps < 1000) throw DomainError("wrong_model_prob_direct: need at least 1000 replicates");
    std::size_t negative = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        double d = 0.0;
        for (std::size_t i = 0; i < m; ++i) d += log_ratio(draw_observation(params1, stream), params1, params2);
        negative += d < 0.0 ? 1 : 0;
    }
    return static_cast<double>(negative) / static_cast<double>(reps);
}

ModelParams all_signal_competitor(const ModelParams& params1) {
    params1.validate();
    if (!(params1.p > 0.0)) throw DomainError("all_signal_competitor: needs p > 0");
    return ModelParams{1.0, params1.sigma2, params1.p * params1.tau2};
}

ModelParams no_signal_competitor(const ModelParams& params1) {
    params1.validate();
    return ModelParams{0.0, params1.sigma2 + params1.p * params1.tau2, params1.tau2};
}

}  // namespace twogroups
