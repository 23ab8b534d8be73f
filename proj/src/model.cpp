#include "twogroups/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "twogroups/error.hpp"
#include "twogroups/normal.hpp"

namespace twogroups {

double ModelParams::sigma() const { return std::sqrt(sigma2); }

void ModelParams::validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("ModelParams: p must lie in [0,1], got " + std::to_string(p));
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw DomainError("ModelParams: sigma2 must be positive");
    if (!(tau2 > 0.0) || !std::isfinite(tau2)) throw DomainError("ModelParams: tau2 must be positive");
}

ModelParams default_params(double p, std::size_t m, double sigma) {
    if (m < 2) throw DomainError("default_params: m must be at least 2");
    return {p, sigma * sigma, 2.0 * std::log(static_cast<double>(m)) * sigma * sigma};
}

void SymmetrizedGamma::validate() const {
    if (!(shape > 0.0) || !(scale > 0.0)) throw DomainError("SymmetrizedGamma: shape and scale must be positive");
}

SymmetrizedGamma default_symmetrized_gamma(std::size_t m) {
    constexpr double shape = 4.0;
    const double scale =
        2.0 * std::sqrt(2.0 * std::log(static_cast<double>(m))) / (shape * std::sqrt(2.0 * std::numbers::pi));
    return {shape, scale};
}

double symmetrized_gamma_density(double x, const SymmetrizedGamma& alt) {
    alt.validate();
    const double a = std::fabs(x);
    if (a == 0.0) return alt.shape < 1.0 ? INFINITY : (alt.shape == 1.0 ? 0.5 / alt.scale : 0.0);
    const double log_g = (alt.shape - 1.0) * std::log(a) - a / alt.scale - std::lgamma(alt.shape) -
                         alt.shape * std::log(alt.scale);
    return 0.5 * std::exp(log_g);
}

std::size_t Dataset::signal_count() const {
    std::size_t n = 0;
    for (bool g : gamma) n += g ? 1 : 0;
    return n;
}

void Dataset::validate() const {
    if (gamma.size() != x.size()) throw DomainError("Dataset: gamma length differs from x");
    if (mu.size() != x.size()) throw DomainError("Dataset: mu length differs from x");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!gamma[i] && mu[i] != 0.0) throw DomainError("Dataset: nonzero effect on a null coordinate");
    }
}

Dataset dataset_from_statistics(std::vector<double> x) {
    Dataset d;
    d.gamma.assign(x.size(), false);
    d.mu.assign(x.size(), 0.0);
    d.x = std::move(x);
    return d;
}

Dataset sample_dataset(const ModelParams& params, std::size_t m, const AltKind& alt, Stream& stream) {
    params.validate();
    if (m < 1) throw DomainError("sample_dataset: m must be at least 1");
    if (const auto* g = std::get_if<SymmetrizedGamma>(&alt)) g->validate();

    Dataset d;
    d.x.resize(m);
    d.gamma.resize(m);
    d.mu.resize(m);
    const double sigma = params.sigma();
    const double tau = std::sqrt(params.tau2);
    for (std::size_t i = 0; i < m; ++i) {
        const bool is_signal = stream.uniform() < params.p;
        const double noise = sigma * stream.normal();
        double effect = 0.0;
        if (const auto* g = std::get_if<SymmetrizedGamma>(&alt)) {
            const double sign = stream.uniform() < 0.5 ? -1.0 : 1.0;
            effect = sign * stream.gamma(g->shape, g->scale);
        } else {
            effect = tau * stream.normal();
        }
        d.gamma[i] = is_signal;
        d.mu[i] = is_signal ? effect : 0.0;
        d.x[i] = d.mu[i] + noise;
    }
    return d;
}

double marginal_density(double x, const ModelParams& params) {
    params.validate();
    return (1.0 - params.p) * normal_pdf(x, params.null_var()) + params.p * normal_pdf(x, params.alt_var());
}

double log_marginal_density(double x, const ModelParams& params) {
    const double log_null = params.p < 1.0 ? std::log1p(-params.p) + log_normal_pdf(x, params.null_var()) : -INFINITY;
    const double log_alt = params.p > 0.0 ? std::log(params.p) + log_normal_pdf(x, params.alt_var()) : -INFINITY;
    return log_add_exp(log_null, log_alt);
}

double log_likelihood(std::span<const double> x, const ModelParams& params) {
    params.validate();
    double total = 0.0;
    for (double xi : x) total += log_marginal_density(xi, params);
    return total;
}

double two_sided_pvalue(double x, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("two_sided_pvalue: sigma must be positive");
    return std::erfc(std::fabs(x) / (sigma * std::numbers::sqrt2));
}

std::vector<double> two_sided_pvalues(std::span<const double> x, double sigma) {
    std::vector<double> out;
    out.reserve(x.size());
    for (double xi : x) out.push_back(two_sided_pvalue(xi, sigma));
    return out;
}

}  // namespace twogroups
