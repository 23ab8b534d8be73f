#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "twogroups/random.hpp"

namespace twogroups {

// Two-groups Gaussian scale mixture: X ~ (1-p) N(0, sigma2) + p N(0, sigma2 + tau2).
struct ModelParams {
    double p = 0.0;       // signal fraction
    double sigma2 = 1.0;  // null variance
    double tau2 = 1.0;    // signal-effect variance

    double null_var() const { return sigma2; }
    double alt_var() const { return sigma2 + tau2; }
    double sigma() const;

    // Throws DomainError unless 0 <= p <= 1, sigma2 > 0, tau2 > 0.
    void validate() const;
};

// Standard simulation setting: m tests, sigma = 1, tau^2 = 2 log m.
ModelParams default_params(double p, std::size_t m, double sigma = 1.0);

struct GaussianSignal {};

// Signal effects |mu| ~ Gamma(shape, scale) with a uniformly random sign.
struct SymmetrizedGamma {
    double shape = 4.0;
    double scale = 1.0;
    void validate() const;
};

// Shape 4 and scale 2 sqrt(2 log m) / (shape sqrt(2 pi)).
SymmetrizedGamma default_symmetrized_gamma(std::size_t m);

using AltKind = std::variant<GaussianSignal, SymmetrizedGamma>;

// Density 0.5 g(|x|; shape, scale) of the symmetrized gamma effect law.
double symmetrized_gamma_density(double x, const SymmetrizedGamma& alt);

struct Dataset {
    std::vector<double> x;
    std::vector<bool> gamma;  // true signal indicators
    std::vector<double> mu;   // signal effects; exactly 0 where gamma is false

    std::size_t size() const { return x.size(); }
    std::size_t signal_count() const;
    void validate() const;
};

// Builds a dataset from bare statistics (no latent truth known: gamma all false).
Dataset dataset_from_statistics(std::vector<double> x);

// Draws m iid pairs (gamma_i, x_i). Every observation consumes the same
// sequence of draws (indicator uniform, noise, effect) whatever p is, so
// datasets at different p from one stream share their noise.
Dataset sample_dataset(const ModelParams& params, std::size_t m, const AltKind& alt, Stream& stream);

double marginal_density(double x, const ModelParams& params);

// Log of the marginal density with the dominant component factored out;
// stays finite far into the tails. Accepts p = 0 and p = 1.
double log_marginal_density(double x, const ModelParams& params);

double log_likelihood(std::span<const double> x, const ModelParams& params);

// 2 (1 - Phi(|x| / sigma)).
double two_sided_pvalue(double x, double sigma);

std::vector<double> two_sided_pvalues(std::span<const double> x, double sigma);

}  // namespace twogroups
