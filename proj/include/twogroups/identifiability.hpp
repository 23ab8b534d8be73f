#pragma once

#include <cstddef>

#include "twogroups/model.hpp"
#include "twogroups/random.hpp"

namespace twogroups {

// Moments of the log ratio L = log(f1(X) / f2(X)) under X ~ f1.
struct KlStats {
    double k12 = 0.0;     // E L, the Kullback-Leibler divergence in nats
    double v12 = 0.0;     // E L^2
    double se_k12 = 0.0;
    std::size_t n_mc = 0;

    double variance() const { return v12 - k12 * k12; }
};

double log_ratio(double x, const ModelParams& params1, const ModelParams& params2);

KlStats kl_mc(const ModelParams& params1, const ModelParams& params2, std::size_t n, Stream& stream);

// P(D12 < 0) for D12 = sum of m log ratios, normal with mean m K12 and
// variance m (V12 - K12^2).
double wrong_model_prob(const KlStats& stats, std::size_t m);

// Same with the uncentered variance m V12.
double wrong_model_prob_uncentered(const KlStats& stats, std::size_t m);

// Fraction of reps in which a simulated D12 is negative.
double wrong_model_prob_direct(const ModelParams& params1, const ModelParams& params2, std::size_t m, std::size_t reps,
                               Stream& stream);

// Competitor with every test a signal and equal marginal variance: tau2 = p tau1^2.
ModelParams all_signal_competitor(const ModelParams& params1);

// Competitor with no signals and equal marginal variance: sigma2 = sigma1^2 + p tau1^2.
ModelParams no_signal_competitor(const ModelParams& params1);

}  // namespace twogroups
