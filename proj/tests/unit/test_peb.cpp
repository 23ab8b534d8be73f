#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "twogroups/bayes.hpp"
#include "twogroups/model.hpp"
#include "twogroups/peb.hpp"
#include "twogroups/random.hpp"

using namespace twogroups;

namespace {

Dataset draw(double p, std::size_t m, std::uint64_t seed) {
    Stream s(seed);
    return sample_dataset(default_params(p, 200), m, GaussianSignal{}, s);
}

double moment(const std::vector<double>& x, int k) {
    double s = 0.0;
    for (double v : x) s += std::pow(v, k);
    return s / x.size();
}

}  // namespace

TEST(Peb, PriorMedian) {
    const PriorP prior;
    EXPECT_NEAR(prior.median(), 1.0 - std::pow(0.5, 1.0 / 22.76), 1e-15);
    EXPECT_NEAR(prior.median(), 0.030, 5e-4);
    EXPECT_NEAR(prior.log_density(0.1), std::log(22.76) + 21.76 * std::log(0.9), 1e-12);
}

TEST(Peb, EmDegenerateOnZeros) {
    const std::vector<double> zeros(50, 0.0);
    const EmResult r = em_fit_given_p(zeros, 0.3, std::nullopt);
    EXPECT_TRUE(r.degenerate);
    EXPECT_GE(r.sigma2, 1e-8);
}

TEST(Peb, EmAscentAndConsistency) {
    const Dataset d = draw(0.2, 100000, 1);
    const ModelParams truth = default_params(0.2, 200);
    EmOptions opt;
    opt.record_trace = true;
    for (std::optional<double> known : {std::optional<double>(1.0), std::optional<double>()}) {
        const EmResult r = em_fit_given_p(d.x, 0.2, known, opt);
        ASSERT_GE(r.trace.size(), 1u);
        for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GE(r.trace[i], r.trace[i - 1] - 1e-9);
        EXPECT_NEAR(r.tau2, truth.tau2, 0.05 * truth.tau2);
        EXPECT_NEAR(r.sigma2, truth.sigma2, 0.05 * truth.sigma2);
        EXPECT_NEAR(r.loglik, mixture_loglik(d.x, 0.2, r.sigma2, r.tau2), 1e-6);
    }
}

TEST(Peb, EmAscentOnSmallSamples) {
    EmOptions opt;
    opt.record_trace = true;
    for (int rep = 0; rep < 30; ++rep) {
        const Dataset d = draw(0.1 + 0.02 * rep, 200, 100 + rep);
        const EmResult r = em_fit_given_p(d.x, 0.3, std::nullopt, opt);
        for (std::size_t i = 1; i < r.trace.size(); ++i) ASSERT_GE(r.trace[i], r.trace[i - 1] - 1e-9);
    }
}

TEST(Peb, MomentEstimatorsConsistent) {
    const Dataset d = draw(0.2, 1000000, 2);
    const ModelParams truth = default_params(0.2, 200);
    const double m2 = moment(d.x, 2), m4 = moment(d.x, 4);
    const MomentResult known = moment_fit_given_p(m2, m4, 0.2, 1.0);
    const MomentResult unknown = moment_fit_given_p(m2, m4, 0.2, std::nullopt);
    EXPECT_FALSE(known.clamped);
    EXPECT_NEAR(known.tau2, truth.tau2, 0.02 * truth.tau2);
    EXPECT_NEAR(unknown.tau2, truth.tau2, 0.02 * truth.tau2);
    // Population moments give the truth exactly.
    const double e2 = 1.0 + 0.2 * truth.tau2;
    const double e4 = 3.0 * (0.8 + 0.2 * truth.alt_var() * truth.alt_var());
    const MomentResult exact = moment_fit_given_p(e2, e4, 0.2, std::nullopt);
    EXPECT_NEAR(exact.tau2, truth.tau2, 1e-9);
    EXPECT_NEAR(exact.sigma2, 1.0, 1e-9);
    // Kurtosis below the Gaussian value has no admissible root.
    EXPECT_TRUE(moment_fit_given_p(1.0, 2.0, 0.2, 1.0).clamped);
}

TEST(Peb, ProfileArgmax) {
    const PGrid grid;
    for (int rep = 0; rep < 5; ++rep) {
        const Dataset d = draw(0.2, 200, 10 + rep);
        const EstimateSet est = profile_mle(d.x, 1.0, grid);
        EXPECT_DOUBLE_EQ(est.sigma2_hat, 1.0);
        for (double p = grid.lo; p <= grid.hi + 1e-12; p += grid.step) {
            const ProfilePoint pt = evaluate_profile(d.x, p, 1.0, VarianceFit::EM, nullptr);
            ASSERT_GE(est.objective, pt.objective - 1e-9) << p;
        }
    }
}

TEST(Peb, PenalizedDominatesAtItsOwnArgmax) {
    const PriorP prior;
    for (int rep = 0; rep < 5; ++rep) {
        const Dataset d = draw(0.05, 200, 20 + rep);
        const EstimateSet peb1 = profile_mle(d.x, 1.0);
        const EstimateSet peb2 = penalized_mle(d.x, prior, 1.0, VarianceFit::Moments);
        const ProfilePoint at1 = evaluate_profile(d.x, peb1.p_hat, 1.0, VarianceFit::Moments, &prior);
        EXPECT_GE(peb2.objective, at1.objective - 1e-9);
        EXPECT_EQ(peb2.method, EstimationMethod::PenalizedMoment);
    }
}

TEST(Peb, PenaltyPullsTowardZero) {
    // With a strong Beta(1, beta) prior the penalized p_hat never exceeds the unpenalized one.
    const Dataset d = draw(0.3, 200, 30);
    const EstimateSet free = penalized_mle(d.x, PriorP{1.0 + 1e-9}, 1.0, VarianceFit::Moments);
    const EstimateSet pen = penalized_mle(d.x, PriorP{50.0}, 1.0, VarianceFit::Moments);
    EXPECT_LE(pen.p_hat, free.p_hat + 1e-3);
}

TEST(Peb, DecideWithTruthIsOracle) {
    for (double p : {0.025, 0.2, 0.5}) {
        const Dataset d = draw(p, 200, 40);
        const ModelParams truth = default_params(p, 200);
        EstimateSet est;
        est.p_hat = p;
        est.tau2_hat = truth.tau2;
        est.sigma2_hat = 1.0;
        EXPECT_EQ(peb_decide(d.x, est), oracle_decide(d.x, truth));
    }
}

TEST(Peb, BoundaryEstimates) {
    const Dataset d = draw(0.2, 200, 41);
    EstimateSet est;
    est.tau2_hat = 10.0;
    est.p_hat = 0.001;
    EXPECT_EQ(peb_decide(d.x, est).rejections(), 0u);
    est.p_hat = 0.999;
    EXPECT_EQ(peb_decide(d.x, est).rejections(), d.size());
}

TEST(Peb, PluginWithTruthControlsFdr) {
    const double p = 0.2;
    const ModelParams truth = default_params(p, 200);
    EstimateSet est;
    est.p_hat = p;
    est.tau2_hat = truth.tau2;
    double sum = 0.0, sq = 0.0;
    const int reps = 6000;
    for (int r = 0; r < reps; ++r) {
        Stream s = derive_stream(43, r, "data");
        const Dataset d = sample_dataset(truth, 200, GaussianSignal{}, s);
        const DecisionVector dec = bh_plugin_decide(d.x, est, 0.05);
        std::size_t v = 0, rr = 0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (!dec.reject[i]) continue;
            ++rr;
            v += d.gamma[i] ? 0 : 1;
        }
        const double f = rr ? double(v) / rr : 0.0;
        sum += f;
        sq += f * f;
    }
    const double mean = sum / reps;
    EXPECT_NEAR(mean, 0.05, 3.0 * std::sqrt((sq / reps - mean * mean) / reps));
}

TEST(Peb, PerturbationContinuity) {
    const Dataset d = draw(0.1, 200, 44);
    const EstimateSet est = penalized_mle(d.x, PriorP{}, 1.0, VarianceFit::Moments);
    EstimateSet moved = est;
    moved.p_hat += 1e-10;
    moved.tau2_hat += 1e-10;
    const double c = oracle_threshold({est.p_hat, est.sigma2_hat, est.tau2_hat});
    bool near_tie = false;
    for (double x : d.x) near_tie |= std::abs(std::abs(x) - c) < 1e-6;
    if (!near_tie) EXPECT_EQ(peb_decide(d.x, est), peb_decide(d.x, moved));
}
