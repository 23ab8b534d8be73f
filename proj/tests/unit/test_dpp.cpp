#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "twogroups/dpp.hpp"
#include "twogroups/model.hpp"
#include "twogroups/normal.hpp"
#include "twogroups/random.hpp"

using namespace twogroups;

namespace {

// With one observation the urn reduces to the base measure, so P(mu = 0 | x)
// integrates p0 ~ Beta(1, b) and tau2 with (1 + tau2)^-2 exactly as the
// two-point spike-and-slab posterior.
double single_point_prob_null(double x, double b) {
    const int n = 200000;
    double slab = 0.0;
    for (int k = 0; k < n; ++k) {
        const double s = (k + 0.5) / n;
        slab += normal_pdf(x, 1.0 / (s * s)) * 2.0 * s / n;
    }
    const double null_part = b / (1.0 + b) * normal_pdf(x, 1.0);
    return null_part / (null_part + slab / (1.0 + b));
}

DppConfig known_cfg(int iter, int burn) {
    DppConfig cfg;
    cfg.sigma2_known = 1.0;
    cfg.n_iter = iter;
    cfg.n_burn = burn;
    return cfg;
}

}  // namespace

TEST(Dpp, NullDataStaysNull) {
    std::vector<double> x(60);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.01 * (double(i % 7) - 3.0);
    Stream s(1);
    const PosteriorSummary post = dpp_run(x, known_cfg(1500, 300), s);
    for (double v : post.prob_null) EXPECT_GT(v, 0.9);
}

TEST(Dpp, SmallPrecisionSinglePoint) {
    for (double x : {0.0, 3.0}) {
        DppConfig cfg = known_cfg(40000, 2000);
        cfg.fixed_c = 1e-6;
        Stream s(2);
        const PosteriorSummary post = dpp_run(std::vector<double>{x}, cfg, s);
        EXPECT_NEAR(post.prob_null[0], single_point_prob_null(x, 22.76), 0.02) << x;
    }
}

TEST(Dpp, PartitionAndConjugateStep) {
    Stream d(3);
    const Dataset data = sample_dataset(default_params(0.15, 200), 200, GaussianSignal{}, d);
    DppChain chain(data.x, known_cfg(400, 100));
    Stream s(4);
    for (int t = 0; t < 200; ++t) {
        chain.sweep(s, t < 100);
        const DppState& st = chain.state();
        ASSERT_TRUE(st.partition_valid());
        ASSERT_TRUE(std::isfinite(chain.log_posterior()));
        int total = st.zero_count;
        for (int c : st.counts) total += c;
        ASSERT_EQ(total, 200);
        for (std::size_t i = 0; i < st.mu.size(); ++i) {
            if (st.label[i] < 0) ASSERT_EQ(st.mu[i], 0.0);
            else ASSERT_EQ(st.mu[i], st.atoms[st.label[i]]);
        }
    }
    const DppState& st = chain.state();
    const double a = 1.0 + st.nonzero_clusters();
    const double b = 22.76 + (st.zero_count > 0 ? 1.0 : 0.0);
    const std::size_t n = 10000;
    std::vector<double> draws(n);
    for (double& v : draws) v = chain.draw_p0(s);
    std::sort(draws.begin(), draws.end());
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = boost::math::ibeta(a, b, draws[i]);
        dmax = std::max({dmax, std::abs(f - double(i) / n), std::abs(f - double(i + 1) / n)});
    }
    EXPECT_LT(dmax, 1.628 / std::sqrt(double(n)));
}

TEST(Dpp, ZeroSignalFractionIsAbsorbing) {
    Stream d(5);
    const Dataset data = sample_dataset(default_params(0.3, 200), 100, GaussianSignal{}, d);
    DppConfig cfg = known_cfg(300, 100);
    cfg.fixed_p0 = 0.0;
    DppChain chain(data.x, cfg);
    Stream s(6);
    for (int t = 0; t < 300; ++t) {
        chain.sweep(s, t < 100);
        for (double mu : chain.state().mu) ASSERT_EQ(mu, 0.0);
    }
}

TEST(Dpp, UnknownSigmaRuns) {
    Stream d(7);
    const Dataset data = sample_dataset(default_params(0.1, 200), 200, GaussianSignal{}, d);
    DppConfig cfg = known_cfg(800, 200);
    cfg.sigma2_known.reset();
    Stream s(8);
    const PosteriorSummary post = dpp_run(data.x, cfg, s);
    EXPECT_EQ(post.prob_null.size(), 200u);
    EXPECT_GT(post.diagnostics.mean_sigma2, 0.5);
    EXPECT_LT(post.diagnostics.mean_sigma2, 2.0);
    for (double v : post.prob_null) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
    }
}

TEST(Dpp, Deterministic) {
    Stream d(9);
    const Dataset data = sample_dataset(default_params(0.1, 200), 80, GaussianSignal{}, d);
    Stream a(10), b(10);
    EXPECT_EQ(dpp_run(data.x, known_cfg(300, 100), a).prob_null, dpp_run(data.x, known_cfg(300, 100), b).prob_null);
}

TEST(Dpp, DecisionRule) {
    PosteriorSummary s;
    s.prob_null = {0.2, 0.8};
    EXPECT_EQ(dpp_decide(s).reject, (std::vector<bool>{true, false}));
    s.prob_null = {1.0, 1.0};
    EXPECT_EQ(dpp_decide(s).rejections(), 0u);
}
