#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "twogroups/model.hpp"
#include "twogroups/normal.hpp"
#include "twogroups/random.hpp"
#include "twogroups/sb.hpp"

using namespace twogroups;

namespace {

// P(null | x) for a single observation with sigma2 = 1 known, p ~ Beta(1, beta)
// and pi(tau2) = (1 + tau2)^-2: integrate p out exactly, then u = 1 + tau2 by
// the substitution u = 1 / s^2 on a fine midpoint rule.
double single_point_prob_null(double x, double beta) {
    const int n = 200000;
    double slab = 0.0;
    for (int k = 0; k < n; ++k) {
        const double s = (k + 0.5) / n;  // u = 1 / s^2, du = 2 / s^3 ds, u^-2 du = 2 s ds
        const double u = 1.0 / (s * s);
        slab += normal_pdf(x, u) * 2.0 * s / n;
    }
    const double null_part = beta / (1.0 + beta) * normal_pdf(x, 1.0);
    return null_part / (null_part + slab / (1.0 + beta));
}

SbConfig known_cfg(int iter = 3000, int burn = 500) {
    SbConfig cfg;
    cfg.sigma2_known = 1.0;
    cfg.n_iter = iter;
    cfg.n_burn = burn;
    return cfg;
}

}  // namespace

TEST(Sb, OracleSelfCheck) {
    // At x = 0 the slab integral is 1 / (1.5 sqrt(2 pi)).
    const double slab = kInvSqrt2Pi / 1.5;
    const double expect = 22.76 * kInvSqrt2Pi / (22.76 * kInvSqrt2Pi + slab);
    EXPECT_NEAR(single_point_prob_null(0.0, 22.76), expect, 1e-6);
}

TEST(Sb, SinglePointMatchesQuadrature) {
    for (double x : {0.0, 2.5, 4.0}) {
        Stream s(5);
        const PosteriorSummary post = sb_run(std::vector<double>{x}, known_cfg(40000, 2000), s);
        EXPECT_NEAR(post.prob_null[0], single_point_prob_null(x, 22.76), 0.01) << x;
    }
    Stream s(6);
    EXPECT_GT(sb_run(std::vector<double>{0.0}, known_cfg(), s).prob_null[0], 0.5);
}

TEST(Sb, SwapIsExact) {
    Stream d(9);
    const Dataset data = sample_dataset(default_params(0.1, 200), 40, GaussianSignal{}, d);
    std::vector<double> swapped = data.x;
    std::swap(swapped[3], swapped[17]);
    Stream a(10), b(10);
    const PosteriorSummary pa = sb_run(data.x, known_cfg(600, 100), a);
    const PosteriorSummary pb = sb_run(swapped, known_cfg(600, 100), b);
    EXPECT_EQ(pa.prob_null[3], pb.prob_null[17]);
    EXPECT_EQ(pa.prob_null[17], pb.prob_null[3]);
    EXPECT_EQ(pa.prob_null[5], pb.prob_null[5]);
}

TEST(Sb, AntitoneInMagnitude) {
    std::vector<double> x{0.2, -0.5, 1.0, 0.0, 0.0};
    std::vector<double> probs;
    for (double v : {0.0, 1.5, 3.0, 4.5, 6.0}) {
        x[4] = v;
        Stream s(12);
        probs.push_back(sb_run(x, known_cfg(8000, 1000), s).prob_null[4]);
    }
    for (std::size_t i = 1; i < probs.size(); ++i) EXPECT_LT(probs[i], probs[i - 1] + 0.005) << i;
    EXPECT_LT(probs.back(), 0.1);
}

TEST(Sb, EntriesAreProbabilitiesAndTuned) {
    Stream d(13);
    const Dataset data = sample_dataset(default_params(0.2, 200), 200, GaussianSignal{}, d);
    for (bool known : {true, false}) {
        SbConfig cfg = known_cfg(2000, 500);
        if (!known) cfg.sigma2_known.reset();
        Stream s(14);
        const PosteriorSummary post = sb_run(data.x, cfg, s);
        EXPECT_EQ(post.draws_used, 1500u);
        for (double v : post.prob_null) {
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
        }
        EXPECT_GE(post.diagnostics.accept_rate_tau2, 0.1);
        EXPECT_LE(post.diagnostics.accept_rate_tau2, 0.7);
        if (!known) {
            EXPECT_GE(post.diagnostics.accept_rate_sigma2, 0.1);
            EXPECT_LE(post.diagnostics.accept_rate_sigma2, 0.7);
        }
    }
}

TEST(Sb, BetaConjugateDraws) {
    Stream s(15);
    const std::size_t n = 10000;
    std::vector<double> draws(n);
    for (double& v : draws) v = sb_draw_p(7, 200, 22.76, s);
    std::sort(draws.begin(), draws.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = boost::math::ibeta(8.0, 22.76 + 193.0, draws[i]);
        d = std::max({d, std::abs(f - double(i) / n), std::abs(f - double(i + 1) / n)});
    }
    EXPECT_LT(d, 1.628 / std::sqrt(double(n)));
}

TEST(Sb, DecisionRule) {
    PosteriorSummary s;
    s.prob_null = {0.49, 0.51};
    EXPECT_EQ(sb_decide(s).reject, (std::vector<bool>{true, false}));
    s.prob_null = {0.5, 0.5, 0.5};
    EXPECT_EQ(sb_decide(s).rejections(), 0u);
}

TEST(Sb, InvalidConfig) {
    SbConfig cfg;
    cfg.n_iter = 100;
    cfg.n_burn = 100;
    EXPECT_ANY_THROW(cfg.validate());
}
