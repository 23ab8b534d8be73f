#include <gtest/gtest.h>

#include <cmath>

#include "twogroups/identifiability.hpp"
#include "twogroups/model.hpp"
#include "twogroups/normal.hpp"
#include "twogroups/random.hpp"

using namespace twogroups;

namespace {

// K12 by deterministic quadrature over a fine grid.
double kl_quadrature(const ModelParams& a, const ModelParams& b) {
    const double h = 1e-3;
    double k = 0.0;
    for (double x = -80.0; x <= 80.0; x += h) {
        const double f = marginal_density(x, a);
        if (f > 0) k += f * log_ratio(x, a, b) * h;
    }
    return k;
}

}  // namespace

TEST(Kl, IdenticalModels) {
    const ModelParams m = default_params(0.1, 200);
    Stream s(1);
    const KlStats st = kl_mc(m, m, 10000, s);
    EXPECT_DOUBLE_EQ(st.k12, 0.0);
    EXPECT_DOUBLE_EQ(st.v12, 0.0);
    EXPECT_DOUBLE_EQ(log_ratio(1.7, m, m), 0.0);
}

TEST(Kl, MatchesQuadrature) {
    const ModelParams m1 = default_params(0.01, 200);
    const ModelParams m2 = all_signal_competitor(m1);
    Stream s(2);
    const KlStats st = kl_mc(m1, m2, 400000, s);
    const double q = kl_quadrature(m1, m2);
    EXPECT_NEAR(st.k12, q, 4.0 * st.se_k12);
    EXPECT_GE(st.k12 + 3.0 * st.se_k12, 0.0);
    // Nonnegative for a spread of pairs.
    for (double p : {0.05, 0.3, 0.9}) {
        const ModelParams a = default_params(p, 200);
        EXPECT_GE(kl_quadrature(a, no_signal_competitor(a)), 0.0);
        EXPECT_GE(kl_quadrature(a, all_signal_competitor(a)), 0.0);
    }
}

TEST(Kl, Competitors) {
    const ModelParams m1 = default_params(0.01, 200);
    const ModelParams a = all_signal_competitor(m1);
    EXPECT_DOUBLE_EQ(a.p, 1.0);
    EXPECT_NEAR(a.tau2, 0.01 * m1.tau2, 1e-15);
    EXPECT_NEAR(std::sqrt(a.tau2), 0.326, 1e-3);
    const ModelParams z = no_signal_competitor(default_params(0.95, 200));
    EXPECT_DOUBLE_EQ(z.p, 0.0);
    EXPECT_NEAR(std::sqrt(z.sigma2), 3.33, 5e-3);
    // Equal marginal variance by construction.
    EXPECT_NEAR(a.sigma2 + a.p * a.tau2, m1.sigma2 + m1.p * m1.tau2, 1e-12);
}

TEST(WrongModel, NormalApproximation) {
    KlStats st;
    st.k12 = 0.02;
    st.v12 = 0.3;
    const double expect = normal_cdf(-200 * 0.02 / std::sqrt(200 * (0.3 - 0.0004)));
    EXPECT_NEAR(wrong_model_prob(st, 200), expect, 1e-15);
    EXPECT_NEAR(wrong_model_prob_uncentered(st, 200), normal_cdf(-200 * 0.02 / std::sqrt(200 * 0.3)), 1e-15);
    st.k12 = 5.0;
    st.v12 = 26.0;
    EXPECT_LT(wrong_model_prob(st, 200), 1e-100);
}

TEST(WrongModel, DirectSimulation) {
    // Identical models give D12 = 0 exactly, never strictly negative.
    const ModelParams m = default_params(0.1, 200);
    Stream s(3);
    EXPECT_DOUBLE_EQ(wrong_model_prob_direct(m, m, 200, 1000, s), 0.0);

    const ModelParams m2 = default_params(0.95, 200);
    const ModelParams z = no_signal_competitor(m2);
    Stream t(4);
    const KlStats st = kl_mc(m2, z, 400000, t);
    EXPECT_NEAR(wrong_model_prob(st, 200), wrong_model_prob_direct(m2, z, 200, 4000, t), 0.03);
}
