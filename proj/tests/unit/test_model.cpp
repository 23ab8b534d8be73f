#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "twogroups/error.hpp"
#include "twogroups/model.hpp"
#include "twogroups/random.hpp"

using namespace twogroups;

namespace {

// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST(Model, DefaultParams) {
    const ModelParams p = default_params(0.05, 200);
    EXPECT_DOUBLE_EQ(p.sigma2, 1.0);
    EXPECT_NEAR(p.tau2, 2.0 * std::log(200.0), 1e-14);
    EXPECT_THROW((ModelParams{1.5, 1.0, 1.0}).validate(), DomainError);
    EXPECT_THROW((ModelParams{0.5, 0.0, 1.0}).validate(), DomainError);
}

TEST(Model, NullDatasetHasNoSignals) {
    Stream s(11);
    const Dataset d = sample_dataset(default_params(0.0, 200), 200, GaussianSignal{}, s);
    EXPECT_EQ(d.signal_count(), 0u);
    for (double mu : d.mu) EXPECT_EQ(mu, 0.0);
}

TEST(Model, AllSignalVariance) {
    Stream s(12);
    const ModelParams p = default_params(1.0, 200);
    const std::size_t m = 400000;
    const Dataset d = sample_dataset(p, m, GaussianSignal{}, s);
    EXPECT_EQ(d.signal_count(), m);
    double ss = 0.0;
    for (double x : d.x) ss += x * x;
    const double var = p.alt_var();
    // sd of the sample second moment is var sqrt(2/m).
    EXPECT_NEAR(ss / m, var, 4.0 * var * std::sqrt(2.0 / m));
    EXPECT_NEAR(var, 11.5966, 1e-4);
}

TEST(Model, MeanSignalCount) {
    const ModelParams p = default_params(0.05, 200);
    double total = 0.0;
    const int reps = 4000;
    for (int r = 0; r < reps; ++r) {
        Stream s = derive_stream(5, r, "data");
        total += sample_dataset(p, 200, GaussianSignal{}, s).signal_count();
    }
    // Binomial(200, 0.05): sd of the mean is sqrt(9.5 / reps).
    EXPECT_NEAR(total / reps, 10.0, 4.0 * std::sqrt(9.5 / reps));
}

TEST(Model, MarginalDensityValues) {
    EXPECT_NEAR(marginal_density(0.0, {0.0, 1.0, 1.0}), 0.39894228, 1e-8);
    EXPECT_NEAR(marginal_density(0.0, {0.5, 1.0, 3.0}), 0.29921, 5e-6);
    EXPECT_NEAR(marginal_density(40.0, {0.5, 1.0, 3.0}), 0.0, 1e-80);
    // Tail stability of the log form far beyond double-precision density range.
    const double lf = log_marginal_density(200.0, {0.1, 1.0, 10.0});
    EXPECT_NEAR(lf, std::log(0.1) - 0.5 * std::log(2 * M_PI * 11.0) - 0.5 * 40000.0 / 11.0, 1e-9);
}

TEST(Model, MarginalDensityIntegratesToOne) {
    const ModelParams p{0.3, 1.0, 9.0};
    const double h = 1e-3;
    double sum = 0.0;
    for (double x = -60.0; x <= 60.0; x += h) sum += marginal_density(x, p) * h;
    EXPECT_NEAR(sum, 1.0, 1e-6);
}

TEST(Model, LogLikelihoodMatchesNaiveSum) {
    EXPECT_NEAR(log_likelihood(std::vector<double>{0.0}, {0.0, 1.0, 1.0}), -0.918938533, 1e-9);
    const ModelParams p{0.2, 1.5, 7.0};
    std::vector<double> same(17, 1.3);
    EXPECT_NEAR(log_likelihood(same, p), 17.0 * std::log(marginal_density(1.3, p)), 1e-10);

    Stream s(4);
    const Dataset d = sample_dataset(p, 500, GaussianSignal{}, s);
    double naive = 0.0;
    for (double x : d.x) {
        const double f0 = std::exp(-x * x / 3.0) / std::sqrt(2 * M_PI * 1.5);
        const double f1 = std::exp(-x * x / 17.0) / std::sqrt(2 * M_PI * 8.5);
        naive += std::log(0.8 * f0 + 0.2 * f1);
    }
    EXPECT_NEAR(log_likelihood(d.x, p), naive, 1e-10);
}

TEST(Model, PValues) {
    EXPECT_DOUBLE_EQ(two_sided_pvalue(0.0, 1.0), 1.0);
    EXPECT_NEAR(two_sided_pvalue(1.959964, 1.0), 0.05, 1e-6);
    EXPECT_NEAR(two_sided_pvalue(-1.959964, 1.0), 0.05, 1e-6);
    EXPECT_NEAR(two_sided_pvalue(3.919928, 2.0), 0.05, 1e-6);
}

TEST(Model, NullPValuesUniform) {
    Stream s(99);
    const std::size_t n = 100000;
    const Dataset d = sample_dataset({0.0, 1.0, 1.0}, n, GaussianSignal{}, s);
    std::vector<double> pv = two_sided_pvalues(d.x, 1.0);
    std::sort(pv.begin(), pv.end());
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ASSERT_GT(pv[i], 0.0);
        ASSERT_LE(pv[i], 1.0);
        dmax = std::max({dmax, std::abs(pv[i] - double(i) / n), std::abs(pv[i] - double(i + 1) / n)});
    }
    // Asymptotic KS critical value at level 0.01.
    EXPECT_LT(dmax, 1.628 / std::sqrt(double(n)));
}

TEST(Model, FourthMomentsMatch) {
    const ModelParams p = default_params(0.2, 200);
    Stream s(8);
    const std::size_t m = 1000000;
    const Dataset d = sample_dataset(p, m, GaussianSignal{}, s);
    double m2 = 0, m4 = 0, m8 = 0;
    for (double x : d.x) {
        const double x2 = x * x;
        m2 += x2;
        m4 += x2 * x2;
        m8 += x2 * x2 * x2 * x2;
    }
    m2 /= m;
    m4 /= m;
    m8 /= m;
    const double e2 = p.sigma2 + p.p * p.tau2;
    const double e4 = 3.0 * ((1 - p.p) * p.sigma2 * p.sigma2 + p.p * p.alt_var() * p.alt_var());
    const double se2 = std::sqrt((m4 - m2 * m2) / m);
    const double se4 = std::sqrt((m8 - m4 * m4) / m);
    EXPECT_NEAR(m2, e2, 3.0 * se2);
    EXPECT_NEAR(m4, e4, 3.0 * se4);
}

TEST(Model, DistributionIsSymmetric) {
    Stream a(21), b(22);
    const ModelParams p = default_params(0.3, 200);
    const Dataset d1 = sample_dataset(p, 50000, GaussianSignal{}, a);
    Dataset d2 = sample_dataset(p, 50000, GaussianSignal{}, b);
    for (double& x : d2.x) x = -x;
    // Two-sample KS at level 0.01: 1.628 sqrt(2 / n).
    EXPECT_LT(ks_two_sample(d1.x, d2.x), 1.628 * std::sqrt(2.0 / 50000.0));
}

TEST(Model, GammaEffects) {
    const SymmetrizedGamma g = default_symmetrized_gamma(200);
    EXPECT_DOUBLE_EQ(g.shape, 4.0);
    EXPECT_NEAR(g.scale, 2.0 * std::sqrt(2.0 * std::log(200.0)) / (4.0 * std::sqrt(2.0 * M_PI)), 1e-14);
    // Density integrates to one and is even.
    double sum = 0.0;
    const double h = 1e-3;
    for (double x = -40; x <= 40; x += h) sum += symmetrized_gamma_density(x, g) * h;
    EXPECT_NEAR(sum, 1.0, 1e-5);
    EXPECT_DOUBLE_EQ(symmetrized_gamma_density(1.1, g), symmetrized_gamma_density(-1.1, g));

    Stream s(3);
    const Dataset d = sample_dataset({1.0, 1.0, 1.0}, 200000, g, s);
    double mean_abs = 0.0;
    for (double mu : d.mu) mean_abs += std::abs(mu);
    mean_abs /= d.size();
    EXPECT_NEAR(mean_abs, g.shape * g.scale, 4.0 * std::sqrt(g.shape) * g.scale / std::sqrt(200000.0));
}

TEST(Model, SharedNoiseAcrossP) {
    // Same stream, different p: the null observations coincide.
    Stream a(77), b(77);
    const Dataset lo = sample_dataset(default_params(0.05, 200), 200, GaussianSignal{}, a);
    const Dataset hi = sample_dataset(default_params(0.5, 200), 200, GaussianSignal{}, b);
    for (std::size_t i = 0; i < 200; ++i) {
        if (!lo.gamma[i] && !hi.gamma[i]) EXPECT_DOUBLE_EQ(lo.x[i], hi.x[i]);
        if (lo.gamma[i]) EXPECT_TRUE(hi.gamma[i]);
    }
}
