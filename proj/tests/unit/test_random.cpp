#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "twogroups/random.hpp"

using namespace twogroups;

TEST(Random, SameSeedSameSequence) {
    Stream a(42), b(42);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Random, DerivedStreamsDiffer) {
    Stream a = derive_stream(7, 0, "data");
    Stream b = derive_stream(7, 1, "data");
    Stream c = derive_stream(7, 0, "mcmc:SB");
    Stream a2 = derive_stream(7, 0, "data");
    const auto va = a.next_u64();
    EXPECT_NE(va, b.next_u64());
    EXPECT_NE(va, c.next_u64());
    EXPECT_EQ(va, a2.next_u64());
}

TEST(Random, UniformOpenInterval) {
    Stream s(1);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Random, GammaAndBetaMoments) {
    Stream s(3);
    const int n = 200000;
    double g = 0.0, b = 0.0;
    for (int i = 0; i < n; ++i) {
        g += s.gamma(4.0, 0.5);
        b += s.beta(2.0, 5.0);
    }
    // Means 2 and 2/7; sds sqrt(1) and sqrt(10/392).
    EXPECT_NEAR(g / n, 2.0, 4.0 * 1.0 / std::sqrt(n));
    EXPECT_NEAR(b / n, 2.0 / 7.0, 4.0 * std::sqrt(10.0 / 392.0 / n));
}

TEST(Random, HashIsFnv1a) {
    // FNV-1a 64-bit of the empty string and of "a".
    EXPECT_EQ(hash_string(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(hash_string("a"), 0xaf63dc4c8601ec8cULL);
}
