#pragma once

#include <cmath>
#include <numbers>

namespace twogroups {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736406;

// Density of N(0, var) at x.
inline double normal_pdf(double x, double var) {
    return kInvSqrt2Pi / std::sqrt(var) * std::exp(-0.5 * x * x / var);
}

inline double log_normal_pdf(double x, double var) {
    return -kLogSqrt2Pi - 0.5 * std::log(var) - 0.5 * x * x / var;
}

// Standard normal lower tail Phi(z).
inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Standard normal upper tail 1 - Phi(z), accurate deep into the tail.
inline double normal_sf(double z) {
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

// Inverse of normal_cdf. Accurate to a few ulps over (0, 1).
double normal_quantile(double prob);

// log(exp(a) + exp(b)) without overflow; either argument may be -inf.
inline double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -INFINITY) return a;
    return a + std::log1p(std::exp(b - a));
}

}  // namespace twogroups
