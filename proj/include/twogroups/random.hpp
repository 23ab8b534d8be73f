#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace twogroups {

// A seeded pseudo-random stream. Every stochastic routine takes one of these
// by reference; parallel callers hold disjoint streams.
class Stream {
public:
    explicit Stream(std::uint64_t seed);

    // Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    // Gamma with shape k and scale theta (mean k*theta).
    double gamma(double shape, double scale);
    double beta(double a, double b);
    bool bernoulli(double prob) { return uniform() < prob; }
    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// 64-bit FNV-1a; used for purpose tags and configuration hashes.
std::uint64_t hash_string(std::string_view text);

// Deterministic stream for (master seed, replicate, purpose). The purpose tag
// separates e.g. data generation from MCMC so that which procedures run never
// changes the datasets a replicate sees.
Stream derive_stream(std::uint64_t master_seed, std::uint64_t replicate, std::string_view purpose);

}  // namespace twogroups
