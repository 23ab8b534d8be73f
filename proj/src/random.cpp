#include "twogroups/random.hpp"

#include "twogroups/error.hpp"

namespace twogroups {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

Stream::Stream(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    engine_.seed(seq);
}

double Stream::uniform() {
    // 53 random bits, shifted off zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() { return normal_(engine_); }

double Stream::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw DomainError("gamma: shape and scale must be positive");
    std::gamma_distribution<double> dist(shape, scale);
    return dist(engine_);
}

double Stream::beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta: parameters must be positive");
    const double x = gamma(a, 1.0);
    const double y = gamma(b, 1.0);
    return x / (x + y);
}

std::uint64_t hash_string(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Stream derive_stream(std::uint64_t master_seed, std::uint64_t replicate, std::string_view purpose) {
    std::uint64_t s = splitmix64(master_seed);
    s = splitmix64(s ^ splitmix64(replicate + 0x632be59bd9b4e019ULL));
    s = splitmix64(s ^ hash_string(purpose));
    return Stream(s);
}

}  // namespace twogroups
