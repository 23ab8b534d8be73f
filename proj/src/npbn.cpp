#include "twogroups/npbn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "twogroups/error.hpp"
#include "twogroups/normal.hpp"

namespace twogroups {

namespace {

// out[j] = exp(-(x - g_j)^2 / (2 sigma2) + shift) on a uniform grid, with shift
// chosen so the largest entry is 1. Walks outward from the nearest grid point
// using multiplicative recurrences, re-anchored with an exact exp every 64 steps.
double kernel_row(const std::vector<double>& grid, double x, double sigma2, std::vector<double>& out) {
    const std::size_t n = grid.size();
    out.assign(n, 0.0);
    const double h = grid[1] - grid[0];
    const double inv2s = 0.5 / sigma2;
    const double pos = (x - grid[0]) / h;
    const auto j0 = static_cast<std::size_t>(std::clamp(std::lround(pos), 0L, static_cast<long>(n - 1)));
    const double d0 = grid[j0] - x;
    const double shift = d0 * d0 * inv2s;
    const double q = std::exp(-2.0 * h * h * inv2s);
    constexpr double kTiny = 1e-300;
    constexpr std::size_t kAnchor = 64;

    out[j0] = 1.0;
    double k = 1.0;
    double r = 0.0;
    for (std::size_t j = j0 + 1; j < n; ++j) {
        const std::size_t step = j - j0;
        if (step % kAnchor == 1) {
            const double dp = grid[j - 1] - x;
            k = std::exp(-dp * dp * inv2s + shift);
            r = std::exp(-(2.0 * dp * h + h * h) * inv2s);
        }
        k *= r;
        r *= q;
        if (k < kTiny) break;
        out[j] = k;
    }
    for (std::size_t j = j0; j-- > 0;) {
        const std::size_t step = j0 - j;
        if (step % kAnchor == 1) {
            const double dp = grid[j + 1] - x;
            k = std::exp(-dp * dp * inv2s + shift);
            r = std::exp((2.0 * dp * h - h * h) * inv2s);
        }
        k *= r;
        r *= q;
        if (k < kTiny) break;
        out[j] = k;
    }
    return shift;
}

std::vector<double>& scratch() {
    thread_local std::vector<double> buffer;
    return buffer;
}

}  // namespace

double MixingEstimate::signal_mass() const {
    double s = 0.0;
    for (std::size_t j = 0; j < density.size(); ++j) s += density[j] * quad_weights[j];
    return s;
}

std::vector<double> MixingEstimate::normalized_density() const {
    const double mass = signal_mass();
    std::vector<double> out(density.size(), 0.0);
    if (mass > 0.0) {
        for (std::size_t j = 0; j < density.size(); ++j) out[j] = density[j] / mass;
    }
    return out;
}

double npbn_calibrate_p0(std::span<const double> x, double sigma2, double tau2) {
    if (!(sigma2 > 0.0 && tau2 > 0.0)) throw DomainError("npbn_calibrate_p0: variances must be positive");
    if (x.empty()) return 0.0;
    const double v = sigma2 + tau2;
    const double crossover2 = 2.0 * sigma2 * v / tau2 * 0.5 * std::log(v / sigma2);
    std::size_t above = 0;
    for (double xi : x) above += (xi * xi > crossover2) ? 1 : 0;
    return static_cast<double>(above) / static_cast<double>(x.size());
}

double npbn_half_width(std::span<const double> x, double sigma2, double tau2) {
    double max_abs = 0.0;
    for (double xi : x) max_abs = std::max(max_abs, std::abs(xi));
    return std::max(6.0 * std::sqrt(sigma2 + tau2), max_abs + 4.0 * std::sqrt(sigma2));
}

MixingEstimate npbn_initial(std::span<const double> x, double sigma2, double tau2, double p0, const NpbnGridSpec& spec) {
    if (!(sigma2 > 0.0 && tau2 > 0.0)) throw DomainError("npbn: variances must be positive");
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw DomainError("npbn: p0 outside [0,1]");
    if (spec.points < 3) throw DomainError("npbn: grid needs at least 3 points");
    const double K = spec.half_width ? *spec.half_width : npbn_half_width(x, sigma2, tau2);
    if (!(K > 0.0)) throw DomainError("npbn: grid half-width must be positive");

    MixingEstimate est;
    const std::size_t n = spec.points;
    const double h = 2.0 * K / static_cast<double>(n - 1);
    est.grid.resize(n);
    est.quad_weights.assign(n, h);
    est.quad_weights.front() = est.quad_weights.back() = 0.5 * h;
    est.density.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        est.grid[j] = -K + h * static_cast<double>(j);
        est.density[j] = normal_pdf(est.grid[j], tau2);
    }
    const double raw = est.signal_mass();
    for (double& d : est.density) d *= p0 / raw;
    est.atom0_mass = 1.0 - p0;
    return est;
}

double npbn_step(MixingEstimate& est, double x, double weight, double sigma2) {
    std::vector<double>& k = scratch();
    const double shift = kernel_row(est.grid, x, sigma2, k);
    const double atom_kernel = std::exp(-0.5 * x * x / sigma2 + shift);
    double slab_part = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) slab_part += est.quad_weights[j] * est.density[j] * k[j];
    const double z = est.atom0_mass * atom_kernel + slab_part;
    if (!(z > 0.0) || !std::isfinite(z)) throw DivergenceError("npbn: recursion normalizer vanished");

    const double keep = 1.0 - weight;
    const double gain = weight / z;
    const double new_atom = keep * est.atom0_mass + gain * est.atom0_mass * atom_kernel;
    double slab_mass = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
        est.density[j] *= keep + gain * k[j];
        slab_mass += est.quad_weights[j] * est.density[j];
    }
    const double defect = std::abs(new_atom + slab_mass - 1.0);
    if (slab_mass > 1.0) {
        for (double& d : est.density) d /= slab_mass;
        slab_mass = 1.0;
    }
    est.atom0_mass = 1.0 - slab_mass;
    return defect;
}

MixingEstimate npbn_recursion(std::span<const double> x, double sigma2, double tau2, double p0, const NpbnGridSpec& grid,
                              FeedOrder order, std::vector<double>* mass_defects) {
    MixingEstimate est = npbn_initial(x, sigma2, tau2, p0, grid);
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (order == FeedOrder::AscendingMagnitude) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(x[a]) < std::abs(x[b]); });
    }
    if (mass_defects) mass_defects->clear();
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double w = 1.0 / (static_cast<double>(i + 1) + 1.0);
        const double defect = npbn_step(est, x[idx[i]], w, sigma2);
        if (mass_defects) mass_defects->push_back(defect);
    }
    return est;
}

double npbn_odds(double x, const MixingEstimate& est, double sigma2) {
    std::vector<double>& k = scratch();
    const double shift = kernel_row(est.grid, x, sigma2, k);
    double slab_part = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) slab_part += est.quad_weights[j] * est.density[j] * k[j];
    const double atom_part = est.atom0_mass * std::exp(-0.5 * x * x / sigma2 + shift);
    if (slab_part <= 0.0) return std::numeric_limits<double>::infinity();
    return atom_part / slab_part;
}

DecisionVector npbn_decide(std::span<const double> x, const MixingEstimate& est, double sigma2) {
    if (!(sigma2 > 0.0)) throw DomainError("npbn_decide: sigma2 must be positive");
    const double pm = 1.0 - est.atom0_mass;
    if (pm <= 0.0) return DecisionVector(x.size(), false);
    if (est.atom0_mass <= 0.0) return DecisionVector(x.size(), true);
    DecisionVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.reject[i] = npbn_odds(x[i], est, sigma2) < 1.0;
    return out;
}

void npbn_symmetrize(MixingEstimate& est) {
    auto& f = est.density;
    const std::size_t n = f.size();
    for (std::size_t i = 0, j = n - 1; i < j; ++i, --j) {
        const double avg = 0.5 * (f[i] + f[j]);
        f[i] = avg;
        f[j] = avg;
    }
}

DecisionVector npbn_procedure(std::span<const double> x, double sigma2, std::optional<double> tau2, const NpbnGridSpec& grid) {
    const double t2 = tau2.value_or(sigma2);
    const double p0 = npbn_calibrate_p0(x, sigma2, t2);
    MixingEstimate est = npbn_recursion(x, sigma2, t2, p0, grid);
    npbn_symmetrize(est);
    return npbn_decide(x, est, sigma2);
}

}  // namespace twogroups
