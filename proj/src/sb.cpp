#include "twogroups/sb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "twogroups/error.hpp"
#include "twogroups/normal.hpp"

namespace twogroups {

namespace {

// Gaussian log-likelihood of n zero-mean points with sum of squares ss, constants dropped.
double gauss_ll(double n, double ss, double var) { return -0.5 * n * std::log(var) - 0.5 * ss / var; }

// log pi(tau2 | sigma2) = log sigma2 - 2 log(sigma2 + tau2)
double log_tau2_prior(double tau2, double sigma2) { return std::log(sigma2) - 2.0 * std::log(sigma2 + tau2); }

class RobbinsMonro {
public:
    explicit RobbinsMonro(double sd, double target) : log_sd_(std::log(sd)), target_(target) {}
    double sd() const { return std::exp(log_sd_); }
    void adapt(bool accepted) {
        ++count_;
        log_sd_ += ((accepted ? 1.0 : 0.0) - target_) / std::pow(static_cast<double>(count_) + 1.0, 0.6);
        log_sd_ = std::clamp(log_sd_, -8.0, 3.0);
    }

private:
    double log_sd_;
    double target_;
    long count_ = 0;
};

}  // namespace

void SbConfig::validate() const {
    if (!(beta > 1.0)) throw DomainError("SbConfig: beta must exceed 1");
    if (!(n_iter > n_burn && n_burn >= 0)) throw DomainError("SbConfig: need n_iter > n_burn >= 0");
    if (sigma2_known && !(*sigma2_known > 0.0)) throw DomainError("SbConfig: known sigma2 must be positive");
    if (!(proposal_sd > 0.0) || mh_steps < 1) throw DomainError("SbConfig: bad Metropolis settings");
}

DecisionVector posterior_decide(const PosteriorSummary& summary) {
    DecisionVector out(summary.prob_null.size());
    for (std::size_t i = 0; i < out.size(); ++i) out.reject[i] = summary.prob_null[i] < 0.5;
    return out;
}

double sb_draw_p(std::size_t signals, std::size_t m, double beta, Stream& stream) {
    return stream.beta(1.0 + static_cast<double>(signals), beta + static_cast<double>(m - signals));
}

PosteriorSummary sb_run(std::span<const double> x, const SbConfig& cfg, Stream& stream) {
    cfg.validate();
    const std::size_t m = x.size();
    if (m < 1) throw DomainError("sb_run: need at least one observation");

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> x2(m);
    for (std::size_t k = 0; k < m; ++k) x2[k] = x[order[k]] * x[order[k]];

    const bool sigma_known = cfg.sigma2_known.has_value();
    double m2 = 0.0;
    for (double v : x2) m2 += v;
    m2 /= static_cast<double>(m);

    double sigma2 = sigma_known ? *cfg.sigma2_known : std::max(m2, 1e-8);
    if (!sigma_known) {
        std::vector<double> sorted = x2;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m / 2), sorted.end());
        const double robust = sorted[m / 2] / 0.4549;
        if (robust > 0.0) sigma2 = std::min(sigma2, robust);
    }
    double tau2 = std::max(m2 - sigma2, sigma2);
    double p = 1.0 / (1.0 + cfg.beta);

    std::vector<char> gamma(m, 0);
    std::vector<double> null_sum(m, 0.0);
    RobbinsMonro tune_tau(cfg.proposal_sd, cfg.target_acceptance);
    RobbinsMonro tune_sigma(cfg.proposal_sd, cfg.target_acceptance);
    long accepted_tau = 0, accepted_sigma = 0, proposed_tau = 0, proposed_sigma = 0;

    PosteriorSummary summary;
    ChainDiagnostics& diag = summary.diagnostics;
    diag.log_posterior_trace.reserve(static_cast<std::size_t>(cfg.n_iter));
    const double md = static_cast<double>(m);

    for (int sweep = 0; sweep < cfg.n_iter; ++sweep) {
        const bool keep = sweep >= cfg.n_burn;
        const bool tuning = !keep;

        // (a) indicators
        const double v = sigma2 + tau2;
        const double base = std::log(p) - std::log1p(-p) + 0.5 * std::log(sigma2 / v);
        const double curvature = 0.5 * (1.0 / sigma2 - 1.0 / v);
        double n1 = 0.0, ss1 = 0.0, ss0 = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double log_odds_alt = base + curvature * x2[k];
            const double prob_null = 1.0 / (1.0 + std::exp(log_odds_alt));
            if (keep) null_sum[k] += prob_null;
            const bool signal = stream.uniform() >= prob_null;
            gamma[k] = signal ? 1 : 0;
            if (signal) {
                n1 += 1.0;
                ss1 += x2[k];
            } else {
                ss0 += x2[k];
            }
        }
        const double n0 = md - n1;

        // (b) signal fraction
        p = sb_draw_p(static_cast<std::size_t>(n1), m, cfg.beta, stream);
        p = std::clamp(p, 1e-300, 1.0 - 1e-16);

        // (c) variances, random walk on the log scale
        auto tau_target = [&](double t2) { return gauss_ll(n1, ss1, sigma2 + t2) + log_tau2_prior(t2, sigma2) + std::log(t2); };
        for (int s = 0; s < cfg.mh_steps; ++s) {
            const double proposal = tau2 * std::exp(tune_tau.sd() * stream.normal());
            const double log_ratio = tau_target(proposal) - tau_target(tau2);
            const bool accept = std::log(stream.uniform()) < log_ratio;
            if (accept) tau2 = proposal;
            if (tuning) tune_tau.adapt(accept);
            else {
                ++proposed_tau;
                accepted_tau += accept ? 1 : 0;
            }
        }
        if (!sigma_known) {
            // pi(sigma2) = 1/sigma2 cancels the log-scale Jacobian.
            auto sigma_target = [&](double s2) {
                return gauss_ll(n0, ss0, s2) + gauss_ll(n1, ss1, s2 + tau2) + log_tau2_prior(tau2, s2);
            };
            for (int s = 0; s < cfg.mh_steps; ++s) {
                const double proposal = sigma2 * std::exp(tune_sigma.sd() * stream.normal());
                const double log_ratio = sigma_target(proposal) - sigma_target(sigma2);
                const bool accept = std::log(stream.uniform()) < log_ratio;
                if (accept) sigma2 = proposal;
                if (tuning) tune_sigma.adapt(accept);
                else {
                    ++proposed_sigma;
                    accepted_sigma += accept ? 1 : 0;
                }
            }
        }

        double log_post = gauss_ll(n0, ss0, sigma2) + gauss_ll(n1, ss1, sigma2 + tau2) - 0.5 * md * std::log(2.0 * std::numbers::pi) +
                          n1 * std::log(p) + n0 * std::log1p(-p) + std::log(cfg.beta) + (cfg.beta - 1.0) * std::log1p(-p) +
                          log_tau2_prior(tau2, sigma2);
        if (!sigma_known) log_post -= std::log(sigma2);
        if (!std::isfinite(log_post)) throw DivergenceError("sb_run: non-finite log posterior");
        diag.log_posterior_trace.push_back(log_post);
        if (keep) {
            diag.mean_log_posterior += log_post;
            diag.mean_signal_fraction += p;
            diag.mean_tau2 += tau2;
            diag.mean_sigma2 += sigma2;
        }
    }

    const auto kept = static_cast<std::size_t>(cfg.n_iter - cfg.n_burn);
    const double inv = 1.0 / static_cast<double>(kept);
    summary.draws_used = kept;
    summary.prob_null.assign(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) summary.prob_null[order[k]] = null_sum[k] * inv;
    diag.mean_log_posterior *= inv;
    diag.mean_signal_fraction *= inv;
    diag.mean_tau2 *= inv;
    diag.mean_sigma2 *= inv;
    diag.accept_rate_tau2 = proposed_tau ? static_cast<double>(accepted_tau) / static_cast<double>(proposed_tau) : 0.0;
    diag.accept_rate_sigma2 =
        proposed_sigma ? static_cast<double>(accepted_sigma) / static_cast<double>(proposed_sigma) : 0.0;
    diag.proposal_sd_tau2 = tune_tau.sd();
    diag.proposal_sd_sigma2 = sigma_known ? 0.0 : tune_sigma.sd();
    return summary;
}

}  // namespace twogroups
