#include "twogroups/dpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "twogroups/error.hpp"
#include "twogroups/normal.hpp"

namespace twogroups {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

void adapt(double& log_sd, long& count, bool accepted, double target) {
    ++count;
    log_sd += ((accepted ? 1.0 : 0.0) - target) / std::pow(static_cast<double>(count) + 1.0, 0.6);
    log_sd = std::clamp(log_sd, -8.0, 3.0);
}

}  // namespace

void DppConfig::validate() const {
    if (!(p0_a > 0.0 && p0_b > 0.0)) throw DomainError("DppConfig: Beta prior parameters must be positive");
    if (!(c_shape > 0.0 && c_rate > 0.0)) throw DomainError("DppConfig: Gamma prior parameters must be positive");
    if (!(n_iter > n_burn && n_burn >= 0)) throw DomainError("DppConfig: need n_iter > n_burn >= 0");
    if (sigma2_known && !(*sigma2_known > 0.0)) throw DomainError("DppConfig: known sigma2 must be positive");
    if (fixed_p0 && !(*fixed_p0 >= 0.0 && *fixed_p0 <= 1.0)) throw DomainError("DppConfig: fixed p0 outside [0,1]");
    if (fixed_c && !(*fixed_c > 0.0)) throw DomainError("DppConfig: fixed precision must be positive");
    if (!(proposal_sd > 0.0) || mh_steps < 1) throw DomainError("DppConfig: bad Metropolis settings");
}

int DppState::nonzero_clusters() const {
    return static_cast<int>(std::count_if(counts.begin(), counts.end(), [](int n) { return n > 0; }));
}

bool DppState::partition_valid() const {
    if (mu.size() != label.size() || atoms.size() != counts.size()) return false;
    std::vector<int> tally(counts.size(), 0);
    int zeros = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const int l = label[i];
        if (l < 0) {
            if (mu[i] != 0.0) return false;
            ++zeros;
        } else {
            if (static_cast<std::size_t>(l) >= counts.size()) return false;
            if (mu[i] != atoms[static_cast<std::size_t>(l)] || mu[i] == 0.0) return false;
            ++tally[static_cast<std::size_t>(l)];
        }
    }
    return zeros == zero_count && tally == counts;
}

DppChain::DppChain(std::span<const double> x, const DppConfig& cfg) : x_(x.begin(), x.end()), cfg_(cfg) {
    cfg_.validate();
    const std::size_t m = x_.size();
    if (m < 1) throw DomainError("dpp: need at least one observation");
    order_.resize(m);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return x_[a] < x_[b]; });

    double m2 = 0.0;
    for (double v : x_) m2 += v * v;
    m2 /= static_cast<double>(m);
    if (cfg_.sigma2_known) {
        state_.sigma2 = *cfg_.sigma2_known;
    } else {
        std::vector<double> sq(m);
        for (std::size_t i = 0; i < m; ++i) sq[i] = x_[i] * x_[i];
        std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(m / 2), sq.end());
        const double robust = sq[m / 2] / 0.4549;
        state_.sigma2 = std::max(robust > 0.0 ? std::min(m2, robust) : m2, 1e-8);
    }
    state_.tau2 = std::max(m2 - state_.sigma2, state_.sigma2);
    state_.p0 = cfg_.fixed_p0 ? *cfg_.fixed_p0 : cfg_.p0_a / (cfg_.p0_a + cfg_.p0_b);
    state_.c = cfg_.fixed_c ? *cfg_.fixed_c : cfg_.c_shape / cfg_.c_rate;
    state_.mu.assign(m, 0.0);
    state_.label.assign(m, -1);
    state_.zero_count = static_cast<int>(m);
    log_sd_tau2_ = log_sd_sigma2_ = std::log(cfg_.proposal_sd);
}

void DppChain::reset_acceptance_counters() { accepted_tau2_ = proposed_tau2_ = accepted_sigma2_ = proposed_sigma2_ = 0; }

void DppChain::remove_from_cluster(std::size_t i) {
    const int l = state_.label[i];
    if (l < 0) {
        --state_.zero_count;
    } else if (--state_.counts[static_cast<std::size_t>(l)] == 0) {
        free_slots_.push_back(l);
    }
}

int DppChain::open_cluster(double atom) {
    if (!free_slots_.empty()) {
        const int slot = free_slots_.back();
        free_slots_.pop_back();
        state_.atoms[static_cast<std::size_t>(slot)] = atom;
        state_.counts[static_cast<std::size_t>(slot)] = 0;
        return slot;
    }
    state_.atoms.push_back(atom);
    state_.counts.push_back(0);
    return static_cast<int>(state_.atoms.size() - 1);
}

void DppChain::update_effects(Stream& stream) {
    DppState& s = state_;
    const double v = s.sigma2 + s.tau2;
    const double fresh_mean_factor = s.tau2 / v;
    const double fresh_sd = std::sqrt(s.sigma2 * s.tau2 / v);
    const double log_fresh_base = safe_log(s.c * s.p0);

    for (std::size_t i : order_) {
        remove_from_cluster(i);
        const double xi = x_[i];
        const std::size_t slots = s.atoms.size();
        log_weights_.assign(slots + 2, kNegInf);
        log_weights_[0] = safe_log(s.c * (1.0 - s.p0) + s.zero_count) + log_normal_pdf(xi, s.sigma2);
        log_weights_[1] = log_fresh_base + log_normal_pdf(xi, v);
        for (std::size_t j = 0; j < slots; ++j) {
            if (s.counts[j] > 0) log_weights_[j + 2] = std::log(static_cast<double>(s.counts[j])) + log_normal_pdf(xi - s.atoms[j], s.sigma2);
        }
        const double top = *std::max_element(log_weights_.begin(), log_weights_.end());
        if (!std::isfinite(top)) throw DivergenceError("dpp: no admissible conditional weight");
        double total = 0.0;
        for (double& w : log_weights_) {
            w = std::exp(w - top);
            total += w;
        }
        if (!(total > 0.0) || !std::isfinite(total)) throw DivergenceError("dpp: conditional weights do not normalize");

        double u = stream.uniform() * total;
        std::size_t pick = log_weights_.size() - 1;
        for (std::size_t k = 0; k < log_weights_.size(); ++k) {
            u -= log_weights_[k];
            if (u <= 0.0 && log_weights_[k] > 0.0) {
                pick = k;
                break;
            }
        }
        while (log_weights_[pick] == 0.0) --pick;  // rounding fell off the end

        if (pick == 0) {
            s.label[i] = -1;
            s.mu[i] = 0.0;
            ++s.zero_count;
        } else {
            int slot;
            if (pick == 1) {
                double atom = stream.normal(fresh_mean_factor * xi, fresh_sd);
                while (atom == 0.0) atom = stream.normal(fresh_mean_factor * xi, fresh_sd);
                slot = open_cluster(atom);
            } else {
                slot = static_cast<int>(pick - 2);
            }
            s.label[i] = slot;
            s.mu[i] = s.atoms[static_cast<std::size_t>(slot)];
            ++s.counts[static_cast<std::size_t>(slot)];
        }
    }
}

void DppChain::refresh_atoms(Stream& stream) {
    DppState& s = state_;
    std::vector<double> sums(s.atoms.size(), 0.0);
    for (std::size_t i : order_) {
        if (s.label[i] >= 0) sums[static_cast<std::size_t>(s.label[i])] += x_[i];
    }
    for (std::size_t j = 0; j < s.atoms.size(); ++j) {
        if (s.counts[j] == 0) continue;
        const double denom = s.sigma2 + s.counts[j] * s.tau2;
        double atom = stream.normal(s.tau2 * sums[j] / denom, std::sqrt(s.sigma2 * s.tau2 / denom));
        while (atom == 0.0) atom = stream.normal(s.tau2 * sums[j] / denom, std::sqrt(s.sigma2 * s.tau2 / denom));
        s.atoms[j] = atom;
    }
    for (std::size_t i = 0; i < s.mu.size(); ++i) {
        if (s.label[i] >= 0) s.mu[i] = s.atoms[static_cast<std::size_t>(s.label[i])];
    }
}

double DppChain::draw_p0(Stream& stream) const {
    const double k_plus = state_.nonzero_clusters();
    const double z = state_.zero_count > 0 ? 1.0 : 0.0;
    return stream.beta(cfg_.p0_a + k_plus, cfg_.p0_b + z);
}

void DppChain::update_precision(Stream& stream) {
    DppState& s = state_;
    const double m = static_cast<double>(s.mu.size());
    const double k = s.nonzero_clusters() + (s.zero_count > 0 ? 1.0 : 0.0);
    const double eta = stream.beta(s.c + 1.0, m);
    const double rate = cfg_.c_rate - std::log(eta);
    const double low_shape = cfg_.c_shape + k - 1.0;
    const double odds = low_shape / (m * rate);
    const double high_prob = odds / (1.0 + odds);
    const double shape = (low_shape <= 0.0 || stream.uniform() < high_prob) ? cfg_.c_shape + k : low_shape;
    s.c = std::max(stream.gamma(shape, 1.0 / rate), 1e-300);
}

void DppChain::update_variances(Stream& stream, bool tuning) {
    DppState& s = state_;
    double atom_ss = 0.0;
    double n_atoms = 0.0;
    for (std::size_t j = 0; j < s.atoms.size(); ++j) {
        if (s.counts[j] > 0) {
            atom_ss += s.atoms[j] * s.atoms[j];
            n_atoms += 1.0;
        }
    }
    // The atoms are iid N(0, tau2) draws from the base measure.
    auto tau_target = [&](double t2) {
        return -0.5 * n_atoms * std::log(t2) - 0.5 * atom_ss / t2 - 2.0 * std::log(s.sigma2 + t2) + std::log(t2);
    };
    for (int step = 0; step < cfg_.mh_steps; ++step) {
        const double proposal = s.tau2 * std::exp(std::exp(log_sd_tau2_) * stream.normal());
        const bool accept = std::log(stream.uniform()) < tau_target(proposal) - tau_target(s.tau2);
        if (accept) s.tau2 = proposal;
        if (tuning) adapt(log_sd_tau2_, adapt_count_tau2_, accept, cfg_.target_acceptance);
        ++proposed_tau2_;
        accepted_tau2_ += accept ? 1 : 0;
    }
    if (cfg_.sigma2_known) return;
    double resid_ss = 0.0;
    for (std::size_t i : order_) {
        const double r = x_[i] - s.mu[i];
        resid_ss += r * r;
    }
    const double m = static_cast<double>(x_.size());
    auto sigma_target = [&](double s2) {
        return -0.5 * m * std::log(s2) - 0.5 * resid_ss / s2 - 2.0 * std::log(s2 + s.tau2) + std::log(s2);
    };
    for (int step = 0; step < cfg_.mh_steps; ++step) {
        const double proposal = s.sigma2 * std::exp(std::exp(log_sd_sigma2_) * stream.normal());
        const bool accept = std::log(stream.uniform()) < sigma_target(proposal) - sigma_target(s.sigma2);
        if (accept) s.sigma2 = proposal;
        if (tuning) adapt(log_sd_sigma2_, adapt_count_sigma2_, accept, cfg_.target_acceptance);
        ++proposed_sigma2_;
        accepted_sigma2_ += accept ? 1 : 0;
    }
}

double DppChain::log_posterior() const {
    const DppState& s = state_;
    const double m = static_cast<double>(x_.size());
    double lp = 0.0;
    for (std::size_t i : order_) lp += log_normal_pdf(x_[i] - s.mu[i], s.sigma2);
    double k = 0.0;
    for (std::size_t j = 0; j < s.atoms.size(); ++j) {
        if (s.counts[j] == 0) continue;
        lp += log_normal_pdf(s.atoms[j], s.tau2) + std::lgamma(static_cast<double>(s.counts[j]));
        k += 1.0;
    }
    const double z = s.zero_count > 0 ? 1.0 : 0.0;
    if (z > 0.0) lp += std::lgamma(static_cast<double>(s.zero_count));
    // Urn partition probability and base-measure composition.
    lp += (k + z) * std::log(s.c) + std::lgamma(s.c) - std::lgamma(s.c + m);
    lp += k * safe_log(s.p0) + z * safe_log(1.0 - s.p0);
    lp += (cfg_.p0_a - 1.0) * safe_log(s.p0) + (cfg_.p0_b - 1.0) * std::log1p(-std::min(s.p0, 1.0));
    lp += (cfg_.c_shape - 1.0) * std::log(s.c) - cfg_.c_rate * s.c;
    lp -= 2.0 * std::log(s.sigma2 + s.tau2);
    return lp;
}

void DppChain::sweep(Stream& stream, bool tuning) {
    update_effects(stream);
    refresh_atoms(stream);
    if (!cfg_.fixed_p0) state_.p0 = draw_p0(stream);
    if (!cfg_.fixed_c) update_precision(stream);
    update_variances(stream, tuning);
    if (cfg_.check_partition && !state_.partition_valid()) throw std::logic_error("dpp: partition bookkeeping broken");
}

PosteriorSummary dpp_run(std::span<const double> x, const DppConfig& cfg, Stream& stream) {
    DppChain chain(x, cfg);
    const std::size_t m = x.size();
    std::vector<double> zero_hits(m, 0.0);
    PosteriorSummary summary;
    ChainDiagnostics& diag = summary.diagnostics;
    diag.log_posterior_trace.reserve(static_cast<std::size_t>(cfg.n_iter));
    for (int sweep = 0; sweep < cfg.n_iter; ++sweep) {
        const bool keep = sweep >= cfg.n_burn;
        if (sweep == cfg.n_burn) chain.reset_acceptance_counters();
        chain.sweep(stream, !keep);
        const double lp = chain.log_posterior();
        if (!std::isfinite(lp) && !(cfg.fixed_p0 && (*cfg.fixed_p0 == 0.0 || *cfg.fixed_p0 == 1.0))) {
            throw DivergenceError("dpp: non-finite log posterior");
        }
        diag.log_posterior_trace.push_back(lp);
        if (!keep) continue;
        const DppState& s = chain.state();
        for (std::size_t i = 0; i < m; ++i) zero_hits[i] += s.label[i] < 0 ? 1.0 : 0.0;
        diag.mean_log_posterior += lp;
        diag.mean_signal_fraction += s.p0;
        diag.mean_tau2 += s.tau2;
        diag.mean_sigma2 += s.sigma2;
    }
    const auto kept = static_cast<std::size_t>(cfg.n_iter - cfg.n_burn);
    const double inv = 1.0 / static_cast<double>(kept);
    summary.draws_used = kept;
    summary.prob_null.resize(m);
    for (std::size_t i = 0; i < m; ++i) summary.prob_null[i] = zero_hits[i] * inv;
    diag.mean_log_posterior *= inv;
    diag.mean_signal_fraction *= inv;
    diag.mean_tau2 *= inv;
    diag.mean_sigma2 *= inv;
    diag.accept_rate_tau2 = chain.proposed_tau2() ? static_cast<double>(chain.accepted_tau2()) / chain.proposed_tau2() : 0.0;
    diag.accept_rate_sigma2 = chain.proposed_sigma2() ? static_cast<double>(chain.accepted_sigma2()) / chain.proposed_sigma2() : 0.0;
    diag.proposal_sd_tau2 = chain.proposal_sd_tau2();
    diag.proposal_sd_sigma2 = cfg.sigma2_known ? 0.0 : chain.proposal_sd_sigma2();
    return summary;
}

}  // namespace twogroups
