#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "twogroups/posterior.hpp"
#include "twogroups/random.hpp"

namespace twogroups {

// Dirichlet process prior on the effects with base measure
// (1 - p0) delta_0 + p0 N(0, tau2); p0 ~ Beta(p0_a, p0_b), c ~ Gamma(c_shape, rate c_rate),
// and the joint variance prior (sigma2 + tau2)^-2.
struct DppConfig {
    double p0_a = 1.0;
    double p0_b = 22.76;
    double c_shape = 1.0;
    double c_rate = 1.0;
    int n_iter = 4000;
    int n_burn = 1000;
    std::optional<double> sigma2_known;
    double proposal_sd = 0.5;
    int mh_steps = 3;
    double target_acceptance = 0.35;
    std::optional<double> fixed_p0;  // hold p0 at this value instead of sampling it
    std::optional<double> fixed_c;   // hold the precision at this value
    bool check_partition = true;     // verify the cluster bookkeeping after every sweep
    void validate() const;
};

// Current state of the urn. Cluster label -1 is the zero cluster; other labels
// index atoms/counts and a slot with count 0 is free.
struct DppState {
    std::vector<double> mu;
    std::vector<int> label;
    std::vector<double> atoms;
    std::vector<int> counts;
    int zero_count = 0;
    double p0 = 0.0;
    double c = 1.0;
    double tau2 = 1.0;
    double sigma2 = 1.0;

    int nonzero_clusters() const;
    // Labels, counts and mu agree; the zero cluster has mu exactly 0.
    bool partition_valid() const;
};

class DppChain {
public:
    DppChain(std::span<const double> x, const DppConfig& cfg);

    const DppState& state() const { return state_; }
    DppState& mutable_state() { return state_; }

    // One full sweep: effects, atoms, p0, c, variances. tuning enables
    // Robbins-Monro adaptation of the Metropolis scales.
    void sweep(Stream& stream, bool tuning);

    void update_effects(Stream& stream);
    void refresh_atoms(Stream& stream);
    double draw_p0(Stream& stream) const;  // Beta(p0_a + k+, p0_b + z) given the partition
    void update_precision(Stream& stream);
    void update_variances(Stream& stream, bool tuning);

    double log_posterior() const;
    long accepted_tau2() const { return accepted_tau2_; }
    long proposed_tau2() const { return proposed_tau2_; }
    long accepted_sigma2() const { return accepted_sigma2_; }
    long proposed_sigma2() const { return proposed_sigma2_; }
    double proposal_sd_tau2() const { return std::exp(log_sd_tau2_); }
    double proposal_sd_sigma2() const { return std::exp(log_sd_sigma2_); }
    void reset_acceptance_counters();

private:
    void remove_from_cluster(std::size_t i);
    int open_cluster(double atom);

    std::vector<double> x_;
    std::vector<std::size_t> order_;
    DppConfig cfg_;
    DppState state_;
    std::vector<int> free_slots_;
    std::vector<double> log_weights_;
    double log_sd_tau2_ = 0.0;
    double log_sd_sigma2_ = 0.0;
    long adapt_count_tau2_ = 0;
    long adapt_count_sigma2_ = 0;
    long accepted_tau2_ = 0, proposed_tau2_ = 0, accepted_sigma2_ = 0, proposed_sigma2_ = 0;
};

// prob_null[i] is the fraction of kept sweeps with mu_i = 0.
PosteriorSummary dpp_run(std::span<const double> x, const DppConfig& cfg, Stream& stream);

inline DecisionVector dpp_decide(const PosteriorSummary& summary) { return posterior_decide(summary); }

}  // namespace twogroups
