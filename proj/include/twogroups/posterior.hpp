#pragma once

#include <cstddef>
#include <vector>

#include "twogroups/decision.hpp"

namespace twogroups {

struct ChainDiagnostics {
    double accept_rate_tau2 = 0.0;    // after burn-in
    double accept_rate_sigma2 = 0.0;  // after burn-in; 0 when sigma is known
    double proposal_sd_tau2 = 0.0;    // frozen value after tuning
    double proposal_sd_sigma2 = 0.0;
    double mean_log_posterior = 0.0;  // over kept sweeps
    double mean_signal_fraction = 0.0;  // mean of p (SB) or p0 (DPP) over kept sweeps
    double mean_tau2 = 0.0;
    double mean_sigma2 = 0.0;
    std::vector<double> log_posterior_trace;  // one entry per sweep
};

// Output of any posterior sampler: per-hypothesis P(H0i | data).
struct PosteriorSummary {
    std::vector<double> prob_null;
    std::size_t draws_used = 0;
    ChainDiagnostics diagnostics;
};

// Reject H0i iff P(H0i | data) < 0.5 (strict).
DecisionVector posterior_decide(const PosteriorSummary& summary);

}  // namespace twogroups
