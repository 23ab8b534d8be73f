#pragma once

#include <optional>
#include <span>
#include <vector>

#include "twogroups/decision.hpp"

namespace twogroups {

// Prior f(p) = beta (1 - p)^(beta - 1), i.e. Beta(1, beta).
struct PriorP {
    double beta = 22.76;
    void validate() const;
    double median() const;
    double log_density(double p) const;
};

enum class EstimationMethod { ProfileMLE, PenalizedEM, PenalizedMoment };
enum class VarianceFit { EM, Moments };

const char* to_string(EstimationMethod method);

struct EmOptions {
    double tolerance = 1e-8;  // stop when the log-likelihood gain drops below this
    int max_iterations = 500;
    bool record_trace = false;
};

struct EmResult {
    double tau2 = 0.0;
    double sigma2 = 1.0;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;  // sigma2 hit its floor
    std::vector<double> trace;  // log-likelihood after each iteration, when requested
};

struct EmStart {
    double sigma2 = 1.0;
    double tau2 = 1.0;
};

// sigma2_0 = min(m2, median(x^2) / 0.4549), tau2_0 = max(m2 - sigma2_0, 0.1 m2).
EmStart em_default_start(std::span<const double> x, std::optional<double> sigma2_known);

// EM for the zero-mean scale mixture with weight p held fixed. When sigma2 is
// known only tau2 moves. tau2 is constrained to be nonnegative; when the
// boundary tau2 = 0 beats the EM limit it is returned exactly.
EmResult em_fit_given_p(std::span<const double> x, double p, std::optional<double> sigma2_known,
                        const EmOptions& options = {});
EmResult em_fit_given_p(std::span<const double> x, double p, std::optional<double> sigma2_known,
                        const EmStart& start, const EmOptions& options = {});

struct MomentResult {
    double tau2 = 0.0;
    double sigma2 = 1.0;
    bool clamped = false;  // no admissible root; tau2 (or sigma2) pulled to its bound
};

// Solves m2 = sigma2 + p tau2 and m4 = 3[(1-p) sigma2^2 + p (sigma2 + tau2)^2]
// (the fourth-moment equation alone when sigma2 is known).
MomentResult moment_fit_given_p(double m2, double m4, double p, std::optional<double> sigma2_known);

// Log-likelihood of the mixture; tau2 = 0 is allowed and gives the null fit.
double mixture_loglik(std::span<const double> x, double p, double sigma2, double tau2);

struct PGrid {
    double lo = 0.001;
    double hi = 0.999;
    double step = 0.002;
    double refine_tol = 1e-4;
};

struct EstimateSet {
    double p_hat = 0.0;
    double tau2_hat = 0.0;
    double sigma2_hat = 1.0;
    bool sigma_known = true;
    EstimationMethod method = EstimationMethod::ProfileMLE;
    double objective = 0.0;
    bool at_lower_boundary = false;
    bool at_upper_boundary = false;
    bool tau2_clamped = false;
    bool converged = true;
};

struct ProfilePoint {
    double p = 0.0;
    double objective = 0.0;
    double loglik = 0.0;
    double tau2 = 0.0;
    double sigma2 = 1.0;
    bool clamped = false;
    bool converged = true;
};

// Objective at one p: log L(p, tau2(p), sigma2(p)) plus, when a prior is
// given, the log prior (beta - 1) log(1 - p).
ProfilePoint evaluate_profile(std::span<const double> x, double p, std::optional<double> sigma2_known,
                              VarianceFit fit, const PriorP* prior);

// PEB1: maximizes the profile likelihood in p over the grid, then golden-section
// refinement around an interior grid maximum. Ties go to the larger p.
EstimateSet profile_mle(std::span<const double> x, std::optional<double> sigma2_known, const PGrid& grid = {});

// PEB2 (fit = Moments) or its EM variant: maximizes the log posterior of p.
EstimateSet penalized_mle(std::span<const double> x, const PriorP& prior, std::optional<double> sigma2_known,
                          VarianceFit fit, const PGrid& grid = {});

// Plugs the estimates into the 0-1 oracle. p_hat at the upper grid edge rejects
// all; p_hat at or below the lower edge rejects none.
DecisionVector peb_decide(std::span<const double> x, const EstimateSet& est, const PGrid& grid = {});

// Modified BH with m_eff = m (1 - p_hat) on p-values from sigma2_hat.
DecisionVector bh_plugin_decide(std::span<const double> x, const EstimateSet& est, double alpha);

}  // namespace twogroups
