#include "twogroups/peb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "twogroups/bayes.hpp"
#include "twogroups/error.hpp"
#include "twogroups/frequentist.hpp"
#include "twogroups/model.hpp"
#include "twogroups/normal.hpp"

namespace twogroups {

namespace {

constexpr double kSigma2Floor = 1e-8;

double mean_square(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double mean_fourth(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v * v * v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double null_loglik(std::span<const double> x, double sigma2) {
    double total = 0.0;
    for (double v : x) total += log_normal_pdf(v, sigma2);
    return total;
}

struct EStep {
    double loglik = 0.0;
    double sum_r = 0.0;
    double sum_r_x2 = 0.0;
    double sum_x2 = 0.0;
};

// Responsibilities r_i = p phi(x_i; v) / f(x_i) and the log-likelihood, with one
// exp and one log1p per observation.
EStep e_step(std::span<const double> x, double p, double s, double v) {
    EStep out;
    const double log_prior_odds = std::log1p(-p) - std::log(p);
    const double half_log_ratio = 0.5 * std::log(v / s);
    const double curvature = 0.5 * (1.0 / s - 1.0 / v);
    const double log_null_const = std::log1p(-p) - kLogSqrt2Pi - 0.5 * std::log(s);
    for (double xi : x) {
        const double d = xi * xi;
        // a = log(null weight / alt weight) at xi
        const double a = log_prior_odds + half_log_ratio - curvature * d;
        const double e = std::exp(-std::fabs(a));
        double r;
        double softplus;  // log(1 + alt/null)
        if (a >= 0.0) {
            r = e / (1.0 + e);
            softplus = std::log1p(e);
        } else {
            r = 1.0 / (1.0 + e);
            softplus = -a + std::log1p(e);
        }
        out.loglik += log_null_const - d / (2.0 * s) + softplus;
        out.sum_r += r;
        out.sum_r_x2 += r * d;
        out.sum_x2 += d;
    }
    return out;
}

template <typename Objective>
ProfilePoint golden_section_max(Objective&& objective, double a, double b, double tol, ProfilePoint best) {
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    ProfilePoint fc = objective(c);
    ProfilePoint fd = objective(d);
    auto keep = [&best](const ProfilePoint& pt) {
        if (pt.objective > best.objective) best = pt;
    };
    keep(fc);
    keep(fd);
    while (b - a > tol) {
        if (fc.objective >= fd.objective) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = objective(c);
            keep(fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = objective(d);
            keep(fd);
        }
    }
    return best;
}

template <typename Objective>
EstimateSet maximize_over_grid(Objective&& objective, const PGrid& grid) {
    if (!(grid.lo > 0.0 && grid.hi < 1.0 && grid.lo < grid.hi && grid.step > 0.0)) {
        throw DomainError("PGrid: need 0 < lo < hi < 1 and step > 0");
    }
    const auto n = static_cast<std::size_t>(std::llround((grid.hi - grid.lo) / grid.step)) + 1;
    ProfilePoint best;
    best.objective = -std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double p = std::min(grid.lo + static_cast<double>(k) * grid.step, grid.hi);
        ProfilePoint pt = objective(p);
        // >= : on a flat profile the largest p wins.
        if (pt.objective >= best.objective) {
            best = pt;
            best_index = k;
        }
    }

    EstimateSet est;
    est.at_lower_boundary = best_index == 0;
    est.at_upper_boundary = best_index == n - 1;
    if (!est.at_lower_boundary && !est.at_upper_boundary) {
        const double a = std::max(grid.lo, best.p - grid.step);
        const double b = std::min(grid.hi, best.p + grid.step);
        best = golden_section_max(objective, a, b, grid.refine_tol, best);
    }
    est.p_hat = best.p;
    est.tau2_hat = best.tau2;
    est.sigma2_hat = best.sigma2;
    est.objective = best.objective;
    est.tau2_clamped = best.clamped;
    est.converged = best.converged;
    return est;
}

void check_sigma2_known(std::optional<double> sigma2_known) {
    if (sigma2_known && !(*sigma2_known > 0.0)) throw DomainError("known sigma2 must be positive");
}

}  // namespace

void PriorP::validate() const {
    if (!(beta > 1.0)) throw DomainError("PriorP: beta must exceed 1");
}

double PriorP::median() const {
    validate();
    return 1.0 - std::pow(0.5, 1.0 / beta);
}

double PriorP::log_density(double p) const {
    return std::log(beta) + (beta - 1.0) * std::log1p(-p);
}

const char* to_string(EstimationMethod method) {
    switch (method) {
        case EstimationMethod::ProfileMLE: return "ProfileMLE";
        case EstimationMethod::PenalizedEM: return "PenalizedEM";
        case EstimationMethod::PenalizedMoment: return "PenalizedMoment";
    }
    return "?";
}

EmStart em_default_start(std::span<const double> x, std::optional<double> sigma2_known) {
    const double m2 = mean_square(x);
    EmStart start;
    if (sigma2_known) {
        start.sigma2 = *sigma2_known;
    } else {
        std::vector<double> sq(x.size());
        std::transform(x.begin(), x.end(), sq.begin(), [](double v) { return v * v; });
        double med = 0.0;
        if (!sq.empty()) {
            const std::size_t mid = sq.size() / 2;
            std::nth_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(mid), sq.end());
            med = sq[mid];
            if (sq.size() % 2 == 0) {
                med = 0.5 * (med + *std::max_element(sq.begin(), sq.begin() + static_cast<std::ptrdiff_t>(mid)));
            }
        }
        // 0.4549 is the median of a chi-square with one degree of freedom.
        start.sigma2 = std::max(std::min(m2, med / 0.4549), kSigma2Floor);
    }
    start.tau2 = std::max(m2 - start.sigma2, 0.1 * m2);
    return start;
}

EmResult em_fit_given_p(std::span<const double> x, double p, std::optional<double> sigma2_known,
                        const EmOptions& options) {
    return em_fit_given_p(x, p, sigma2_known, em_default_start(x, sigma2_known), options);
}

EmResult em_fit_given_p(std::span<const double> x, double p, std::optional<double> sigma2_known,
                        const EmStart& start, const EmOptions& options) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("em_fit_given_p: p must lie in (0,1)");
    check_sigma2_known(sigma2_known);
    EmResult result;
    const double m2 = mean_square(x);

    if (!sigma2_known && m2 < kSigma2Floor) {
        result.sigma2 = kSigma2Floor;
        result.tau2 = 0.0;
        result.degenerate = true;
        result.converged = true;
        result.loglik = null_loglik(x, kSigma2Floor);
        if (options.record_trace) result.trace.push_back(result.loglik);
        return result;
    }

    double s = sigma2_known ? *sigma2_known : std::max(start.sigma2, kSigma2Floor);
    double v = s + std::max(start.tau2, 0.0);
    double ll_prev = -std::numeric_limits<double>::infinity();
    double best_s = s;
    double best_v = v;
    double best_ll = ll_prev;

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        const EStep es = e_step(x, p, s, v);
        result.iterations = iter;
        if (options.record_trace) result.trace.push_back(es.loglik);
        best_s = s;
        best_v = v;
        best_ll = es.loglik;
        if (es.loglik - ll_prev < options.tolerance) {
            result.converged = true;
            break;
        }
        ll_prev = es.loglik;

        const double n = static_cast<double>(x.size());
        const double sum_r = es.sum_r;
        const double alt_raw = sum_r > 0.0 ? es.sum_r_x2 / sum_r : s;
        if (sigma2_known) {
            v = std::max(alt_raw, s);
        } else {
            const double null_weight = n - sum_r;
            const double null_raw = null_weight > 0.0 ? (es.sum_x2 - es.sum_r_x2) / null_weight : es.sum_x2 / n;
            if (alt_raw >= null_raw) {
                s = std::max(null_raw, kSigma2Floor);
                v = std::max(alt_raw, s);
            } else {
                // Constrained M-step on v >= s: the pooled variance.
                s = std::max(es.sum_x2 / n, kSigma2Floor);
                v = s;
            }
        }
    }

    result.sigma2 = best_s;
    result.tau2 = std::max(best_v - best_s, 0.0);
    result.loglik = best_ll;

    // The boundary tau2 = 0 is a fixed point EM only approaches slowly.
    const double boundary_s = sigma2_known ? *sigma2_known : std::max(m2, kSigma2Floor);
    const double boundary_ll = null_loglik(x, boundary_s);
    if (result.tau2 == 0.0 || boundary_ll >= result.loglik) {
        result.sigma2 = boundary_s;
        result.tau2 = 0.0;
        result.loglik = boundary_ll;
    }
    return result;
}

MomentResult moment_fit_given_p(double m2, double m4, double p, std::optional<double> sigma2_known) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("moment_fit_given_p: p must lie in (0,1)");
    check_sigma2_known(sigma2_known);
    MomentResult out;
    if (sigma2_known) {
        const double s = *sigma2_known;
        out.sigma2 = s;
        const double v2 = (m4 / 3.0 - (1.0 - p) * s * s) / p;
        const double v = v2 > 0.0 ? std::sqrt(v2) : 0.0;
        if (v <= s) {
            out.tau2 = 0.0;
            out.clamped = true;
        } else {
            out.tau2 = v - s;
        }
        return out;
    }

    // Positive root of p v^2 - 2 p m2 v + m2^2 - (1-p) m4 / 3 = 0 in v = sigma2 + tau2.
    const double excess = m4 / 3.0 - m2 * m2;
    if (!(excess > 0.0) || !(m2 > kSigma2Floor)) {
        out.sigma2 = std::max(m2, kSigma2Floor);
        out.tau2 = 0.0;
        out.clamped = true;
        return out;
    }
    double v = m2 + std::sqrt((1.0 - p) / p * excess);
    double s = m2 - std::sqrt(p / (1.0 - p) * excess);
    if (s < kSigma2Floor) {
        s = kSigma2Floor;
        v = (m2 - (1.0 - p) * s) / p;
        out.clamped = true;
    }
    out.sigma2 = s;
    out.tau2 = std::max(v - s, 0.0);
    return out;
}

double mixture_loglik(std::span<const double> x, double p, double sigma2, double tau2) {
    if (tau2 == 0.0) return null_loglik(x, sigma2);
    const double log_w0 = p < 1.0 ? std::log1p(-p) : -INFINITY;
    const double log_w1 = p > 0.0 ? std::log(p) : -INFINITY;
    const double v = sigma2 + tau2;
    double total = 0.0;
    for (double xi : x) total += log_add_exp(log_w0 + log_normal_pdf(xi, sigma2), log_w1 + log_normal_pdf(xi, v));
    return total;
}

ProfilePoint evaluate_profile(std::span<const double> x, double p, std::optional<double> sigma2_known,
                              VarianceFit fit, const PriorP* prior) {
    ProfilePoint pt;
    pt.p = p;
    if (fit == VarianceFit::EM) {
        const EmResult em = em_fit_given_p(x, p, sigma2_known);
        pt.tau2 = em.tau2;
        pt.sigma2 = em.sigma2;
        pt.converged = em.converged;
        pt.clamped = em.degenerate;
    } else {
        const MomentResult mom = moment_fit_given_p(mean_square(x), mean_fourth(x), p, sigma2_known);
        pt.tau2 = mom.tau2;
        pt.sigma2 = mom.sigma2;
        pt.clamped = mom.clamped;
    }
    pt.loglik = mixture_loglik(x, p, pt.sigma2, pt.tau2);
    pt.objective = pt.loglik;
    if (prior) pt.objective += (prior->beta - 1.0) * std::log1p(-p);
    return pt;
}

EstimateSet profile_mle(std::span<const double> x, std::optional<double> sigma2_known, const PGrid& grid) {
    if (x.size() < 2) throw DomainError("profile_mle: need at least two observations");
    check_sigma2_known(sigma2_known);
    EstimateSet est = maximize_over_grid(
        [&](double p) { return evaluate_profile(x, p, sigma2_known, VarianceFit::EM, nullptr); }, grid);
    est.sigma_known = sigma2_known.has_value();
    est.method = EstimationMethod::ProfileMLE;
    return est;
}

EstimateSet penalized_mle(std::span<const double> x, const PriorP& prior, std::optional<double> sigma2_known,
                          VarianceFit fit, const PGrid& grid) {
    if (x.size() < 2) throw DomainError("penalized_mle: need at least two observations");
    prior.validate();
    check_sigma2_known(sigma2_known);
    EstimateSet est = maximize_over_grid(
        [&](double p) { return evaluate_profile(x, p, sigma2_known, fit, &prior); }, grid);
    est.sigma_known = sigma2_known.has_value();
    est.method = fit == VarianceFit::Moments ? EstimationMethod::PenalizedMoment : EstimationMethod::PenalizedEM;
    return est;
}

DecisionVector peb_decide(std::span<const double> x, const EstimateSet& est, const PGrid& grid) {
    const std::size_t m = x.size();
    if (est.p_hat >= grid.hi - 1e-12) return DecisionVector(m, true);
    if (est.p_hat <= grid.lo + 1e-12) return DecisionVector(m);
    if (est.tau2_hat <= 0.0) {
        // Signal and null laws coincide; the Bayes rule follows the prior odds.
        return DecisionVector(m, est.p_hat > 0.5);
    }
    const ModelParams params{est.p_hat, est.sigma2_hat, est.tau2_hat};
    return oracle_decide(x, params);
}

DecisionVector bh_plugin_decide(std::span<const double> x, const EstimateSet& est, double alpha) {
    const std::vector<double> pvalues = two_sided_pvalues(x, std::sqrt(est.sigma2_hat));
    const StepUpConfig cfg{alpha, modified_bh_denominator(x.size(), est.p_hat)};
    return bh_step_up(pvalues, cfg);
}

}  // namespace twogroups
