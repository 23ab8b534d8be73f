#include "twogroups/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "twogroups/bayes.hpp"
#include "twogroups/dpp.hpp"
#include "twogroups/error.hpp"
#include "twogroups/frequentist.hpp"
#include "twogroups/identifiability.hpp"
#include "twogroups/normal.hpp"
#include "twogroups/npbn.hpp"
#include "twogroups/peb.hpp"
#include "twogroups/sb.hpp"

#ifndef TWOGROUPS_VERSION
#define TWOGROUPS_VERSION "0.0.0"
#endif

namespace twogroups {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += format_double(v[i]);
    }
    return out;
}

std::string join_procedures(const std::vector<Procedure>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += procedure_name(v[i]);
    }
    return out;
}

// Grid over the positive half-line for the symmetrized gamma effect law.
struct EffectQuadrature {
    std::vector<double> mu;
    std::vector<double> weight;  // density times Simpson weight; sums to ~1
};

EffectQuadrature gamma_quadrature(const SymmetrizedGamma& g) {
    const double mean = g.shape * g.scale;
    const double sd = std::sqrt(g.shape) * g.scale;
    const double hi = mean + 40.0 * sd;
    constexpr std::size_t n = 20000;  // even number of intervals
    const double h = hi / static_cast<double>(n);
    EffectQuadrature q;
    q.mu.resize(n + 1);
    q.weight.resize(n + 1);
    const double log_norm = -std::lgamma(g.shape) - g.shape * std::log(g.scale);
    for (std::size_t j = 0; j <= n; ++j) {
        const double mu = h * static_cast<double>(j);
        const double dens = mu > 0.0 ? std::exp(log_norm + (g.shape - 1.0) * std::log(mu) - mu / g.scale) : 0.0;
        const double simpson = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        q.mu[j] = mu;
        q.weight[j] = dens * simpson * h / 3.0;
    }
    return q;
}

struct ThresholdRates {
    double t1 = 0.0;
    double t2 = 1.0;
};

// Type I and II error rates of the rule |X| > c for either signal law.
ThresholdRates rates_at(const ModelParams& params, const AltKind& alt, double c) {
    if (std::isinf(c)) return {0.0, 1.0};
    const double sigma = params.sigma();
    ThresholdRates r;
    r.t1 = 2.0 * normal_sf(c / sigma);
    if (const auto* g = std::get_if<SymmetrizedGamma>(&alt)) {
        const EffectQuadrature q = gamma_quadrature(*g);
        double reject = 0.0;
        for (std::size_t j = 0; j < q.mu.size(); ++j) {
            reject += q.weight[j] * (normal_sf((c - q.mu[j]) / sigma) + normal_cdf((-c - q.mu[j]) / sigma));
        }
        r.t2 = 1.0 - reject;
    } else {
        const ErrorRates e = per_test_error_rates(params, c);
        r.t2 = e.t2;
    }
    return r;
}

OracleCharacteristics characteristics_from(const ModelParams& params, const AltKind& alt, std::size_t m, double c) {
    const ThresholdRates r = rates_at(params, alt, c);
    OracleCharacteristics o;
    const double p = params.p;
    o.threshold = c;
    o.t1 = r.t1;
    o.t2 = r.t2;
    o.mp = (1.0 - p) * r.t1 + p * r.t2;
    const double rho = (1.0 - p) * r.t1 + p * (1.0 - r.t2);
    o.power = 1.0 - r.t2;
    if (rho > 0.0) {
        o.bfdr = (1.0 - p) * r.t1 / rho;
        o.fdr = rho >= 1.0 ? o.bfdr : o.bfdr * -std::expm1(static_cast<double>(m) * std::log1p(-rho));
    } else {
        o.bfdr = kNaN;
        o.fdr = 0.0;
    }
    return o;
}

// Likelihood ratio f_A(x) / f_0(x) under symmetrized gamma effects:
// int cosh(x mu / sigma2) exp(-mu^2 / (2 sigma2)) g(mu) dmu, in log space.
double log_gamma_likelihood_ratio(double x, double sigma2, const EffectQuadrature& q) {
    double top = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(q.mu.size());
    for (std::size_t j = 0; j < q.mu.size(); ++j) {
        const double mu = q.mu[j];
        const double a = std::abs(x) * mu / sigma2;
        // log cosh(a) = a + log1p(exp(-2a)) - log 2
        terms[j] = q.weight[j] > 0.0 ? std::log(q.weight[j]) + a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0) -
                                           0.5 * mu * mu / sigma2
                                     : -std::numeric_limits<double>::infinity();
        top = std::max(top, terms[j]);
    }
    double s = 0.0;
    for (double t : terms) s += std::exp(t - top);
    return top + std::log(s);
}

double gamma_oracle_threshold(const ModelParams& params, const SymmetrizedGamma& g) {
    const double p = params.p;
    if (p == 0.0) return std::numeric_limits<double>::infinity();
    if (p == 1.0) return 0.0;
    const EffectQuadrature q = gamma_quadrature(g);
    const double log_odds = std::log1p(-p) - std::log(p);
    auto excess = [&](double x) { return log_gamma_likelihood_ratio(x, params.sigma2, q) - log_odds; };
    if (excess(0.0) >= 0.0) return 0.0;
    double hi = params.sigma();
    while (excess(hi) < 0.0) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double oracle_cutoff(const ModelParams& params, const AltKind& alt) {
    if (const auto* g = std::get_if<SymmetrizedGamma>(&alt)) return gamma_oracle_threshold(params, *g);
    return oracle_threshold(params);
}

DecisionVector cutoff_decide(std::span<const double> x, double c) {
    if (c == 0.0) return DecisionVector(x.size(), true);
    return threshold_decide(x, c);
}

std::optional<double> sigma2_if_known(const ExperimentConfig& cfg) {
    if (cfg.sigma_known) return cfg.sigma * cfg.sigma;
    return std::nullopt;
}

// Estimates shared by a PEB rule and its BH plug-in within one replicate.
struct ReplicateCache {
    std::optional<EstimateSet> profile;
    std::optional<EstimateSet> penalized;
};

DecisionVector decide(Procedure proc, const Dataset& data, const ExperimentConfig& cfg, double p_true,
                      std::size_t replicate, double oracle_c, ReplicateCache& cache) {
    const std::span<const double> x(data.x);
    const double sigma2 = cfg.sigma * cfg.sigma;
    const std::size_t m = x.size();
    auto profile = [&]() -> const EstimateSet& {
        if (!cache.profile) cache.profile = profile_mle(x, sigma2_if_known(cfg));
        return *cache.profile;
    };
    auto penalized = [&]() -> const EstimateSet& {
        if (!cache.penalized) {
            cache.penalized = penalized_mle(x, PriorP{cfg.beta_prior}, sigma2_if_known(cfg), VarianceFit::Moments);
        }
        return *cache.penalized;
    };
    switch (proc) {
        case Procedure::BO:
            return cutoff_decide(x, oracle_c);
        case Procedure::Bonf:
            return bonferroni(two_sided_pvalues(x, cfg.sigma), cfg.alpha);
        case Procedure::BH:
            return bh_step_up(two_sided_pvalues(x, cfg.sigma), {cfg.alpha, static_cast<double>(m)});
        case Procedure::BHmod:
            return bh_step_up(two_sided_pvalues(x, cfg.sigma), {cfg.alpha, modified_bh_denominator(m, p_true)});
        case Procedure::PEB1:
            return peb_decide(x, profile());
        case Procedure::BH1:
            return bh_plugin_decide(x, profile(), cfg.alpha);
        case Procedure::PEB2:
            return peb_decide(x, penalized());
        case Procedure::BH2:
            return bh_plugin_decide(x, penalized(), cfg.alpha);
        case Procedure::SB: {
            SbConfig sb;
            sb.beta = cfg.beta_prior;
            sb.n_iter = cfg.sb_iter;
            sb.n_burn = cfg.sb_burn;
            sb.sigma2_known = sigma2_if_known(cfg);
            Stream stream = derive_stream(cfg.master_seed, replicate, "mcmc:SB");
            return sb_decide(sb_run(x, sb, stream));
        }
        case Procedure::DPP: {
            DppConfig dc;
            dc.p0_b = cfg.beta_prior;
            dc.n_iter = cfg.dpp_iter;
            dc.n_burn = cfg.dpp_burn;
            dc.sigma2_known = sigma2_if_known(cfg);
            Stream stream = derive_stream(cfg.master_seed, replicate, "mcmc:DPP");
            return dpp_decide(dpp_run(x, dc, stream));
        }
        case Procedure::NPBN:
            if (!cfg.sigma_known) throw DomainError("NPBN requires a known sigma");
            return npbn_procedure(x, sigma2);
    }
    throw std::logic_error("unknown procedure");
}

template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                for (std::size_t i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

ResultRow base_row(const ExperimentConfig& cfg, std::string_view proc, double p) {
    ResultRow r;
    r.procedure = std::string(proc);
    r.p_true = p;
    r.sigma_known = cfg.sigma_known;
    r.alt = alt_name(cfg.alt);
    r.seed = cfg.master_seed;
    r.software_version = software_version();
    return r;
}

ResultRow metric_row(const ExperimentConfig& cfg, std::string_view proc, double p, std::string metric,
                     std::optional<double> value, double se, std::size_t reps, std::string note = {}) {
    ResultRow r = base_row(cfg, proc, p);
    r.metric = std::move(metric);
    if (value && std::isfinite(*value)) r.estimate = value;
    r.mc_se = se;
    r.reps_used = reps;
    r.note = std::move(note);
    return r;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

const char* kCsvHeader = "procedure,p_true,sigma_known,alt,metric,estimate,mc_se,reps_used,seed,software_version,note";

}  // namespace

std::string_view procedure_name(Procedure proc) {
    switch (proc) {
        case Procedure::BO: return "BO";
        case Procedure::Bonf: return "Bonf";
        case Procedure::BH: return "BH";
        case Procedure::BHmod: return "BHmod";
        case Procedure::BH1: return "BH1";
        case Procedure::BH2: return "BH2";
        case Procedure::PEB1: return "PEB1";
        case Procedure::PEB2: return "PEB2";
        case Procedure::SB: return "SB";
        case Procedure::DPP: return "DPP";
        case Procedure::NPBN: return "NPBN";
    }
    return "?";
}

std::vector<Procedure> all_procedures() {
    return {Procedure::BO,   Procedure::Bonf, Procedure::BH, Procedure::BHmod, Procedure::BH1, Procedure::BH2,
            Procedure::PEB1, Procedure::PEB2, Procedure::SB, Procedure::DPP,   Procedure::NPBN};
}

std::optional<Procedure> parse_procedure(std::string_view name) {
    for (Procedure p : all_procedures()) {
        if (procedure_name(p) == name) return p;
    }
    return std::nullopt;
}

std::string alt_name(const AltKind& alt) {
    if (const auto* g = std::get_if<SymmetrizedGamma>(&alt)) {
        return "gamma(" + format_double(g->shape) + "," + format_double(g->scale) + ")";
    }
    return "gaussian";
}

std::string software_version() { return std::string("twogroups-") + TWOGROUPS_VERSION; }

double ExperimentConfig::tau2() const {
    if (tau) return *tau * *tau;
    return 2.0 * std::log(static_cast<double>(m)) * sigma * sigma;
}

ModelParams ExperimentConfig::params_at(double p) const { return ModelParams{p, sigma * sigma, tau2()}; }

std::size_t ExperimentConfig::reps_for(Procedure proc) const {
    if (proc == Procedure::SB) return reps_sb;
    if (proc == Procedure::DPP) return reps_dpp;
    return reps;
}

void ExperimentConfig::validate() const {
    if (m < 1) throw DomainError("ExperimentConfig: m must be at least 1");
    if (!(sigma > 0.0)) throw DomainError("ExperimentConfig: sigma must be positive");
    if (tau && !(*tau > 0.0)) throw DomainError("ExperimentConfig: tau must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ExperimentConfig: alpha must lie in (0,1)");
    if (!(beta_prior > 1.0)) throw DomainError("ExperimentConfig: beta must exceed 1");
    for (double p : p_grid) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("ExperimentConfig: p grid outside [0,1]");
    }
    for (Procedure proc : procedures) {
        if (reps_for(proc) < 1) {
            throw DomainError(std::string("ExperimentConfig: no replicates for ") + std::string(procedure_name(proc)));
        }
    }
    if (!(sb_iter > sb_burn && sb_burn >= 0 && dpp_iter > dpp_burn && dpp_burn >= 0)) {
        throw DomainError("ExperimentConfig: MCMC lengths must exceed burn-in");
    }
    if (const auto* g = std::get_if<SymmetrizedGamma>(&alt)) g->validate();
}

std::string ExperimentConfig::setting_text() const {
    std::ostringstream os;
    os << "m=" << m << "\nsigma=" << format_double(sigma) << "\ntau2=" << format_double(tau2())
       << "\nalpha=" << format_double(alpha) << "\nbeta_prior=" << format_double(beta_prior)
       << "\nalt=" << alt_name(alt) << "\np_grid=" << join_doubles(p_grid) << "\n";
    return os.str();
}

std::string ExperimentConfig::run_text() const {
    std::ostringstream os;
    os << setting_text() << "procedures=" << join_procedures(procedures) << "\nsigma_known=" << (sigma_known ? 1 : 0)
       << "\nreps=" << reps << "\nreps_sb=" << reps_sb << "\nreps_dpp=" << reps_dpp << "\nseed=" << master_seed
       << "\nsb_iter=" << sb_iter << "\nsb_burn=" << sb_burn << "\ndpp_iter=" << dpp_iter << "\ndpp_burn=" << dpp_burn
       << "\n";
    return os.str();
}

std::uint64_t ExperimentConfig::setting_hash() const { return hash_string(setting_text()); }
std::uint64_t ExperimentConfig::run_hash() const { return hash_string(run_text()); }

Dataset make_dataset(const ExperimentConfig& cfg, double p, std::size_t replicate) {
    Stream stream = derive_stream(cfg.master_seed, replicate, "data");
    return sample_dataset(cfg.params_at(p), cfg.m, cfg.alt, stream);
}

DecisionVector run_procedure(Procedure proc, const Dataset& data, const ExperimentConfig& cfg, double p_true,
                             std::size_t replicate) {
    ReplicateCache cache;
    const double c = proc == Procedure::BO ? oracle_cutoff(cfg.params_at(p_true), cfg.alt) : 0.0;
    return decide(proc, data, cfg, p_true, replicate, c, cache);
}

std::vector<Cell> run_cells(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<Cell> cells;
    const std::size_t np = cfg.procedures.size();
    for (double p : cfg.p_grid) {
        std::size_t max_reps = 0;
        for (Procedure proc : cfg.procedures) max_reps = std::max(max_reps, cfg.reps_for(proc));
        const bool needs_oracle =
            std::find(cfg.procedures.begin(), cfg.procedures.end(), Procedure::BO) != cfg.procedures.end();
        const double oracle_c = needs_oracle ? oracle_cutoff(cfg.params_at(p), cfg.alt) : 0.0;

        std::vector<std::vector<ConfusionCounts>> counts(np);
        std::vector<std::vector<std::string>> errors(np);
        for (std::size_t k = 0; k < np; ++k) {
            counts[k].resize(cfg.reps_for(cfg.procedures[k]));
            errors[k].resize(cfg.reps_for(cfg.procedures[k]));
        }
        parallel_for(max_reps, cfg.workers, [&](std::size_t r) {
            const Dataset data = make_dataset(cfg, p, r);
            ReplicateCache cache;
            for (std::size_t k = 0; k < np; ++k) {
                if (r >= counts[k].size()) continue;
                try {
                    counts[k][r] = confusion(decide(cfg.procedures[k], data, cfg, p, r, oracle_c, cache), data.gamma);
                } catch (const std::exception& e) {
                    errors[k][r] = e.what();
                    if (errors[k][r].empty()) errors[k][r] = "unknown error";
                }
            }
        });
        for (std::size_t k = 0; k < np; ++k) {
            Cell cell;
            cell.p = p;
            cell.procedure = cfg.procedures[k];
            for (std::size_t r = 0; r < errors[k].size(); ++r) {
                if (!errors[k][r].empty()) {
                    cell.error = "replicate " + std::to_string(r) + ": " + errors[k][r];
                    break;
                }
            }
            if (cell.error.empty()) cell.counts = std::move(counts[k]);
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

OracleCharacteristics oracle_characteristics(const ModelParams& params, const AltKind& alt, std::size_t m) {
    params.validate();
    return characteristics_from(params, alt, m, oracle_cutoff(params, alt));
}

OracleCharacteristics bonferroni_characteristics(const ModelParams& params, const AltKind& alt, std::size_t m,
                                                 double alpha) {
    params.validate();
    const double c = params.sigma() * normal_quantile(1.0 - alpha / (2.0 * static_cast<double>(m)));
    return characteristics_from(params, alt, m, c);
}

std::vector<ResultRow> summarize_cells(const ExperimentConfig& cfg, const std::vector<Cell>& cells) {
    std::vector<ResultRow> rows;
    for (const Cell& cell : cells) {
        const std::string_view name = procedure_name(cell.procedure);
        if (!cell.error.empty()) {
            rows.push_back(metric_row(cfg, name, cell.p, "error", std::nullopt, 0.0, 0, cell.error));
            continue;
        }
        const OracleCharacteristics oracle = oracle_characteristics(cfg.params_at(cell.p), cfg.alt, cfg.m);
        const std::optional<double> oracle_mp = oracle.mp > 0.0 ? std::optional<double>(oracle.mp) : std::nullopt;
        const MetricEstimates est = summarize(cell.counts, oracle_mp);
        rows.push_back(metric_row(cfg, name, cell.p, "fdr", est.fdr.value, est.fdr.se, est.fdr.reps));
        if (est.pfdr) {
            rows.push_back(metric_row(cfg, name, cell.p, "pfdr", est.pfdr->value, est.pfdr->se, est.pfdr->reps));
        } else {
            rows.push_back(metric_row(cfg, name, cell.p, "pfdr", std::nullopt, 0.0, 0, "no replicate rejected"));
        }
        rows.push_back(metric_row(cfg, name, cell.p, "mp", est.mp.value, est.mp.se, est.mp.reps));
        if (est.power) {
            rows.push_back(metric_row(cfg, name, cell.p, "power", est.power->value, est.power->se, est.power->reps));
        } else {
            rows.push_back(metric_row(cfg, name, cell.p, "power", std::nullopt, 0.0, 0, "no replicate had a signal"));
        }
        if (est.efficiency) {
            rows.push_back(metric_row(cfg, name, cell.p, "efficiency", est.efficiency->value, est.efficiency->se,
                                      est.efficiency->reps));
        } else {
            rows.push_back(metric_row(cfg, name, cell.p, "efficiency", std::nullopt, 0.0, 0, "undefined"));
        }
        if (cell.procedure == Procedure::BO || cell.procedure == Procedure::Bonf) {
            const OracleCharacteristics exact = cell.procedure == Procedure::BO
                                                    ? oracle
                                                    : bonferroni_characteristics(cfg.params_at(cell.p), cfg.alt, cfg.m, cfg.alpha);
            rows.push_back(metric_row(cfg, name, cell.p, "mp_exact", exact.mp, 0.0, 0));
            rows.push_back(metric_row(cfg, name, cell.p, "fdr_exact", exact.fdr, 0.0, 0));
            rows.push_back(metric_row(cfg, name, cell.p, "bfdr_exact", exact.bfdr, 0.0, 0,
                                      std::isfinite(exact.bfdr) ? "" : "no rejections"));
            rows.push_back(metric_row(cfg, name, cell.p, "power_exact", exact.power, 0.0, 0));
        }
    }
    return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) { return summarize_cells(cfg, run_cells(cfg)); }

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const ResultRow& r : rows) {
        out += csv_field(r.procedure) + "," + format_double(r.p_true) + "," + (r.sigma_known ? "1" : "0") + "," +
               csv_field(r.alt) + "," + csv_field(r.metric) + "," + (r.estimate ? format_double(*r.estimate) : "NA") +
               "," + format_double(r.mc_se) + "," + std::to_string(r.reps_used) + "," + std::to_string(r.seed) + "," +
               csv_field(r.software_version) + "," + csv_field(r.note) + "\n";
    }
    return out;
}

std::vector<ResultRow> rows_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<ResultRow> rows;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("rows_from_csv: unexpected header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 11) throw std::runtime_error("rows_from_csv: expected 11 fields");
        ResultRow r;
        r.procedure = f[0];
        r.p_true = std::stod(f[1]);
        r.sigma_known = f[2] == "1";
        r.alt = f[3];
        r.metric = f[4];
        if (f[5] != "NA") r.estimate = std::stod(f[5]);
        r.mc_se = std::stod(f[6]);
        r.reps_used = std::stoull(f[7]);
        r.seed = std::stoull(f[8]);
        r.software_version = f[9];
        r.note = f[10];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string manifest_text(const ExperimentConfig& cfg, const std::string& command) {
    std::ostringstream os;
    os << "software_version=" << software_version() << "\ncommand=" << command << "\nrun_hash=" << cfg.run_hash()
       << "\nsetting_hash=" << cfg.setting_hash() << "\nworkers=" << cfg.workers << "\n"
       << cfg.run_text();
    return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::vector<double> evenly_spaced(double lo, double hi, std::size_t n) {
    std::vector<double> out;
    if (n == 0) return out;
    if (n == 1) return {lo};
    for (std::size_t i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

bool is_known_panel(std::string_view panel) {
    for (const char* id : {"1a", "1b", "1c", "1d", "2a", "2b", "2c", "2d", "4a", "4b", "5a", "5b"}) {
        if (panel == id) return true;
    }
    return false;
}

std::vector<double> default_panel_grid(std::string_view panel, std::size_t points) {
    if (!is_known_panel(panel)) throw DomainError("default_panel_grid: unknown panel " + std::string(panel));
    if (panel == "2a" || panel == "2c") return evenly_spaced(0.005, 0.2, points);
    if (panel == "5a") return evenly_spaced(0.005, 0.25, points);
    if (panel == "5b") return evenly_spaced(0.6, 0.99, points);
    return evenly_spaced(0.01, 0.99, points);
}

std::vector<ResultRow> figure_panel(std::string_view panel, const ExperimentConfig& base, std::size_t kl_draws) {
    if (!is_known_panel(panel)) throw DomainError("figure_panel: unknown panel " + std::string(panel));
    ExperimentConfig cfg = base;
    const char family = panel[0];
    const char letter = panel[1];
    std::vector<ResultRow> rows;

    if (family == '5') {
        const bool all_signal = letter == 'a';
        for (std::size_t i = 0; i < cfg.p_grid.size(); ++i) {
            const double p = cfg.p_grid[i];
            const ModelParams m1 = cfg.params_at(p);
            std::string note;
            std::optional<double> centered, uncentered;
            try {
                const ModelParams m2 = all_signal ? all_signal_competitor(m1) : no_signal_competitor(m1);
                Stream stream = derive_stream(cfg.master_seed, i, "kl");
                const KlStats kl = kl_mc(m1, m2, kl_draws, stream);
                centered = wrong_model_prob(kl, cfg.m);
                uncentered = wrong_model_prob_uncentered(kl, cfg.m);
            } catch (const std::exception& e) {
                note = e.what();
            }
            const char* comp = all_signal ? "all_signal" : "no_signal";
            rows.push_back(metric_row(cfg, std::string("normal_approx:") + comp, p, "wrong_model_prob", centered, 0.0,
                                      kl_draws, note));
            rows.push_back(metric_row(cfg, std::string("normal_approx_uncentered:") + comp, p, "wrong_model_prob",
                                      uncentered, 0.0, kl_draws, note));
        }
        return rows;
    }

    std::string metric;
    std::vector<Procedure> simulated;
    bool closed_form_oracle = false, closed_form_bonf = false;
    if (family == '1') {
        cfg.sigma_known = true;
        cfg.alt = GaussianSignal{};
        closed_form_oracle = closed_form_bonf = true;
        simulated = {Procedure::BH, Procedure::BHmod};
        metric = letter == 'a' ? "fdr" : letter == 'b' ? "bfdr" : letter == 'c' ? "power" : "mp";
    } else if (family == '2') {
        cfg.sigma_known = letter == 'a' || letter == 'b';
        cfg.alt = GaussianSignal{};
        simulated = {Procedure::SB, Procedure::PEB1, Procedure::PEB2, Procedure::BH1, Procedure::BH2};
        if (cfg.sigma_known) simulated.push_back(Procedure::NPBN);
        metric = (letter == 'a' || letter == 'c') ? "efficiency" : "power";
    } else {  // 4
        cfg.sigma_known = true;
        if (!std::holds_alternative<SymmetrizedGamma>(cfg.alt)) cfg.alt = default_symmetrized_gamma(cfg.m);
        closed_form_oracle = true;
        simulated = {Procedure::PEB1, Procedure::PEB2, Procedure::BH1, Procedure::BH2, Procedure::NPBN};
        metric = letter == 'a' ? "mp" : "fdr";
    }

    for (double p : cfg.p_grid) {
        auto closed = [&](std::string_view name, const OracleCharacteristics& o) {
            const double v = metric == "fdr" ? o.fdr : metric == "bfdr" ? o.bfdr : metric == "power" ? o.power : o.mp;
            rows.push_back(metric_row(cfg, name, p, metric, v, 0.0, 0, "closed form"));
        };
        if (closed_form_oracle) closed("BO", oracle_characteristics(cfg.params_at(p), cfg.alt, cfg.m));
        if (closed_form_bonf) closed("Bonf", bonferroni_characteristics(cfg.params_at(p), cfg.alt, cfg.m, cfg.alpha));
    }
    cfg.procedures = simulated;
    const std::string wanted = metric == "bfdr" ? "pfdr" : metric;
    for (ResultRow& row : run_experiment(cfg)) {
        if (row.metric == wanted || row.metric == "error") {
            if (metric == "bfdr" && row.metric == "pfdr") {
                row.metric = "bfdr";
                row.note = row.note.empty() ? "pFDR estimate" : row.note;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<double> default_toy_p_values() {
    return {0.015, 0.025, 0.07, 0.06, 0.095, 0.15, 0.485, 0.5, 0.82, 0.73};
}

ToyResult toy_compare(const ExperimentConfig& cfg, const std::vector<double>& p_values) {
    {
        // One dataset per p; replicate counts play no part here.
        ExperimentConfig check = cfg;
        check.reps = check.reps_sb = check.reps_dpp = 1;
        check.validate();
    }
    for (Procedure proc : cfg.procedures) {
        if (proc != Procedure::SB && proc != Procedure::DPP && proc != Procedure::NPBN) {
            throw DomainError("toy_compare: only SB, DPP and NPBN take part");
        }
    }
    const std::size_t n = p_values.size();
    const std::size_t np = cfg.procedures.size();
    std::vector<std::vector<ToyRow>> rows(n);
    std::vector<std::vector<ToyScatterPoint>> scatter(n);
    const double sigma2 = cfg.sigma * cfg.sigma;
    parallel_for(n, cfg.workers, [&](std::size_t d) {
        const double p = p_values[d];
        Stream data_stream = derive_stream(cfg.master_seed, d, "toy-data");
        const Dataset data = sample_dataset(cfg.params_at(p), cfg.m, cfg.alt, data_stream);
        for (std::size_t k = 0; k < np; ++k) {
            const Procedure proc = cfg.procedures[k];
            std::vector<double> prob_null;
            if (proc == Procedure::NPBN) {
                if (!cfg.sigma_known) continue;
                const double p0 = npbn_calibrate_p0(data.x, sigma2, sigma2);
                MixingEstimate est = npbn_recursion(data.x, sigma2, sigma2, p0);
                npbn_symmetrize(est);
                for (double xi : data.x) {
                    const double odds = npbn_odds(xi, est, sigma2);
                    prob_null.push_back(std::isinf(odds) ? 1.0 : odds / (1.0 + odds));
                }
                const DecisionVector dec = npbn_decide(data.x, est, sigma2);
                for (std::size_t i = 0; i < prob_null.size(); ++i) {
                    // degenerate estimates decide without the odds statistic
                    if (dec.reject[i] != (prob_null[i] < 0.5)) prob_null[i] = dec.reject[i] ? 0.0 : 1.0;
                }
            } else if (proc == Procedure::SB) {
                SbConfig sb;
                sb.beta = cfg.beta_prior;
                sb.n_iter = cfg.sb_iter;
                sb.n_burn = cfg.sb_burn;
                sb.sigma2_known = sigma2_if_known(cfg);
                Stream stream = derive_stream(cfg.master_seed, d, "toy-mcmc:SB");
                prob_null = sb_run(data.x, sb, stream).prob_null;
            } else {
                DppConfig dc;
                dc.p0_b = cfg.beta_prior;
                dc.n_iter = cfg.dpp_iter;
                dc.n_burn = cfg.dpp_burn;
                dc.sigma2_known = sigma2_if_known(cfg);
                Stream stream = derive_stream(cfg.master_seed, d, "toy-mcmc:DPP");
                prob_null = dpp_run(data.x, dc, stream).prob_null;
            }
            DecisionVector dec(data.size());
            for (std::size_t i = 0; i < dec.size(); ++i) dec.reject[i] = prob_null[i] < 0.5;
            const ConfusionCounts cc = confusion(dec, data.gamma);
            rows[d].push_back(ToyRow{d, p, std::string(procedure_name(proc)), cfg.sigma_known, cc.m1(), cc.S, cc.V});
            for (std::size_t i = 0; i < data.size(); ++i) {
                scatter[d].push_back(ToyScatterPoint{d, std::string(procedure_name(proc)), data.x[i], prob_null[i],
                                                     static_cast<bool>(data.gamma[i])});
            }
        }
    });
    ToyResult out;
    for (std::size_t d = 0; d < n; ++d) {
        out.rows.insert(out.rows.end(), rows[d].begin(), rows[d].end());
        out.scatter.insert(out.scatter.end(), scatter[d].begin(), scatter[d].end());
    }
    return out;
}

std::string toy_rows_to_csv(const std::vector<ToyRow>& rows) {
    std::string out = "dataset,p,procedure,sigma_known,n_signals,correct,false\n";
    for (const ToyRow& r : rows) {
        out += std::to_string(r.dataset) + "," + format_double(r.p) + "," + r.procedure + "," + (r.sigma_known ? "1" : "0") +
               "," + std::to_string(r.n_signals) + "," + std::to_string(r.correct) + "," +
               std::to_string(r.false_discoveries) + "\n";
    }
    return out;
}

std::string toy_scatter_to_csv(const std::vector<ToyScatterPoint>& points) {
    std::string out = "dataset,procedure,x,prob_null,signal\n";
    for (const ToyScatterPoint& s : points) {
        out += std::to_string(s.dataset) + "," + s.procedure + "," + format_double(s.x) + "," + format_double(s.prob_null) +
               "," + (s.signal ? "1" : "0") + "\n";
    }
    return out;
}

}  // namespace twogroups
