#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "twogroups/decision.hpp"
#include "twogroups/metrics.hpp"
#include "twogroups/model.hpp"

namespace twogroups {

enum class Procedure { BO, Bonf, BH, BHmod, BH1, BH2, PEB1, PEB2, SB, DPP, NPBN };

std::string_view procedure_name(Procedure proc);
std::optional<Procedure> parse_procedure(std::string_view name);
std::vector<Procedure> all_procedures();

struct ExperimentConfig {
    std::size_t m = 200;
    double sigma = 1.0;
    std::optional<double> tau;  // default sigma sqrt(2 log m)
    double alpha = 0.05;
    double beta_prior = 22.76;
    std::vector<double> p_grid{0.0, 0.025, 0.05, 0.2, 0.5, 0.8};
    std::vector<Procedure> procedures;
    bool sigma_known = true;
    AltKind alt = GaussianSignal{};
    std::size_t reps = 10000;
    std::size_t reps_sb = 3000;
    std::size_t reps_dpp = 0;  // DPP stays out of replicate sweeps unless asked for
    std::uint64_t master_seed = 1;
    std::size_t workers = 1;
    int sb_iter = 5000;
    int sb_burn = 1000;
    int dpp_iter = 4000;
    int dpp_burn = 1000;

    double tau2() const;
    ModelParams params_at(double p) const;
    std::size_t reps_for(Procedure proc) const;
    void validate() const;

    // Text forms of the model setting (m, sigma, tau, alpha, beta, alt, p grid)
    // and of everything that determines the output of a run.
    std::string setting_text() const;
    std::string run_text() const;
    std::uint64_t setting_hash() const;
    std::uint64_t run_hash() const;
};

std::string alt_name(const AltKind& alt);

struct ResultRow {
    std::string procedure;
    double p_true = 0.0;
    bool sigma_known = true;
    std::string alt;
    std::string metric;
    std::optional<double> estimate;  // missing when undefined (e.g. pFDR with no rejections)
    double mc_se = 0.0;
    std::size_t reps_used = 0;
    std::uint64_t seed = 0;
    std::string software_version;
    std::string note;
};

std::string software_version();

// Data for replicate r at signal fraction p. The stream depends only on
// (seed, r), so every p and every procedure list shares the same noise.
Dataset make_dataset(const ExperimentConfig& cfg, double p, std::size_t replicate);

// Decision of one procedure on one dataset; MCMC procedures draw from a
// stream derived from (seed, replicate, procedure name).
DecisionVector run_procedure(Procedure proc, const Dataset& data, const ExperimentConfig& cfg, double p_true,
                             std::size_t replicate);

// Per-replicate confusion counts for each (p, procedure) cell, in the order
// of cfg.p_grid x cfg.procedures. error is set (and counts cleared) when any
// replicate of the cell threw.
struct Cell {
    double p = 0.0;
    Procedure procedure = Procedure::BO;
    std::vector<ConfusionCounts> counts;
    std::string error;
};

std::vector<Cell> run_cells(const ExperimentConfig& cfg);

// Closed-form characteristics of the 0-1 Bayes oracle under the true model,
// including non-Gaussian signal laws.
struct OracleCharacteristics {
    double threshold = 0.0;
    double t1 = 0.0;
    double t2 = 0.0;
    double mp = 0.0;
    double bfdr = 0.0;
    double fdr = 0.0;
    double power = 0.0;
};

OracleCharacteristics oracle_characteristics(const ModelParams& params, const AltKind& alt, std::size_t m);
// Bonferroni at alpha / m, in closed form.
OracleCharacteristics bonferroni_characteristics(const ModelParams& params, const AltKind& alt, std::size_t m,
                                                 double alpha);

std::vector<ResultRow> summarize_cells(const ExperimentConfig& cfg, const std::vector<Cell>& cells);
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// CSV with one header line and one line per row; missing estimates print as NA.
std::string rows_to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> rows_from_csv(const std::string& text);
std::string manifest_text(const ExperimentConfig& cfg, const std::string& command);
// Writes via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::vector<double> evenly_spaced(double lo, double hi, std::size_t n);

// Panels 1a-1d (BO, Bonf, BH, BHmod: FDR, BFDR, power, MP), 2a-2d
// (efficiency and power of the adaptive rules, sigma known then unknown),
// 4a/4b (MP and FDR under symmetrized-gamma effects) and 5a/5b
// (wrong-model probability against the all-signal and no-signal competitors).
bool is_known_panel(std::string_view panel);
// Default p values of a panel: [0.005, 0.2] for the efficiency panels, the
// sparse end [0.005, 0.25] for 5a and the dense end [0.6, 0.99] for 5b (the two
// competitors share the marginal N(0, sigma2 + p tau2), so 5a and 5b are the
// two ends of one curve), and [0.01, 0.99] otherwise.
std::vector<double> default_panel_grid(std::string_view panel, std::size_t points);
std::vector<ResultRow> figure_panel(std::string_view panel, const ExperimentConfig& base, std::size_t kl_draws = 200000);

// Table-4-style comparison on regenerated toy datasets.
struct ToyRow {
    std::size_t dataset = 0;
    double p = 0.0;
    std::string procedure;
    bool sigma_known = true;
    std::size_t n_signals = 0;
    std::size_t correct = 0;
    std::size_t false_discoveries = 0;
};

struct ToyScatterPoint {
    std::size_t dataset = 0;
    std::string procedure;
    double x = 0.0;
    double prob_null = 0.0;
    bool signal = false;
};

struct ToyResult {
    std::vector<ToyRow> rows;
    std::vector<ToyScatterPoint> scatter;
};

// Signal fractions whose expected counts at m = 200 match the ten toy datasets.
std::vector<double> default_toy_p_values();

ToyResult toy_compare(const ExperimentConfig& cfg, const std::vector<double>& p_values);
std::string toy_rows_to_csv(const std::vector<ToyRow>& rows);
std::string toy_scatter_to_csv(const std::vector<ToyScatterPoint>& points);

}  // namespace twogroups
