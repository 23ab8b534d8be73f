#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "twogroups/acceptance.hpp"
#include "twogroups/fixtures.hpp"
#include "twogroups/harness.hpp"
#include "twogroups/identifiability.hpp"
#include "twogroups/random.hpp"

using namespace twogroups;

namespace {

struct CommonFlags {
    std::uint64_t seed = 0;
    std::string out = "out";
    std::size_t m = 200;
    double sigma = 1.0;
    double tau = 0.0;  // 0 means sigma sqrt(2 log m)
    double alpha = 0.05;
    double beta = 22.76;
    std::vector<double> p;
    std::vector<std::string> procedures;
    bool sigma_unknown = false;
    std::string alt = "gaussian";
    std::size_t reps = 10000;
    std::size_t reps_sb = 3000;
    std::size_t reps_dpp = 0;
    std::size_t workers = 1;
    int sb_iter = 5000, sb_burn = 1000, dpp_iter = 4000, dpp_burn = 1000;
};

void add_common(CLI::App* app, CommonFlags& f, bool with_procedures) {
    app->add_option("--seed", f.seed, "Master seed")->required();
    app->add_option("--out", f.out, "Output directory");
    app->add_option("--m", f.m, "Number of tests");
    app->add_option("--sigma", f.sigma, "Null standard deviation");
    app->add_option("--tau", f.tau, "Signal standard deviation (default sigma*sqrt(2 log m))");
    app->add_option("--alpha", f.alpha, "FDR / FWER level");
    app->add_option("--beta", f.beta, "Shape of the Beta(1, beta) prior on p");
    app->add_option("--p", f.p, "Signal fractions")->delimiter(',');
    if (with_procedures) app->add_option("--procedures", f.procedures, "Procedures, comma separated")->delimiter(',');
    app->add_flag("--sigma-unknown", f.sigma_unknown, "Estimate sigma");
    app->add_option("--alt", f.alt, "Signal law: gaussian or gamma")->check(CLI::IsMember({"gaussian", "gamma"}));
    app->add_option("--reps", f.reps, "Replicates per procedure");
    app->add_option("--reps-sb", f.reps_sb, "Replicates for SB");
    app->add_option("--reps-dpp", f.reps_dpp, "Replicates for DPP (0 keeps it out)");
    app->add_option("--workers", f.workers, "Worker threads");
    app->add_option("--sb-iter", f.sb_iter, "SB sweeps");
    app->add_option("--sb-burn", f.sb_burn, "SB burn-in sweeps");
    app->add_option("--dpp-iter", f.dpp_iter, "DPP sweeps");
    app->add_option("--dpp-burn", f.dpp_burn, "DPP burn-in sweeps");
}

ExperimentConfig to_config(const CommonFlags& f) {
    ExperimentConfig cfg;
    cfg.m = f.m;
    cfg.sigma = f.sigma;
    if (f.tau > 0.0) cfg.tau = f.tau;
    cfg.alpha = f.alpha;
    cfg.beta_prior = f.beta;
    if (!f.p.empty()) cfg.p_grid = f.p;
    for (const std::string& name : f.procedures) {
        const auto proc = parse_procedure(name);
        if (!proc) throw CLI::ValidationError("--procedures", "unknown procedure " + name);
        cfg.procedures.push_back(*proc);
    }
    cfg.sigma_known = !f.sigma_unknown;
    if (f.alt == "gamma") cfg.alt = default_symmetrized_gamma(f.m);
    cfg.reps = f.reps;
    cfg.reps_sb = f.reps_sb;
    cfg.reps_dpp = f.reps_dpp;
    cfg.master_seed = f.seed;
    cfg.workers = f.workers;
    cfg.sb_iter = f.sb_iter;
    cfg.sb_burn = f.sb_burn;
    cfg.dpp_iter = f.dpp_iter;
    cfg.dpp_burn = f.dpp_burn;
    return cfg;
}

std::string command_line(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-groups multiple testing experiments"};
    app.require_subcommand(1);
    const std::string cmdline = command_line(argc, argv);

    CommonFlags sim_flags;
    auto* sim = app.add_subcommand("simulate", "Run replicate simulations for chosen procedures");
    add_common(sim, sim_flags, true);

    CommonFlags t3_flags;
    auto* t3 = app.add_subcommand("table3", "Reproduce the misclassification / FDR table with reconciliation");
    add_common(t3, t3_flags, false);
    std::string t3_fixture = (fixture_dir() / "table3_published.txt").string();
    t3->add_option("--fixture", t3_fixture, "Published values");

    CommonFlags fig_flags;
    auto* fig = app.add_subcommand("fig", "Emit data for one figure panel");
    add_common(fig, fig_flags, false);
    std::string panel;
    std::size_t points = 40;
    std::size_t kl_draws = 200000;
    fig->add_option("--panel", panel, "Panel id (1a-1d, 2a-2d, 4a, 4b, 5a, 5b)")->required()->check([](const std::string& s) {
        return is_known_panel(s) ? std::string() : "unknown panel " + s;
    });
    fig->add_option("--points", points, "Number of evenly spaced p values when --p is not given");
    fig->add_option("--kl-draws", kl_draws, "Monte Carlo draws per p for panels 5a/5b");

    CommonFlags toy_flags;
    auto* toy = app.add_subcommand("toy-compare", "Case-by-case comparison of SB, DPP and NPBN on toy datasets");
    add_common(toy, toy_flags, true);

    CommonFlags id_flags;
    auto* ident = app.add_subcommand("identify", "Kullback-Leibler numbers for the two confusable model pairs");
    add_common(ident, id_flags, false);
    std::size_t id_draws = 1000000, id_direct = 20000;
    ident->add_option("--draws", id_draws, "Monte Carlo draws for K12 and V12");
    ident->add_option("--direct-reps", id_direct, "Replicates for the direct simulation of P(D12 < 0)");

    auto* self = app.add_subcommand("selftest", "Run the acceptance suite");
    std::uint64_t self_seed = AcceptanceOptions{}.seed;
    std::size_t self_workers = 1;
    std::vector<int> self_ids;
    bool skip_slow = false;
    self->add_option("--seed", self_seed, "Master seed");
    self->add_option("--workers", self_workers, "Worker threads");
    self->add_option("--criterion", self_ids, "Criteria to run (default all)")->delimiter(',');
    self->add_flag("--skip-slow", skip_slow, "Skip the slow criteria");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            const ExperimentConfig cfg = to_config(sim_flags);
            const auto rows = run_experiment(cfg);
            const std::filesystem::path out = sim_flags.out;
            write_file_atomic(out / "results.csv", rows_to_csv(rows));
            write_file_atomic(out / "manifest.txt", manifest_text(cfg, cmdline));
            std::cout << "wrote " << rows.size() << " rows to " << (out / "results.csv").string() << "\n";
        } else if (*t3) {
            const ExperimentConfig cfg = table3_config(to_config(t3_flags));
            const GoldenFixture published = load_fixture(t3_fixture);
            const Table3Result result = table3(cfg, published);
            const std::filesystem::path out = t3_flags.out;
            write_file_atomic(out / "table3.csv", rows_to_csv(result.rows));
            write_file_atomic(out / "table3_reconciliation.csv", result.report_text());
            write_file_atomic(out / "manifest.txt", manifest_text(cfg, cmdline));
            std::cout << result.flagged_count() << " of " << result.entries.size()
                      << " published cells flagged; see " << (out / "table3_reconciliation.csv").string() << "\n";
        } else if (*fig) {
            ExperimentConfig cfg = to_config(fig_flags);
            if (fig_flags.p.empty()) cfg.p_grid = default_panel_grid(panel, points);
            const auto rows = figure_panel(panel, cfg, kl_draws);
            const std::filesystem::path out = fig_flags.out;
            write_file_atomic(out / ("fig_" + panel + ".csv"), rows_to_csv(rows));
            write_file_atomic(out / ("manifest_fig_" + panel + ".txt"), manifest_text(cfg, cmdline));
            std::cout << "wrote " << (out / ("fig_" + panel + ".csv")).string() << "\n";
        } else if (*toy) {
            ExperimentConfig cfg = to_config(toy_flags);
            if (cfg.procedures.empty()) cfg.procedures = {Procedure::SB, Procedure::DPP, Procedure::NPBN};
            const auto ps = toy_flags.p.empty() ? default_toy_p_values() : toy_flags.p;
            const ToyResult result = toy_compare(cfg, ps);
            const std::filesystem::path out = toy_flags.out;
            write_file_atomic(out / "toy_discoveries.csv", toy_rows_to_csv(result.rows));
            write_file_atomic(out / "toy_scatter.csv", toy_scatter_to_csv(result.scatter));
            write_file_atomic(out / "manifest_toy.txt", manifest_text(cfg, cmdline));
            std::cout << toy_rows_to_csv(result.rows);
        } else if (*ident) {
            const ExperimentConfig cfg = to_config(id_flags);
            std::ostringstream csv;
            csv << "example,k12,v12,se_k12,mean_d12,var_d12_centered,var_d12_uncentered,prob_centered,prob_uncentered,prob_direct\n";
            struct Pair {
                const char* name;
                ModelParams a, b;
            };
            const ModelParams first = cfg.params_at(0.01);
            const ModelParams second = cfg.params_at(0.95);
            const Pair pairs[] = {{"sparse_vs_all_signal", first, all_signal_competitor(first)},
                                  {"dense_vs_no_signal", second, no_signal_competitor(second)}};
            std::uint64_t index = 0;
            for (const Pair& pr : pairs) {
                Stream s = derive_stream(cfg.master_seed, index, "identify:kl");
                Stream d = derive_stream(cfg.master_seed, index, "identify:direct");
                ++index;
                const KlStats kl = kl_mc(pr.a, pr.b, id_draws, s);
                const double md = static_cast<double>(cfg.m);
                const double direct = wrong_model_prob_direct(pr.a, pr.b, cfg.m, id_direct, d);
                char line[512];
                std::snprintf(line, sizeof line, "%s,%.6g,%.6g,%.3g,%.6g,%.6g,%.6g,%.4f,%.4f,%.4f\n", pr.name, kl.k12, kl.v12,
                              kl.se_k12, md * kl.k12, md * kl.variance(), md * kl.v12, wrong_model_prob(kl, cfg.m),
                              wrong_model_prob_uncentered(kl, cfg.m), direct);
                csv << line;
            }
            const std::filesystem::path out = id_flags.out;
            write_file_atomic(out / "identify.csv", csv.str());
            std::cout << csv.str();
        } else if (*self) {
            AcceptanceOptions opts;
            opts.seed = self_seed;
            opts.workers = self_workers;
            if (self_ids.empty()) {
                for (int i = 1; i <= kCriterionCount; ++i) self_ids.push_back(i);
            }
            bool all = true;
            for (int id : self_ids) {
                if (skip_slow && is_slow_criterion(id)) {
                    std::cout << "SKIP " << id << " (slow)\n";
                    continue;
                }
                const CriterionResult r = run_criterion(id, opts);
                std::cout << format_result(r, true) << std::endl;
                all = all && r.pass;
            }
            return all ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
