#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "twogroups/bayes.hpp"
#include "twogroups/error.hpp"
#include "twogroups/harness.hpp"
#include "twogroups/normal.hpp"
#include "twogroups/random.hpp"

using namespace twogroups;

namespace {

ExperimentConfig small() {
    ExperimentConfig c;
    c.p_grid = {0.05, 0.2};
    c.reps = 60;
    c.reps_sb = 4;
    c.sb_iter = 300;
    c.sb_burn = 100;
    c.master_seed = 11;
    c.procedures = {Procedure::BO, Procedure::BH, Procedure::BHmod, Procedure::PEB2, Procedure::NPBN, Procedure::SB};
    return c;
}

}  // namespace

TEST(Harness, ProcedureNames) {
    for (Procedure p : all_procedures()) EXPECT_EQ(parse_procedure(procedure_name(p)), p);
    EXPECT_FALSE(parse_procedure("nope"));
    EXPECT_EQ(all_procedures().size(), 11u);
}

TEST(Harness, DeterministicAcrossWorkers) {
    ExperimentConfig a = small();
    ExperimentConfig b = small();
    a.workers = 1;
    b.workers = 4;
    EXPECT_EQ(rows_to_csv(run_experiment(a)), rows_to_csv(run_experiment(b)));
}

TEST(Harness, ProcedureListDoesNotChangeData) {
    ExperimentConfig a = small();
    ExperimentConfig b = small();
    b.procedures = {Procedure::BH};
    for (std::size_t r = 0; r < 5; ++r) EXPECT_EQ(make_dataset(a, 0.2, r).x, make_dataset(b, 0.2, r).x);
    const auto ca = run_cells(a);
    const auto cb = run_cells(b);
    // BH is second in a's list within p = 0.05.
    EXPECT_EQ(ca[1].counts, cb[0].counts);
}

TEST(Harness, CommonRandomNumbersAcrossP) {
    const ExperimentConfig c = small();
    const Dataset lo = make_dataset(c, 0.05, 3), hi = make_dataset(c, 0.2, 3);
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!lo.gamma[i] && !hi.gamma[i]) EXPECT_EQ(lo.x[i], hi.x[i]);
    }
}

TEST(Harness, EmptyProcedureListGivesHeaderOnly) {
    ExperimentConfig c = small();
    c.procedures.clear();
    const std::string csv = rows_to_csv(run_experiment(c));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
    EXPECT_EQ(csv.rfind("procedure,p_true,sigma_known,alt,metric,estimate,mc_se,reps_used,seed,software_version,note", 0), 0u);
}

TEST(Harness, CsvRoundTrip) {
    const auto rows = run_experiment(small());
    const auto back = rows_from_csv(rows_to_csv(rows));
    ASSERT_EQ(back.size(), rows.size());
    EXPECT_EQ(rows_to_csv(back), rows_to_csv(rows));
    bool have_na = false;
    for (const auto& r : back) {
        EXPECT_EQ(r.software_version, software_version());
        have_na |= !r.estimate;
    }
    (void)have_na;
}

TEST(Harness, ErrorsBecomeRows) {
    ExperimentConfig c = small();
    c.sigma_known = false;
    c.procedures = {Procedure::NPBN, Procedure::BH};
    const auto rows = run_experiment(c);
    bool npbn_error = false, bh_ok = false;
    for (const auto& r : rows) {
        if (r.procedure == "NPBN" && r.metric == "error") npbn_error = !r.estimate && !r.note.empty();
        if (r.procedure == "BH" && r.metric == "fdr") bh_ok = r.estimate.has_value();
    }
    EXPECT_TRUE(npbn_error);
    EXPECT_TRUE(bh_ok);
}

TEST(Harness, OracleCharacteristicsMatchBayesRules) {
    const ModelParams p = default_params(0.05, 200);
    const OracleCharacteristics oc = oracle_characteristics(p, GaussianSignal{}, 200);
    const ErrorRates r = per_test_error_rates(p, oracle_threshold(p));
    EXPECT_NEAR(oc.mp, bayes_risk(p, r), 1e-15);
    EXPECT_NEAR(oc.fdr, fdr_of_threshold(p, r, 200), 1e-15);
    EXPECT_NEAR(oc.power, 1.0 - r.t2, 1e-15);
    const OracleCharacteristics bonf = bonferroni_characteristics(p, GaussianSignal{}, 200, 0.05);
    EXPECT_NEAR(bonf.threshold, normal_quantile(1.0 - 0.05 / 400.0), 1e-9);
}

TEST(Harness, GammaOracleMinimizesRisk) {
    const SymmetrizedGamma g = default_symmetrized_gamma(200);
    const ModelParams p = default_params(0.1, 200);
    const OracleCharacteristics oc = oracle_characteristics(p, g, 200);
    // Simulated misclassification at the reported threshold and nearby thresholds.
    Stream s(3);
    const Dataset d = sample_dataset(p, 400000, g, s);
    auto mp_at = [&](double c) {
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < d.size(); ++i) wrong += (std::abs(d.x[i]) > c) != d.gamma[i] ? 1 : 0;
        return double(wrong) / d.size();
    };
    const double se = std::sqrt(oc.mp / d.size());
    EXPECT_NEAR(mp_at(oc.threshold), oc.mp, 4.0 * se);
    EXPECT_LT(oc.mp, mp_at(oc.threshold + 0.4));
    EXPECT_LT(oc.mp, mp_at(oc.threshold - 0.4));
}

TEST(Harness, ConfigValidation) {
    ExperimentConfig c = small();
    c.alpha = 1.5;
    EXPECT_THROW(c.validate(), DomainError);
    c = small();
    c.procedures = {Procedure::DPP};
    EXPECT_THROW(c.validate(), DomainError);
    c.reps_dpp = 2;
    EXPECT_NO_THROW(c.validate());
    EXPECT_NE(small().run_hash(), c.run_hash());
    EXPECT_EQ(small().setting_hash(), c.setting_hash());
}

TEST(Harness, AtomicWrite) {
    const auto dir = std::filesystem::temp_directory_path() / "twogroups_harness_test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "sub" / "out.csv";
    write_file_atomic(path, "a,b\n");
    write_file_atomic(path, "c,d\n");
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "c,d\n");
    std::size_t files = 0;
    for (auto& e : std::filesystem::directory_iterator(dir / "sub")) files += e.is_regular_file() ? 1 : 0;
    EXPECT_EQ(files, 1u);
    std::filesystem::remove_all(dir);
}

TEST(Harness, Panels) {
    EXPECT_TRUE(is_known_panel("1a"));
    EXPECT_TRUE(is_known_panel("5b"));
    EXPECT_FALSE(is_known_panel("3z"));
    ExperimentConfig c = small();
    c.p_grid = evenly_spaced(0.01, 0.99, 5);
    ASSERT_EQ(c.p_grid.size(), 5u);
    EXPECT_DOUBLE_EQ(c.p_grid[2], 0.5);
    const auto rows = figure_panel("1d", c);
    std::size_t bo = 0;
    for (const auto& r : rows) bo += r.procedure == "BO" ? 1 : 0;
    EXPECT_EQ(bo, 5u);
    // Centered and uncentered normal approximations per p; 5a falls with p, 5b rises.
    for (const char* panel : {"5a", "5b"}) {
        c.p_grid = default_panel_grid(panel, 4);
        const auto fig5 = figure_panel(panel, c, 50000);
        EXPECT_EQ(fig5.size(), 8u);
        std::vector<double> centered;
        for (const auto& r : fig5) {
            if (r.procedure.rfind("normal_approx:", 0) == 0) centered.push_back(*r.estimate);
        }
        ASSERT_EQ(centered.size(), 4u);
        for (std::size_t i = 1; i < centered.size(); ++i) {
            if (panel[1] == 'a') EXPECT_LT(centered[i], centered[i - 1]) << panel << i;
            else EXPECT_GT(centered[i], centered[i - 1]) << panel << i;
        }
    }
}

TEST(Harness, Manifest) {
    const std::string text = manifest_text(small(), "twogroups simulate --seed 11");
    EXPECT_NE(text.find("seed=11"), std::string::npos);
    EXPECT_NE(text.find(software_version()), std::string::npos);
}
