#include <gtest/gtest.h>

#include <cmath>

#include "twogroups/fixtures.hpp"
#include "twogroups/harness.hpp"

using namespace twogroups;

namespace {

ExperimentConfig regression_config() {
    ExperimentConfig c;
    c.p_grid = {0.05, 0.2};
    c.reps = 200;
    c.master_seed = 7;
    c.procedures = {Procedure::BO, Procedure::Bonf, Procedure::BH, Procedure::BHmod,
                    Procedure::PEB2, Procedure::BH2, Procedure::NPBN};
    return c;
}

}  // namespace

TEST(Fixtures, ParseAndPrintRoundTrip) {
    const std::string text =
        "# comment\nname = demo\nscope = run\nconfig_hash = 42\n"
        "value BH 0.05 1 fdr 0.0475 0.001 derived\nvalue BO 0.2 0 mp 0.117 0.0005 published\n";
    const GoldenFixture f = parse_fixture(text);
    EXPECT_EQ(f.name, "demo");
    EXPECT_EQ(f.scope, HashScope::Run);
    EXPECT_EQ(f.config_hash, 42u);
    ASSERT_EQ(f.values.size(), 2u);
    EXPECT_FALSE(f.values[1].sigma_known);
    EXPECT_EQ(f.values[1].provenance, Provenance::Published);
    EXPECT_EQ(fixture_to_text(parse_fixture(fixture_to_text(f))), fixture_to_text(f));
    EXPECT_ANY_THROW(parse_fixture("name = x\nvalue BH 0.05 1 fdr 0.1 0.1\n"));
}

TEST(Fixtures, ExactMatchPassesAndStaleHashRefused) {
    ExperimentConfig c = regression_config();
    c.reps = 20;
    c.procedures = {Procedure::BH};
    const auto rows = run_experiment(c);
    GoldenFixture f;
    f.name = "self";
    f.scope = HashScope::Run;
    f.config_hash = c.run_hash();
    for (const auto& r : rows) {
        if (r.estimate) f.values.push_back({r.procedure, r.p_true, r.sigma_known, r.metric, *r.estimate, 0.0, Provenance::Derived});
    }
    EXPECT_TRUE(verify_fixtures(rows, c, f).all_pass());
    ExperimentConfig other = c;
    other.master_seed = 8;
    EXPECT_THROW(verify_fixtures(rows, other, f), FixtureMismatch);
    f.values[0].expected += 1.0;
    EXPECT_FALSE(verify_fixtures(rows, c, f).all_pass());
}

TEST(Fixtures, RegressionRun) {
    const GoldenFixture f = load_fixture(fixture_dir() / "regression_small.txt");
    const ExperimentConfig c = regression_config();
    const auto report = verify_fixtures(run_experiment(c), c, f);
    EXPECT_TRUE(report.all_pass()) << report.to_text();
    EXPECT_GT(report.checks.size(), 30u);
}

TEST(Fixtures, PublishedTableBindsToSetting) {
    const GoldenFixture f = load_fixture(fixture_dir() / "table3_published.txt");
    EXPECT_EQ(f.scope, HashScope::Setting);
    EXPECT_EQ(f.config_hash, table3_config(ExperimentConfig{}).setting_hash());
    EXPECT_EQ(f.values.size(), 144u);
    for (const auto& v : f.values) EXPECT_EQ(v.provenance, Provenance::Published);
    // A different model setting cannot be reconciled against the table.
    ExperimentConfig shifted;
    shifted.m = 500;
    EXPECT_THROW(table3(shifted, f), FixtureMismatch);
}

TEST(Fixtures, PublishedOracleCellsReproduced) {
    // BO cells are closed form, so they reconcile exactly at printed precision.
    const GoldenFixture f = load_fixture(fixture_dir() / "table3_published.txt");
    for (const auto& v : f.values) {
        if (v.procedure != "BO" || v.metric != "mp") continue;
        const double mp = oracle_characteristics(ExperimentConfig{}.params_at(v.p), GaussianSignal{}, 200).mp;
        EXPECT_LE(std::abs(mp - v.expected), v.tolerance) << v.p;
    }
}
