#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twogroups/harness.hpp"

namespace twogroups {

// Where an expected value comes from: a published table or our own derivation.
enum class Provenance { Published, Derived };

struct FixtureValue {
    std::string procedure;
    double p = 0.0;
    bool sigma_known = true;
    std::string metric;
    double expected = 0.0;
    double tolerance = 0.0;
    Provenance provenance = Provenance::Derived;
};

// Setting-scoped fixtures bind to the model setting only (any seed or
// replicate count); run-scoped fixtures bind to one exact run.
enum class HashScope { Setting, Run };

struct GoldenFixture {
    std::string name;
    HashScope scope = HashScope::Setting;
    std::uint64_t config_hash = 0;
    std::vector<FixtureValue> values;
};

class FixtureMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

GoldenFixture parse_fixture(const std::string& text);
GoldenFixture load_fixture(const std::filesystem::path& path);
std::string fixture_to_text(const GoldenFixture& fixture);
std::filesystem::path fixture_dir();

struct FixtureCheck {
    FixtureValue value;
    std::optional<double> observed;
    double mc_se = 0.0;
    double distance_se = 0.0;  // |observed - expected| / mc_se; infinite when se = 0 and they differ
    bool pass = false;
};

struct ReconciliationReport {
    std::string fixture_name;
    std::vector<FixtureCheck> checks;
    bool all_pass() const;
    bool published_pass() const;
    std::string to_text() const;
};

// Compares results with the fixture; a value passes when |observed - expected| <= tolerance.
// Throws FixtureMismatch when the fixture was made for a different configuration.
ReconciliationReport verify_fixtures(const std::vector<ResultRow>& results, const ExperimentConfig& cfg,
                                     const GoldenFixture& fixture);

// Table 3 reproduction: both sigma cases, BO in closed form, every other cell
// simulated, and each published cell flagged when
// |estimate - published| > 3 (MC SE + tolerance).
struct Table3Entry {
    FixtureValue published;
    std::optional<double> estimate;
    double mc_se = 0.0;
    bool flagged = true;
};

struct Table3Result {
    std::vector<ResultRow> rows;
    std::vector<Table3Entry> entries;
    std::string report_text() const;
    std::size_t flagged_count() const;
};

ExperimentConfig table3_config(const ExperimentConfig& base);
Table3Result table3(const ExperimentConfig& base, const GoldenFixture& published);

}  // namespace twogroups
