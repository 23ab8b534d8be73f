#include "twogroups/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#ifndef TWOGROUPS_FIXTURE_DIR
#define TWOGROUPS_FIXTURE_DIR "fixtures"
#endif

namespace twogroups {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

using RowKey = std::tuple<std::string, std::string, bool, std::string>;

RowKey key_of(const std::string& proc, double p, bool sk, const std::string& metric) {
    return {proc, fmt(p), sk, metric};
}

std::map<RowKey, const ResultRow*> index_rows(const std::vector<ResultRow>& rows) {
    std::map<RowKey, const ResultRow*> out;
    for (const ResultRow& r : rows) out[key_of(r.procedure, r.p_true, r.sigma_known, r.metric)] = &r;
    return out;
}

}  // namespace

GoldenFixture parse_fixture(const std::string& text) {
    GoldenFixture f;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool have_hash = false;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("value ", 0) == 0) {
            std::istringstream vs(line.substr(6));
            FixtureValue v;
            int sk = 0;
            std::string prov;
            if (!(vs >> v.procedure >> v.p >> sk >> v.metric >> v.expected >> v.tolerance >> prov)) {
                throw std::runtime_error("fixture line " + std::to_string(lineno) + ": malformed value");
            }
            v.sigma_known = sk != 0;
            if (prov == "published") v.provenance = Provenance::Published;
            else if (prov == "derived") v.provenance = Provenance::Derived;
            else throw std::runtime_error("fixture line " + std::to_string(lineno) + ": provenance missing");
            f.values.push_back(v);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("fixture line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "name") f.name = val;
        else if (key == "scope") {
            if (val == "setting") f.scope = HashScope::Setting;
            else if (val == "run") f.scope = HashScope::Run;
            else throw std::runtime_error("fixture: unknown scope " + val);
        } else if (key == "config_hash") {
            f.config_hash = std::stoull(val);
            have_hash = true;
        } else {
            throw std::runtime_error("fixture: unknown key " + key);
        }
    }
    if (!have_hash) throw std::runtime_error("fixture: config_hash missing");
    return f;
}

GoldenFixture load_fixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_fixture(ss.str());
}

std::string fixture_to_text(const GoldenFixture& f) {
    std::ostringstream os;
    os << "name = " << f.name << "\nscope = " << (f.scope == HashScope::Setting ? "setting" : "run")
       << "\nconfig_hash = " << f.config_hash << "\n";
    for (const FixtureValue& v : f.values) {
        os << "value " << v.procedure << " " << fmt(v.p) << " " << (v.sigma_known ? 1 : 0) << " " << v.metric << " "
           << fmt(v.expected) << " " << fmt(v.tolerance) << " "
           << (v.provenance == Provenance::Published ? "published" : "derived") << "\n";
    }
    return os.str();
}

std::filesystem::path fixture_dir() { return TWOGROUPS_FIXTURE_DIR; }

bool ReconciliationReport::all_pass() const {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

bool ReconciliationReport::published_pass() const {
    for (const auto& c : checks) {
        if (!c.pass && c.value.provenance == Provenance::Published) return false;
    }
    return true;
}

std::string ReconciliationReport::to_text() const {
    std::ostringstream os;
    os << "fixture " << fixture_name << "\n";
    for (const auto& c : checks) {
        os << (c.pass ? "pass " : "FAIL ") << c.value.procedure << " p=" << fmt(c.value.p)
           << " sigma_known=" << c.value.sigma_known << " " << c.value.metric << " expected=" << fmt(c.value.expected)
           << " observed=" << (c.observed ? fmt(*c.observed) : "NA") << " tol=" << fmt(c.value.tolerance)
           << " distance_se=" << fmt(c.distance_se) << "\n";
    }
    return os.str();
}

ReconciliationReport verify_fixtures(const std::vector<ResultRow>& results, const ExperimentConfig& cfg,
                                     const GoldenFixture& fixture) {
    const std::uint64_t h = fixture.scope == HashScope::Setting ? cfg.setting_hash() : cfg.run_hash();
    if (h != fixture.config_hash) {
        throw FixtureMismatch("fixture " + fixture.name + " was made for configuration " +
                              std::to_string(fixture.config_hash) + ", not " + std::to_string(h));
    }
    const auto idx = index_rows(results);
    ReconciliationReport report;
    report.fixture_name = fixture.name;
    for (const FixtureValue& v : fixture.values) {
        FixtureCheck c;
        c.value = v;
        const auto it = idx.find(key_of(v.procedure, v.p, v.sigma_known, v.metric));
        if (it != idx.end() && it->second->estimate) {
            c.observed = it->second->estimate;
            c.mc_se = it->second->mc_se;
            const double d = std::abs(*c.observed - v.expected);
            c.distance_se = c.mc_se > 0.0 ? d / c.mc_se : (d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
            c.pass = d <= v.tolerance;
        }
        report.checks.push_back(c);
    }
    return report;
}

ExperimentConfig table3_config(const ExperimentConfig& base) {
    ExperimentConfig cfg = base;
    cfg.p_grid = {0.0, 0.025, 0.05, 0.2, 0.5, 0.8};
    cfg.alt = GaussianSignal{};
    return cfg;
}

std::size_t Table3Result::flagged_count() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.flagged ? 1 : 0;
    return n;
}

std::string Table3Result::report_text() const {
    std::ostringstream os;
    os << "procedure,p,sigma_known,metric,published,estimate,mc_se,tolerance,flagged\n";
    for (const auto& e : entries) {
        os << e.published.procedure << "," << fmt(e.published.p) << "," << (e.published.sigma_known ? 1 : 0) << ","
           << e.published.metric << "," << fmt(e.published.expected) << "," << (e.estimate ? fmt(*e.estimate) : "NA")
           << "," << fmt(e.mc_se) << "," << fmt(e.published.tolerance) << "," << (e.flagged ? 1 : 0) << "\n";
    }
    return os.str();
}

Table3Result table3(const ExperimentConfig& base, const GoldenFixture& published) {
    const ExperimentConfig setting = table3_config(base);
    if (published.scope != HashScope::Setting || published.config_hash != setting.setting_hash()) {
        throw FixtureMismatch("table3: published values do not match the simulation setting");
    }
    Table3Result out;
    for (bool known : {true, false}) {
        ExperimentConfig cfg = setting;
        cfg.sigma_known = known;
        cfg.procedures = {Procedure::BO, Procedure::SB, Procedure::PEB1, Procedure::PEB2, Procedure::BH1, Procedure::BH2};
        if (known) cfg.procedures.push_back(Procedure::NPBN);
        if (!known) cfg.procedures.erase(cfg.procedures.begin());  // BO does not depend on sigma being known
        auto rows = run_experiment(cfg);
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    }
    const auto idx = index_rows(out.rows);
    for (const FixtureValue& v : published.values) {
        Table3Entry e;
        e.published = v;
        // BO cells come from the closed form.
        const std::string metric = v.procedure == "BO" ? v.metric + "_exact" : v.metric;
        const auto it = idx.find(key_of(v.procedure, v.p, v.sigma_known, metric));
        if (it != idx.end() && it->second->estimate) {
            e.estimate = it->second->estimate;
            e.mc_se = it->second->mc_se;
            e.flagged = std::abs(*e.estimate - v.expected) > 3.0 * (e.mc_se + v.tolerance);
        }
        out.entries.push_back(e);
    }
    return out;
}

}  // namespace twogroups
