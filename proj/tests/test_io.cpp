#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "etc/io.hpp"
#include "support.hpp"

using etc::Json;
namespace fs = std::filesystem;
namespace fx = etc::testing;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("etc_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(Fnv, KnownVectors) {
    EXPECT_EQ(etc::fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(etc::fnv1a_hex("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(etc::fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(Config, RoundTripDigest) {
    for (const Json& src : {etc::default_scenario_json(), etc::published_table_scenario_json()}) {
        const auto s = etc::scenario_from_json(src);
        const Json once = etc::scenario_to_json(s);
        const auto back = etc::scenario_from_json(once);
        EXPECT_EQ(etc::scenario_digest(s), etc::scenario_digest(back));
        EXPECT_EQ(once.dump(), etc::scenario_to_json(back).dump());
        EXPECT_EQ(s.plant.A, back.plant.A);
        EXPECT_EQ(s.attack.signal.amplitude, back.attack.signal.amplitude);
        EXPECT_EQ(s.topology.union_laplacian, back.topology.union_laplacian);
    }
}

TEST(Config, DigestSeesChanges) {
    Json j = etc::default_scenario_json();
    const auto a = etc::scenario_digest(etc::scenario_from_json(j));
    j["seed"] = 2;
    EXPECT_NE(a, etc::scenario_digest(etc::scenario_from_json(j)));
}

TEST(Config, DefaultScenarioShape) {
    const auto& s = fx::default_scenario();
    EXPECT_EQ(s.agents(), 10);
    EXPECT_EQ(s.topology.size(), 2);
    EXPECT_NEAR(s.chain.stationary(0), 2.0 / 3.0, 1e-10);
    EXPECT_EQ(s.h, 0.01);
    EXPECT_EQ(s.horizon, 100.0);
    EXPECT_EQ(s.initial.observer, etc::ObserverInit::measurement);
    EXPECT_EQ(s.baseline.beta1, 0.8);
    EXPECT_EQ(s.baseline.mu, 1.0);
}

TEST(Config, ParseErrorCarriesLineAndColumn) {
    try {
        etc::parse_json_text("{\n  \"a\": 1,\n  \"b\": ]\n}");
        FAIL() << "expected ConfigError";
    } catch (const etc::ConfigError& e) {
        EXPECT_EQ(e.line, 3u);
        EXPECT_GT(e.column, 0u);
    }
}

TEST(Config, SchemaErrors) {
    Json j = etc::default_scenario_json();
    j["trigger"]["varpi0"] = 0.0;
    EXPECT_THROW(etc::scenario_from_json(j), etc::ConfigError);
    j = etc::default_scenario_json();
    j.erase("plant");
    EXPECT_THROW(etc::scenario_from_json(j), etc::ConfigError);
    j = etc::default_scenario_json();
    j["graphs"]["edges"] = Json::array({Json::array({{1, 2}})});
    EXPECT_THROW(etc::scenario_from_json(j), etc::ConfigError);  // union disconnected
    j = etc::default_scenario_json();
    j["attack"]["probabilities"] = Json::array({0.5, 0.5});
    EXPECT_THROW(etc::scenario_from_json(j), etc::ConfigError);
}

TEST(Config, MatricesPlant) {
    Json j = etc::default_scenario_json();
    const auto s = etc::scenario_from_json(j);
    j["plant"] = etc::scenario_to_json(s)["plant"];
    const auto t = etc::scenario_from_json(j);
    EXPECT_EQ(s.plant.A, t.plant.A);
    EXPECT_EQ(s.plant.C, t.plant.C);
}

TEST(Gains, RoundTrip) {
    const auto& g = fx::default_gains();
    const auto back = etc::gains_from_json(etc::parse_json_text(etc::gains_to_json(g).dump(2)));
    EXPECT_EQ(g.P, back.P);
    EXPECT_EQ(g.Q, back.Q);
    EXPECT_EQ(g.X, back.X);
    EXPECT_EQ(g.G, back.G);
    EXPECT_EQ(g.K, back.K);
    EXPECT_EQ(g.chi, back.chi);
    EXPECT_EQ(g.structure.lambda2, back.structure.lambda2);
    EXPECT_EQ(g.scalars.dbar, back.scalars.dbar);
}

TEST(Report, FormatListsEveryCondition) {
    const auto txt = etc::format_report(fx::default_synthesis().report);
    for (const char* name : {"cond_P", "cond_observer", "cond_chi_P", "cond_chi_Q", "dbar > 4c + o + 1",
                             "upsilon >= 1/rho", "verdict: PASS"})
        EXPECT_NE(txt.find(name), std::string::npos) << name;
}

TEST(Trace, CsvParsesBack) {
    auto s = fx::default_scenario();
    s.horizon = 5;
    const auto r = etc::run_scenario(s, fx::default_gains());
    const auto dir = scratch("trace");
    etc::write_trace_csv(dir / "trace.csv", r.ts);
    const auto rows = etc::check_trace_csv(dir / "trace.csv", 6, 3);
    EXPECT_EQ(rows, r.ts.samples() * 10);
    std::ifstream in(dir / "trace.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header,
              "t,agent_id,x1,x2,x3,x4,x5,x6,xhat1,xhat2,xhat3,xhat4,xhat5,xhat6,u1,u2,u3,d,varpi,triggered,alpha,"
              "sigma,delta_pos_norm");
    EXPECT_EQ(etc::trace_columns(6, 3).size(), 23u);
}

TEST(Trace, CheckerRejectsBrokenRows) {
    const auto dir = scratch("broken");
    std::ofstream(dir / "bad.csv") << "t,agent_id\n0,1\n";
    EXPECT_THROW(etc::check_trace_csv(dir / "bad.csv", 6, 3), std::runtime_error);
}

TEST(Metrics, JsonHasEveryField) {
    const auto r = etc::run_scenario(fx::default_scenario(), fx::default_gains());
    const Json j = etc::metrics_to_json(r.metrics);
    for (const char* key : {"protocol", "steady_state_pos_error", "trigger_counts", "total_triggers",
                            "min_inter_event", "mean_inter_event", "d_final", "varpi_min", "occupancy",
                            "ms_delta_tail", "mean_delta_tail", "lyapunov_v1_initial", "lyapunov_v1_tail",
                            "threshold_bound_ratio", "attack_energy_max", "attack_energy_ok"})
        EXPECT_TRUE(j.contains(key)) << key;
}
