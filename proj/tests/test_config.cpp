#include "evcharge/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace evcharge;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("evcharge_config_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream os(p);
    os << text;
}

}  // namespace

TEST(RunConfig, EmptyDocumentGivesDefaults) {
    const RunConfig rc = parse_run_config("{}");
    EXPECT_EQ(rc.scenario.n_ports, 25);
    EXPECT_EQ(rc.scenarios.size(), 5u);
    EXPECT_EQ(rc.runs, 10);
    EXPECT_EQ(resolved_strategies(rc), default_strategies());
    EXPECT_TRUE(check_run_config(rc).empty());
}

TEST(RunConfig, UnknownKeysAreRejected) {
    EXPECT_THROW(parse_run_config(R"({"colour": 1})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"scenario": {"n_port": 5}})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"reward": {"w_co2": 5, "w_c02": 1}})"), ConfigError);
    EXPECT_THROW(parse_run_config("{not json"), ConfigError);
}

TEST(RunConfig, WrongTypesAndValuesAreRejected) {
    EXPECT_THROW(parse_run_config(R"({"scenario": {"n_ports": "many"}})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"strategies": ["AFAP", "Teleport"]})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"scenario": {"demand_level": "Extreme"}})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"scenario": {"arrival_rate_table": [1, 2]}})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"sweep": {"axis": "colour"}})"), ConfigError);
    EXPECT_THROW(parse_run_config(R"({"ci_unit": "lb/MWh"})"), ConfigError);
}

TEST(RunConfig, ValidationReportsKeys) {
    const RunConfig rc = parse_run_config(R"({"scenario": {"transformer_capacity": -5}, "benchmark": {"runs": 0}})");
    const auto problems = check_run_config(rc);
    ASSERT_EQ(problems.size(), 2u);
    EXPECT_NE(problems[0].find("transformer_capacity"), std::string::npos);
    EXPECT_NE(problems[1].find("benchmark.runs"), std::string::npos);
    EXPECT_THROW(make_matrix_spec(rc), ConfigError);
}

TEST(RunConfig, PortCountRescalesSiteDefaults) {
    const RunConfig rc = parse_run_config(R"({"scenario": {"n_ports": 5, "evse_max_charge": 11}})");
    const ScenarioConfig expect = default_scenario_config(5);
    EXPECT_EQ(rc.scenario.n_ports, 5);
    EXPECT_EQ(rc.scenario.transformer_capacity_kw, expect.transformer_capacity_kw);
    EXPECT_EQ(rc.scenario.evse_max_charge_kw, 11.0);
}

TEST(RunConfig, BlocksAreRead) {
    const RunConfig rc = parse_run_config(R"({
        "scenarios": [{"target_fraction": 0.5, "source_mix": "Wind"}, {"name": "half", "target_fraction": 0.5,
                      "source_mix": "Hybrid", "hybrid_split": 0.3}],
        "strategies": ["afap", "MPC-G2V"],
        "reward": {"w_co2": 3, "curtailment_in_discharge_term": false},
        "heuristic": {"power_cap": 40, "start_step": 12},
        "mpc": {"horizon": 8, "lambda_emission": 2},
        "emissions": {"net_export_credit": true},
        "rl": {"horizon": 10, "hidden": [64, 64], "total_steps": 2000, "target_entropy": -3},
        "benchmark": {"runs": 3, "workers": 2, "seed": 77, "timing": true},
        "sweep": {"axis": "demand", "values": ["Low", "High"]}
    })");
    ASSERT_EQ(rc.scenarios.size(), 2u);
    EXPECT_EQ(rc.scenarios[0].name, "50% Wind");
    EXPECT_EQ(rc.scenarios[1].name, "half");
    EXPECT_EQ(rc.scenarios[1].penetration.hybrid_split, 0.3);
    EXPECT_EQ(rc.strategies.size(), 2u);
    EXPECT_EQ(rc.reward.w_co2, 3.0);
    EXPECT_FALSE(rc.reward.curtailment_in_discharge_term);
    EXPECT_EQ(*rc.heuristic.power_cap_kw, 40.0);
    EXPECT_EQ(*rc.heuristic.start_step, 12);
    EXPECT_EQ(rc.mpc.horizon, 8);
    EXPECT_TRUE(rc.emissions.net_export_credit);
    EXPECT_EQ(rc.rl_horizon, 10);
    EXPECT_EQ(rc.train.hidden, (std::vector<int>{64, 64}));
    EXPECT_EQ(*rc.train.target_entropy, -3.0);
    EXPECT_EQ(rc.runs, 3);
    EXPECT_EQ(rc.seed, 77u);
    EXPECT_TRUE(rc.timing);
    EXPECT_EQ(rc.sweep.axis, SweepAxis::Demand);
    EXPECT_EQ(rc.sweep.values, (std::vector<double>{0.0, 2.0}));
    EXPECT_EQ(rc.sweep.rl_horizon, 10);

    const MatrixSpec m = make_matrix_spec(rc);
    EXPECT_EQ(m.runs, 3);
    EXPECT_EQ(m.base_seed, 77u);
    EXPECT_TRUE(m.episode.timing);
}

TEST(RunConfig, ProfilePathsResolveAgainstConfigDirectory) {
    const auto dir = temp_dir("paths");
    std::filesystem::create_directories(dir / "data");
    std::string ci = "hour,value\n";
    for (int h = 0; h <= 30; ++h) ci += std::to_string(h) + ",250\n";
    write_file(dir / "data" / "ci.csv", ci);
    write_file(dir / "run.json", R"({"ci_unit": "g/kWh", "profiles": {"carbon_intensity": "data/ci.csv",
                                     "step_duration": 1.0, "extrapolate": true}})");
    const RunConfig rc = load_run_config(dir / "run.json");
    ASSERT_TRUE(rc.sources.carbon_intensity.has_value());
    EXPECT_NEAR(rc.sources.carbon_intensity->values[0], 0.25, 1e-12);
    EXPECT_TRUE(check_run_config(rc).empty());
}

TEST(RunConfig, MissingFilesAreConfigErrors) {
    EXPECT_THROW(load_run_config("/nonexistent/run.json"), ConfigError);
}

TEST(RunConfig, SacWithoutPolicyIsAViolation) {
    const RunConfig rc = parse_run_config(R"({"strategies": ["AFAP", "SAC"]})");
    EXPECT_FALSE(check_run_config(rc).empty());
}
