#include "evcharge/bench.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace evcharge;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("evcharge_bench_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

MatrixSpec small_matrix() {
    MatrixSpec m;
    m.base = default_scenario_config(10);
    m.scenarios = {default_scenario_set()[0], default_scenario_set()[4]};
    m.strategies = {"AFAP", "ALAP", "RR"};
    m.runs = 3;
    m.base_seed = 40;
    return m;
}

}  // namespace

TEST(UserSatisfaction, Examples) {
    EXPECT_DOUBLE_EQ(*user_satisfaction({{0.85, 0.85}}), 100.0);
    EXPECT_NEAR(*user_satisfaction({{0.80, 0.85}, {0.85, 0.85}}), 97.06, 0.005);
    EXPECT_FALSE(user_satisfaction({}).has_value());
    EXPECT_DOUBLE_EQ(*user_satisfaction({{0.95, 0.85}}), 100.0);
}

TEST(Aggregate, SampleStd) {
    const Stat s = summarize({1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
    EXPECT_DOUBLE_EQ(s.std, 1.0);
    EXPECT_DOUBLE_EQ(summarize({4.0}).std, 0.0);
}

TEST(Aggregate, RejectsEmptyAndMixedGroups) {
    EXPECT_THROW(aggregate_group({}), std::invalid_argument);
    MetricsReport a, b;
    a.scenario = b.scenario = "No RE";
    a.strategy = "AFAP";
    b.strategy = "RR";
    EXPECT_THROW(aggregate_group({a, b}), std::invalid_argument);
}

TEST(Aggregate, GroupsInFirstSeenOrderAndSkipsErrors) {
    std::vector<MetricsReport> rows(4);
    rows[0].strategy = rows[1].strategy = "B";
    rows[2].strategy = rows[3].strategy = "A";
    rows[0].co2_kg = 1.0;
    rows[1].co2_kg = 3.0;
    rows[3].error = "boom";
    const auto agg = aggregate_runs(rows);
    ASSERT_EQ(agg.size(), 2u);
    EXPECT_EQ(agg[0].strategy, "B");
    EXPECT_DOUBLE_EQ(agg[0].co2_kg.mean, 2.0);
    EXPECT_EQ(agg[1].runs, 1);
}

TEST(Strategies, Names) {
    EXPECT_EQ(default_strategies().size(), 8u);
    EXPECT_EQ(canonical_strategy("afap+"), std::optional<std::string>("AFAP+"));
    EXPECT_EQ(canonical_strategy("mpc-v2g"), std::optional<std::string>("MPC-V2G"));
    EXPECT_FALSE(canonical_strategy("nope").has_value());
    EXPECT_THROW(make_controller("SAC", {}), ConfigError);
}

TEST(Matrix, RowCountOrderAndPairedSeeds) {
    const MatrixSpec m = small_matrix();
    const auto rows = run_matrix(m);
    ASSERT_EQ(rows.size(), 2u * 3u * 3u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        EXPECT_TRUE(r.error.empty()) << r.error;
        EXPECT_EQ(r.scenario, m.scenarios[i / 9].name);
        EXPECT_EQ(r.strategy, m.strategies[(i / 3) % 3]);
        EXPECT_EQ(r.seed, m.base_seed + i % 3);
        // Every strategy of run k sees the same session plan.
        EXPECT_EQ(r.dropped_arrivals, rows[i % 3].dropped_arrivals);
    }
}

TEST(Matrix, UnknownStrategyFailsBeforeRunning) {
    MatrixSpec m = small_matrix();
    m.strategies.push_back("Teleport");
    EXPECT_THROW(run_matrix(m), ConfigError);
}

TEST(Matrix, MetricInvariantsProperty) {
    MatrixSpec m = small_matrix();
    m.scenarios = default_scenario_set();
    m.strategies = default_strategies();
    m.strategies.push_back("Random");
    m.runs = 2;
    for (const auto& r : run_matrix(m)) {
        SCOPED_TRACE(r.scenario + " / " + r.strategy);
        ASSERT_TRUE(r.error.empty()) << r.error;
        if (r.satisfaction_pct) {
            EXPECT_GE(*r.satisfaction_pct, 0.0);
            EXPECT_LE(*r.satisfaction_pct, 100.0);
        }
        EXPECT_GE(r.co2_kg, 0.0);
        EXPECT_GE(r.overload_kwh, 0.0);
        EXPECT_GE(r.charged_kwh, 0.0);
        EXPECT_GE(r.discharged_kwh, 0.0);
        EXPECT_GE(r.re_ratio, 0.0);
        EXPECT_LE(r.re_ratio, 1.0 + 1e-12);
        if (r.charged_kwh > 0.0) {
            ASSERT_TRUE(r.ci_g_per_kwh.has_value());
            EXPECT_NEAR(*r.ci_g_per_kwh, 1000.0 * r.co2_kg / r.charged_kwh, 1e-9 * (1.0 + *r.ci_g_per_kwh));
        }
        if (r.scenario == "No RE") EXPECT_EQ(r.re_ratio, 0.0);
        EXPECT_FALSE(r.wall_time_s.has_value());
    }
}

TEST(Matrix, ReportCsvIsDeterministicAcrossWorkerCounts) {
    const auto dir = temp_dir("det");
    MatrixSpec m = small_matrix();
    m.strategies = {"AFAP", "MPC-G2V", "Random"};
    m.runs = 2;
    write_report_csv(dir / "a.csv", run_matrix(m));
    m.workers = 3;
    write_report_csv(dir / "b.csv", run_matrix(m));
    const std::string a = slurp(dir / "a.csv");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(dir / "b.csv"));
    EXPECT_EQ(a.substr(0, a.find('\n')),
              "scenario,strategy,seed,co2_kg,ci_g_per_kwh,satisfaction_pct,overload_kwh,charged_kwh,"
              "discharged_kwh,re_ratio,dropped_arrivals,wall_time_s");
}

TEST(Matrix, TimingFillsWallTime) {
    MatrixSpec m = small_matrix();
    m.strategies = {"AFAP"};
    m.runs = 1;
    m.episode.timing = true;
    for (const auto& r : run_matrix(m)) {
        ASSERT_TRUE(r.wall_time_s.has_value());
        EXPECT_GE(*r.wall_time_s, 0.0);
    }
}

TEST(Episode, IdleServesNothing) {
    const ScenarioConfig cfg = default_scenario_config(10);
    auto profiles = std::make_shared<const SiteProfiles>(build_site_profiles(cfg, {}));
    const SessionPlan plan = generate_sessions(cfg, 3);
    ASSERT_FALSE(plan.sessions.empty());
    auto idle = make_controller("Idle", {});
    EpisodeOptions eo;
    eo.trace = true;
    const auto res = run_episode(cfg, profiles, plan, *idle, eo);
    EXPECT_EQ(res.report.charged_kwh, 0.0);
    EXPECT_EQ(res.report.co2_kg, 0.0);
    EXPECT_FALSE(res.report.ci_g_per_kwh.has_value());
    ASSERT_TRUE(res.report.satisfaction_pct.has_value());
    EXPECT_LT(*res.report.satisfaction_pct, 100.0);
    EXPECT_EQ(res.trace.size(), static_cast<std::size_t>(cfg.episode_steps));
}

TEST(Episode, RandomIsLessSatisfyingThanAfap) {
    MatrixSpec m = small_matrix();
    m.scenarios = {default_scenario_set()[0]};
    m.strategies = {"AFAP", "Random"};
    m.runs = 5;
    const auto agg = aggregate_runs(run_matrix(m));
    ASSERT_EQ(agg.size(), 2u);
    EXPECT_GT(agg[0].satisfaction_pct.mean, agg[1].satisfaction_pct.mean);
}

TEST(Reports, MissingValuesAndErrorsAreBlank) {
    const auto dir = temp_dir("blank");
    MetricsReport ok;
    ok.scenario = "No RE";
    ok.strategy = "AFAP";
    MetricsReport bad = ok;
    bad.seed = 1;
    bad.error = "failed";
    write_report_csv(dir / "r.csv", {ok, bad});
    std::istringstream is(slurp(dir / "r.csv"));
    std::string header, first, second;
    std::getline(is, header);
    std::getline(is, first);
    std::getline(is, second);
    EXPECT_EQ(first, "No RE,AFAP,0,0.000000,,,0.000000,0.000000,0.000000,0.000000,0,");
    EXPECT_EQ(second, "No RE,AFAP,1,,,,,,,,,");
}

TEST(Reports, JsonAndPlotDataWritten) {
    const auto dir = temp_dir("json");
    MatrixSpec m = small_matrix();
    m.runs = 2;
    const auto rows = run_matrix(m);
    write_report_json(dir / "report.json", rows);
    write_plot_csv(dir / "plot.csv", aggregate_runs(rows));
    const std::string json = slurp(dir / "report.json");
    EXPECT_NE(json.find("\"No RE\""), std::string::npos);
    EXPECT_NE(json.find("\"ALAP\""), std::string::npos);
    const std::string plot = slurp(dir / "plot.csv");
    EXPECT_EQ(plot.substr(0, plot.find('\n')), "scenario,strategy,metric,mean,std");
}

TEST(Sweep, ArmLabels) {
    SweepSpec s;
    auto [labels, base] = sweep_arms(s);
    EXPECT_EQ(labels, (std::vector<std::string>{"Full", "NoCarbon", "NoSatisfaction", "NoDischarge"}));
    EXPECT_EQ(base, "Full");
    s.axis = SweepAxis::WCo2;
    std::tie(labels, base) = sweep_arms(s);
    EXPECT_EQ(labels.size(), 4u);
    EXPECT_EQ(base, "W_CO2=5");
    s.axis = SweepAxis::Penetration;
    std::tie(labels, base) = sweep_arms(s);
    EXPECT_EQ(labels, (std::vector<std::string>{"0% Wind", "25% Wind", "50% Wind", "75% Wind"}));
    s.axis = SweepAxis::Demand;
    std::tie(labels, base) = sweep_arms(s);
    EXPECT_EQ(labels, (std::vector<std::string>{"Low", "Medium", "High"}));
    EXPECT_EQ(base, "Medium");
    EXPECT_FALSE(parse_sweep_axis("colour").has_value());
}

TEST(Sweep, WeightSweepDeltasVanishAtBaseline) {
    MatrixSpec m = small_matrix();
    m.scenarios = {default_scenario_set()[0]};
    m.strategies = {"AFAP", "ALAP"};
    m.runs = 2;
    SweepSpec s;
    s.axis = SweepAxis::WCo2;
    const auto res = sweep(m, s);
    ASSERT_EQ(res.arms.size(), 4u);
    ASSERT_EQ(res.deltas.size(), 8u);
    for (const auto& d : res.deltas) {
        // Heuristics ignore the reward, so only the reward column moves.
        EXPECT_EQ(d.co2_kg, 0.0);
        if (d.arm == "W_CO2=5") EXPECT_EQ(d.reward, 0.0);
        if (d.arm == "W_CO2=10") EXPECT_LT(d.reward, 0.0);
    }
}
