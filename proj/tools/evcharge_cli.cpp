#include "evcharge/config.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace evcharge;
namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::optional<int> runs;
    std::optional<int> workers;
    bool trace = false;
    bool timing = false;
};

RunConfig load(const GlobalOptions& g) {
    RunConfig rc = g.config.empty() ? RunConfig{} : load_run_config(g.config);
    if (g.seed) {
        rc.seed = *g.seed;
        rc.train.seed = *g.seed;
    }
    if (g.runs) rc.runs = *g.runs;
    if (g.workers) rc.workers = *g.workers;
    rc.timing = rc.timing || g.timing;
    return rc;
}

const ScenarioSpec& pick_scenario(const RunConfig& rc, const std::string& name) {
    if (name.empty()) return rc.scenarios.front();
    for (const auto& s : rc.scenarios)
        if (s.name == name) return s;
    throw ConfigError("unknown scenario '" + name + "'");
}

void write_reports(const fs::path& out, const std::vector<MetricsReport>& rows) {
    fs::create_directories(out);
    write_report_csv(out / "report.csv", rows);
    write_report_json(out / "report.json", rows);
    write_plot_csv(out / "plot_data.csv", aggregate_runs(rows));
}

void print_summary(const std::vector<MetricsReport>& rows) {
    std::printf("%-14s %-10s %5s %10s %10s %10s %10s %10s\n", "scenario", "strategy", "runs", "co2_kg", "ci_g/kWh",
                "sat_%", "ol_kWh", "charged");
    for (const auto& a : aggregate_runs(rows)) {
        std::printf("%-14s %-10s %5d %10.3f %10.2f %10.2f %10.3f %10.2f\n", a.scenario.c_str(), a.strategy.c_str(),
                    a.runs, a.co2_kg.mean, a.ci_g_per_kwh.mean, a.satisfaction_pct.mean, a.overload_kwh.mean,
                    a.charged_kwh.mean);
    }
    int failed = 0;
    for (const auto& r : rows) failed += !r.error.empty();
    if (failed) std::printf("%d episode(s) failed; see stderr\n", failed);
}

int failed_rows(const std::vector<MetricsReport>& rows) {
    int n = 0;
    for (const auto& r : rows) n += !r.error.empty();
    return n;
}

int cmd_validate(const GlobalOptions& g) {
    const RunConfig rc = load(g);
    const auto problems = check_run_config(rc);
    for (const auto& p : problems) std::cerr << p << "\n";
    if (!problems.empty()) return 2;
    if (rc.policy) load_policy(*rc.policy, EnvSignature{rc.scenario.n_ports, rc.rl_horizon, 1});
    std::cout << "config ok: " << rc.scenarios.size() << " scenarios, " << resolved_strategies(rc).size()
              << " strategies, " << rc.runs << " runs\n";
    return 0;
}

int cmd_simulate(const GlobalOptions& g, const std::string& strategy, const std::string& scenario_name) {
    RunConfig rc = load(g);
    rc.runs = 1;
    MatrixSpec m = make_matrix_spec(rc);
    const ScenarioSpec& sc = pick_scenario(rc, scenario_name);
    auto profiles = std::make_shared<const SiteProfiles>(build_site_profiles(rc.scenario, sc.penetration, rc.sources));
    const SessionPlan plan = generate_sessions(rc.scenario, rc.seed);

    StrategyOptions opts = m.strategy_options;
    opts.random_seed = rc.seed;
    if (canonical_strategy(strategy) == std::optional<std::string>("SAC") && !opts.policy)
        throw ConfigError("simulate: SAC requires rl.policy");
    auto ctl = make_controller(strategy, opts);
    EpisodeOptions eo = m.episode;
    eo.trace = true;
    EpisodeResult res = run_episode(rc.scenario, profiles, plan, *ctl, eo);
    res.report.scenario = sc.name;
    res.report.strategy = strategy;
    res.report.seed = rc.seed;

    const fs::path out(g.out);
    write_reports(out, {res.report});
    write_trace_csv(out / "trace.csv", res.trace);
    print_summary({res.report});
    std::printf("reward %.4f, trace in %s\n", res.report.reward, (out / "trace.csv").string().c_str());
    return 0;
}

int cmd_benchmark(const GlobalOptions& g) {
    const RunConfig rc = load(g);
    MatrixSpec m = make_matrix_spec(rc);
    if (g.trace) m.trace_dir = fs::path(g.out) / "traces";
    const auto rows = run_matrix(m);
    write_reports(g.out, rows);
    print_summary(rows);
    return failed_rows(rows) ? 3 : 0;
}

int cmd_train(const GlobalOptions& g, std::optional<long long> steps) {
    RunConfig rc = load(g);
    if (steps) rc.train.total_steps = *steps;
    const fs::path out(g.out);
    fs::create_directories(out);
    if (!rc.train.log_csv) rc.train.log_csv = out / "train_log.csv";
    if (auto v = check_run_config(rc); !v.empty()) throw ConfigError(v.front());
    const EnvConfig env = make_env_config(rc, rc.train_penetration);
    const auto result = sac::train_agent(env, rc.train);
    const fs::path policy = rc.policy.value_or(out / "policy.bin");
    if (policy.has_parent_path()) fs::create_directories(policy.parent_path());
    save_policy(policy, result.best);
    std::printf("best eval reward %.3f at step %lld; policy written to %s\n", result.best_eval_reward,
                static_cast<long long>(result.best_step), policy.string().c_str());
    return 0;
}

int cmd_evaluate(const GlobalOptions& g, const std::vector<std::string>& extra) {
    RunConfig rc = load(g);
    if (!rc.policy) throw ConfigError("evaluate: rl.policy is required");
    rc.strategies = {"SAC"};
    for (const auto& s : extra) rc.strategies.push_back(s);
    MatrixSpec m = make_matrix_spec(rc);
    if (g.trace) m.trace_dir = fs::path(g.out) / "traces";
    const auto rows = run_matrix(m);
    write_reports(g.out, rows);
    print_summary(rows);
    return failed_rows(rows) ? 3 : 0;
}

int cmd_sweep(const GlobalOptions& g, const std::string& axis) {
    RunConfig rc = load(g);
    if (!axis.empty()) {
        auto a = parse_sweep_axis(axis);
        if (!a) throw ConfigError("sweep: unknown axis '" + axis + "'");
        rc.sweep.axis = *a;
        rc.sweep.values.clear();
    }
    if (rc.retrain_in_sweep) rc.sweep.retrain = rc.train;
    MatrixSpec m = make_matrix_spec(rc);
    const SweepResult res = sweep(m, rc.sweep);
    const fs::path out(g.out);
    int failed = 0;
    for (const auto& arm : res.arms) {
        std::string dir = arm.label;
        for (char& c : dir)
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
        write_reports(out / dir, arm.rows);
        std::printf("== %s%s\n", arm.label.c_str(), arm.label == res.baseline ? " (baseline)" : "");
        print_summary(arm.rows);
        failed += failed_rows(arm.rows);
    }
    write_delta_csv(out / "delta.csv", res.deltas);
    return failed ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EV charging site simulator and controller benchmark"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("--config", g.config, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Base seed");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--runs", g.runs, "Runs per scenario and strategy");
    app.add_option("--workers", g.workers, "Concurrent episodes");
    app.add_flag("--trace", g.trace, "Write per-episode trace CSVs");
    app.add_flag("--timing", g.timing, "Record wall time per episode");
    app.fallthrough();

    std::string strategy = "AFAP", scenario;
    auto* sim = app.add_subcommand("simulate", "Run one episode and write its trace");
    sim->add_option("--strategy", strategy, "Controller name")->capture_default_str();
    sim->add_option("--scenario", scenario, "Scenario name (default: first)");
    auto* bench = app.add_subcommand("benchmark", "Run the scenario x strategy matrix");
    std::optional<long long> steps;
    auto* train = app.add_subcommand("train", "Train the SAC agent");
    train->add_option("--steps", steps, "Environment steps");
    std::vector<std::string> compare;
    auto* eval = app.add_subcommand("evaluate", "Roll out a trained policy");
    eval->add_option("--compare", compare, "Extra strategies evaluated on the same seeds");
    std::string axis;
    auto* sw = app.add_subcommand("sweep", "Sensitivity sweep over one axis");
    sw->add_option("--axis", axis, "reward_ablation, w_co2, penetration or demand");
    auto* val = app.add_subcommand("validate", "Check a configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sim) return cmd_simulate(g, strategy, scenario);
        if (*bench) return cmd_benchmark(g);
        if (*train) return cmd_train(g, steps);
        if (*eval) return cmd_evaluate(g, compare);
        if (*sw) return cmd_sweep(g, axis);
        if (*val) return cmd_validate(g);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
