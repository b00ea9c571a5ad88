#pragma once

#include "evcharge/heuristics.hpp"
#include "evcharge/mpc.hpp"
#include "evcharge/rl.hpp"
#include "evcharge/sac.hpp"
#include "evcharge/site.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace evcharge {

// ---------------------------------------------------------------------------
// Metrics

struct MetricsReport {
    std::string scenario;
    std::string strategy;
    std::uint64_t seed = 0;
    double co2_kg = 0.0;
    std::optional<double> ci_g_per_kwh;
    std::optional<double> satisfaction_pct;
    double overload_kwh = 0.0;
    double charged_kwh = 0.0;
    double discharged_kwh = 0.0;
    double re_ratio = 0.0;  ///< share of local renewable generation used by EVs; 0 without renewables
    int dropped_arrivals = 0;
    std::optional<double> wall_time_s;

    double reward = 0.0;  ///< undiscounted episode reward under the run's weights
    std::string error;    ///< set when the episode failed; metrics are then meaningless
};

/// 100 * mean(min(final / target, 1)); empty input gives no value.
std::optional<double> user_satisfaction(const std::vector<std::pair<double, double>>& final_and_target);

/// Mean and sample standard deviation (n - 1); one sample gives std 0.
struct Stat {
    double mean = 0.0;
    double std = 0.0;
    int n = 0;
};

Stat summarize(const std::vector<double>& values);

struct AggregateRow {
    std::string scenario;
    std::string strategy;
    int runs = 0;
    Stat co2_kg, ci_g_per_kwh, satisfaction_pct, overload_kwh, charged_kwh, discharged_kwh, re_ratio,
        dropped_arrivals, reward;
};

/// One (scenario, strategy) group. Throws std::invalid_argument on an empty
/// or mixed group. Optional metrics are averaged over the rows that have them.
AggregateRow aggregate_group(const std::vector<MetricsReport>& rows);

/// Groups rows by (scenario, strategy) in first-seen order; failed rows are skipped.
std::vector<AggregateRow> aggregate_runs(const std::vector<MetricsReport>& rows);

// ---------------------------------------------------------------------------
// Strategies

/// The default line-up: six heuristics and both MPC modes; "SAC" is added
/// when a policy is configured.
std::vector<std::string> default_strategies();

struct StrategyOptions {
    HeuristicSpec heuristic;  ///< kind is overwritten per strategy
    MpcParams mpc;            ///< mode is overwritten per strategy
    std::shared_ptr<const PolicyArtifact> policy;
    std::uint64_t random_seed = 0;
};

/// Accepts the heuristic names, MPC-G2V, MPC-V2G, SAC, Random and Idle
/// (case-insensitive). Returns empty for an unknown name.
std::optional<std::string> canonical_strategy(std::string_view name);

/// Throws ConfigError for unknown names or SAC without a policy.
ControllerPtr make_controller(const std::string& name, const StrategyOptions& options);

// ---------------------------------------------------------------------------
// Episodes

struct TraceRow {
    int step = 0;
    double site_kw = 0.0;
    double ev_charge_kw = 0.0;
    double ev_discharge_kw = 0.0;
    double grid_import_ev_kw = 0.0;
    double overload_kw = 0.0;
    double renewables_available_kw = 0.0;
    double renewables_used_kw = 0.0;
    double curtailed_kw = 0.0;
    double carbon_intensity = 0.0;
    double emission_kg = 0.0;
    double reward = 0.0;
    int connected = 0;
};

struct EpisodeOptions {
    RewardWeights reward;
    EmissionOptions emissions;
    bool timing = false;
    bool trace = false;
};

struct EpisodeResult {
    MetricsReport report;
    std::vector<TraceRow> trace;
};

EpisodeResult run_episode(const ScenarioConfig& config, std::shared_ptr<const SiteProfiles> profiles,
                          const SessionPlan& plan, Controller& controller, const EpisodeOptions& options);

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace);

// ---------------------------------------------------------------------------
// Matrix

struct MatrixSpec {
    ScenarioConfig base;
    std::vector<ScenarioSpec> scenarios;
    std::vector<std::string> strategies;
    int runs = 10;
    std::uint64_t base_seed = 0;
    int workers = 1;
    StrategyOptions strategy_options;
    EpisodeOptions episode;
    ProfileSources sources;
    std::optional<std::filesystem::path> trace_dir;
};

/// |scenarios| * |strategies| * runs rows ordered by scenario, strategy and
/// run. Run k of every strategy and scenario uses seed base_seed + k, so all
/// strategies see the same sessions. A failed episode yields a row with
/// `error` set; the rest of the matrix still runs.
std::vector<MetricsReport> run_matrix(const MatrixSpec& spec);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { RewardAblation, WCo2, Penetration, Demand };

std::string_view to_string(SweepAxis axis);
std::optional<SweepAxis> parse_sweep_axis(std::string_view text);

struct SweepSpec {
    SweepAxis axis = SweepAxis::RewardAblation;
    /// Axis values; empty selects the defaults (four variants, {1, 3, 5, 10},
    /// {0, 0.25, 0.5, 0.75}, {Low, Medium, High}).
    std::vector<double> values;
    SourceMix penetration_mix = SourceMix::Wind;
    /// When set, RL strategies are retrained for every arm with that arm's
    /// reward weights on the first scenario of the matrix.
    std::optional<sac::SacConfig> retrain;
    int rl_horizon = 20;
};

struct SweepArm {
    std::string label;
    std::vector<MetricsReport> rows;
};

struct DeltaRow {
    std::string arm;
    std::string scenario;
    std::string strategy;
    double co2_kg = 0.0;
    double ci_g_per_kwh = 0.0;
    double satisfaction_pct = 0.0;
    double overload_kwh = 0.0;
    double charged_kwh = 0.0;
    double discharged_kwh = 0.0;
    double re_ratio = 0.0;
    double reward = 0.0;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::RewardAblation;
    std::string baseline;
    std::vector<SweepArm> arms;
    std::vector<DeltaRow> deltas;  ///< arm mean minus baseline mean, per scenario and strategy
};

/// Labels of the arms for `spec`, in order, and the baseline label.
std::pair<std::vector<std::string>, std::string> sweep_arms(const SweepSpec& spec);

SweepResult sweep(const MatrixSpec& matrix, const SweepSpec& spec);

// ---------------------------------------------------------------------------
// Reports

/// Columns: scenario, strategy, seed, co2_kg, ci_g_per_kwh, satisfaction_pct,
/// overload_kwh, charged_kwh, discharged_kwh, re_ratio, dropped_arrivals,
/// wall_time_s. Missing values are written as empty fields.
void write_report_csv(const std::filesystem::path& path, const std::vector<MetricsReport>& rows);

/// Nested scenario -> strategy -> {runs, mean, std}.
void write_report_json(const std::filesystem::path& path, const std::vector<MetricsReport>& rows);

/// Long format: scenario, strategy, metric, mean, std.
void write_plot_csv(const std::filesystem::path& path, const std::vector<AggregateRow>& rows);

void write_delta_csv(const std::filesystem::path& path, const std::vector<DeltaRow>& rows);

}  // namespace evcharge
