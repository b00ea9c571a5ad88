#pragma once

#include "evcharge/bench.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evcharge {

/// Everything a CLI run needs, parsed from one JSON document.
///
/// Top-level keys: scenario, profiles, ci_unit, scenarios, strategies, reward,
/// heuristic, mpc, emissions, rl, benchmark, sweep. Every block is optional
/// and unknown keys are rejected.
struct RunConfig {
    ScenarioConfig scenario = default_scenario_config();
    std::vector<ScenarioSpec> scenarios = default_scenario_set();
    ProfileSources sources;
    std::vector<std::string> strategies;  ///< empty: default_strategies(), plus SAC with a policy
    RewardWeights reward;
    HeuristicSpec heuristic;
    MpcParams mpc;
    EmissionOptions emissions;

    int rl_horizon = 20;
    std::optional<std::filesystem::path> policy;
    sac::SacConfig train;
    /// Scenario the agent is trained on; defaults to 50% Hybrid.
    PenetrationSpec train_penetration{0.5, SourceMix::Hybrid, 0.5};

    int runs = 10;
    int workers = 1;
    std::uint64_t seed = 0;
    bool timing = false;

    SweepSpec sweep;
    bool retrain_in_sweep = false;
};

/// Parses a JSON document. Relative file paths resolve against `base_dir`.
/// Throws ConfigError with the offending key on any problem, and DataError
/// when a referenced profile file is malformed.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir = ".");

RunConfig load_run_config(const std::filesystem::path& path);

/// Strategy list after defaults are applied.
std::vector<std::string> resolved_strategies(const RunConfig& config);

/// Matrix spec for `config`, loading the policy file when SAC is requested.
MatrixSpec make_matrix_spec(const RunConfig& config);

/// Environment for training or evaluating the agent on one scenario.
EnvConfig make_env_config(const RunConfig& config, const PenetrationSpec& penetration);

/// Every violation in the configuration, each prefixed with its key; empty
/// when the configuration is usable.
std::vector<std::string> check_run_config(const RunConfig& config);

}  // namespace evcharge
