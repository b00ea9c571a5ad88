#pragma once

#include "evcharge/controller.hpp"
#include "evcharge/emissions.hpp"
#include "evcharge/engine.hpp"

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace evcharge {

// ---------------------------------------------------------------------------
// Observation

/// 2 + n_tr * (3 + 3H) + H + 2 * n_ports.
int state_length(int n_transformers, int horizon, int n_ports);

/// Flat observation:
///   [t, P_tot(t-1)]
///   ++ [L, PV, W] / 100 ++ forecasts of L, PV, W over H / 100
///   ++ carbon-intensity forecast over H, in g/kWh / 1000
///   ++ per port [SoC, steps to departure]; an empty port gives (0, 0).
/// The site has one transformer.
StateVector build_state(const Simulator& sim, int horizon);

// ---------------------------------------------------------------------------
// Reward

struct RewardWeights {
    double w_discharge = 50.0;
    double w_co2 = 5.0;
    double w_sat = 50.0;
    double sat_threshold = 0.8;
    /// Count curtailed renewable energy as discharged energy.
    bool curtailment_in_discharge_term = true;
};

void validate(const RewardWeights& weights);

enum class RewardVariant { Full, NoCarbon, NoSatisfaction, NoDischarge };

std::string_view to_string(RewardVariant variant);
std::optional<RewardVariant> parse_reward_variant(std::string_view text);

/// `weights` with the ablated term's weight set to zero.
RewardWeights apply_variant(RewardWeights weights, RewardVariant variant);

/// Mean of min(final / target, 1) over the vehicles leaving this step; empty
/// when nobody leaves.
std::optional<double> departure_satisfaction(const std::vector<DepartedEv>& departures);

/// W_sat * (threshold - S) below the threshold, else 0. No departures, no penalty.
double satisfaction_penalty(std::optional<double> satisfaction, const RewardWeights& weights);

struct RewardTerms {
    double discharge = 0.0;     ///< W_D * E_discharged
    double carbon = 0.0;        ///< W_CO2 * (E_CO2 / max(E_served, 0.1)) * E_served
    double satisfaction = 0.0;  ///< satisfaction_penalty
    double reward = 0.0;        ///< -(discharge + carbon + satisfaction)
};

RewardTerms reward_terms(const StepResult& step, double emission_kg, std::optional<double> satisfaction,
                         const RewardWeights& weights);

double compute_reward(const StepResult& step, double emission_kg, std::optional<double> satisfaction,
                      const RewardWeights& weights);

// ---------------------------------------------------------------------------
// Environment

struct EnvConfig {
    ScenarioConfig scenario;
    std::shared_ptr<const SiteProfiles> profiles;
    RewardWeights reward;
    EmissionOptions emissions;
    int horizon = 20;
};

struct EnvStep {
    StateVector state;
    double reward = 0.0;
    bool done = false;
    RewardTerms terms;
    double emission_kg = 0.0;
    StepResult result;
};

/// Gym-style wrapper: engine step, emission, reward.
class EvChargingEnv {
public:
    explicit EvChargingEnv(EnvConfig config);

    StateVector reset(std::uint64_t seed);
    EnvStep step(const ActionVector& action);

    bool done() const { return !sim_ || sim_->done(); }
    const Simulator& simulator() const;
    const EnvConfig& config() const { return config_; }
    int state_size() const { return state_length(1, config_.horizon, config_.scenario.n_ports); }
    int action_size() const { return config_.scenario.n_ports; }

private:
    EnvConfig config_;
    std::unique_ptr<Simulator> sim_;
};

/// Uniform random actions on [-1, 1]; the untrained-agent baseline.
class RandomController final : public Controller {
public:
    explicit RandomController(std::uint64_t seed) : seed_(seed), rng_(seed) {}

    std::string name() const override { return "Random"; }
    ActionVector act(const Simulator& sim) override;
    void reset() override { rng_ = Rng(seed_); }

private:
    std::uint64_t seed_;
    Rng rng_;
};

}  // namespace evcharge
