#pragma once

#include "evcharge/types.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace evcharge {

enum class DemandLevel { Low, Medium, High };

std::string_view to_string(DemandLevel level);
DemandLevel parse_demand_level(std::string_view text);

/// Arrival-rate multiplier for a demand level (0.5, 1.0, 1.5).
double demand_scale(DemandLevel level);

/// One vehicle's plug-in window and battery parameters.
struct EvSession {
    int id = 0;
    int port = -1;
    int arrival_step = 0;    ///< first step the EV is connected
    int departure_step = 1;  ///< first step the EV is gone (exclusive)
    double battery_capacity_kwh = 30.0;
    double initial_soc = 0.4;
    double target_soc = 0.85;
    double cv_threshold = 1.0;

    bool connected_at(int step) const { return step >= arrival_step && step < departure_step; }
    double energy_to_target_kwh(double soc) const { return std::max(0.0, target_soc - soc) * battery_capacity_kwh; }

    friend bool operator==(const EvSession&, const EvSession&) = default;
};

/// Distributions behind the synthetic workplace behaviour.
struct SessionModel {
    double stay_median_hours = 6.0;
    double stay_sigma_log = 0.4;
    double initial_soc_min = 0.2;
    double initial_soc_max = 0.6;
    double target_soc = 0.85;
    double capacity_min_kwh = 10.0;
    double capacity_max_kwh = 50.0;
    double cv_threshold = 1.0;
};

/// Single contiguous transformer capacity reduction per day.
struct DemandResponseEvent {
    int start_step = 48;   ///< 17:00 for an episode starting at 05:00
    int duration_steps = 8;
    double fraction = 0.2;  ///< of transformer capacity
};

struct ScenarioConfig {
    int n_ports = 25;
    double transformer_capacity_kw = 100.0;
    int episode_steps = 96;
    double step_hours = 0.25;
    double start_hour = 5.0;

    double evse_max_charge_kw = 22.0;
    double evse_max_discharge_kw = 22.0;
    double charge_efficiency = 1.0;
    double discharge_efficiency = 1.0;
    double voltage = 400.0;
    int phases = 3;

    /// Aggregate station current window [min, max] in A. A zero max means
    /// "sum of port ratings" (non-binding); min defaults to its negative.
    double station_max_current_a = 0.0;
    double station_min_current_a = 0.0;

    DemandLevel demand_level = DemandLevel::Medium;
    /// Expected arrivals per clock hour (index 0 = 00:00-01:00) at Medium demand.
    std::array<double, 24> arrival_rate_table{};
    std::uint64_t seed = 0;

    SessionModel sessions;
    DemandResponseEvent demand_response;

    double inflexible_base_kw = 15.0;
    double inflexible_peak_kw = 45.0;

    /// Derived port and station limits.
    double port_current_limit_a() const;
    double station_current_max_a() const;
    double station_current_min_a() const;
};

/// Workplace arrival table peaking 07:00-10:00 for a 25-port lot.
std::array<double, 24> default_arrival_rates();

/// Baseline configuration; site-sized quantities scale with n_ports / 25.
ScenarioConfig default_scenario_config(int n_ports = 25);

struct ConfigViolation {
    std::string field;
    std::string message;
};

/// Every invariant of ScenarioConfig; empty when the configuration is usable.
std::vector<ConfigViolation> validate_config(const ScenarioConfig& config);

/// Expected number of arrivals over one episode at the configured demand level.
double expected_arrivals(const ScenarioConfig& config);

/// Expected energy need (kWh) of one sampled session.
double expected_session_need_kwh(const SessionModel& model);

struct SessionPlan {
    std::vector<EvSession> sessions;  ///< sorted by arrival step, then id
    int dropped_arrivals = 0;
};

/// Samples one day of sessions. Arrivals are a nonhomogeneous Poisson process
/// on the step grid; an arrival finding every port occupied is dropped. Ports
/// are assigned lowest-free-index first.
SessionPlan generate_sessions(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace evcharge
