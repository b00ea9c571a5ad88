#pragma once

#include "evcharge/profiles.hpp"
#include "evcharge/scenario.hpp"
#include "evcharge/types.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace evcharge {

/// Exogenous signals aligned on the episode grid. Renewable series are already
/// scaled by their penetration multipliers.
struct SiteProfiles {
    TimeSeries inflexible_kw;
    TimeSeries pv_kw;
    TimeSeries wind_kw;
    TimeSeries carbon_intensity;  ///< kgCO2/kWh
    TimeSeries dr_reduction_kw;
    TimeSeries price_charge;
    TimeSeries price_discharge;

    Eigen::Index steps() const { return inflexible_kw.size(); }
};

/// Checks that every series covers `steps` and shares the step duration.
void validate(const SiteProfiles& profiles, Eigen::Index steps, double step_hours);

/// Exogenous values at one step.
struct Exogenous {
    double inflexible_kw = 0.0;
    double pv_kw = 0.0;
    double wind_kw = 0.0;
    double carbon_intensity = 0.0;
    double dr_reduction_kw = 0.0;

    double renewables_kw() const { return pv_kw + wind_kw; }
};

Exogenous exogenous_at(const SiteProfiles& profiles, Eigen::Index t);

// ---------------------------------------------------------------------------
// Site physics

/// Commanded port current; positive charges the vehicle.
struct PortCommand {
    double current_a = 0.0;
};

/// P = eta * I * V * sqrt(phases), in kW, sign preserved.
double evse_power(PortCommand cmd, double voltage, int phases, double efficiency);

/// Inverse of evse_power: the current that yields `power_kw`.
double evse_current(double power_kw, double voltage, int phases, double efficiency);

/// Scales every current by one common factor when the signed sum leaves
/// [min_a, max_a], putting the sum on the violated bound.
Vector normalize_station_currents(const Vector& currents_a, double max_a, double min_a);

/// Per-vehicle state while plugged in.
struct EvState {
    EvSession session;
    double soc = 0.0;
    double energy_charged_kwh = 0.0;
    double energy_discharged_kwh = 0.0;
};

EvState make_ev_state(const EvSession& session);

/// Two-stage SoC update. Below the CV threshold (and for all discharging) the
/// update is linear; at or above it, charging approaches 1 exponentially. The
/// result is clamped to [0, 1] and only energy that actually moved is added to
/// the cumulative counters.
EvState soc_step(const EvState& ev, double power_kw, double dt_hours);

/// Net site power seen by the transformer (may be negative).
double site_balance(const Vector& ev_powers_kw, double inflexible_kw, double pv_kw, double wind_kw);

/// max(0, P_site - (P_max - P_DR)).
double transformer_overload(double site_power_kw, double capacity_kw, double dr_reduction_kw);

/// Behind-the-meter allocation of renewables against EV charging demand.
struct GridImport {
    double import_kw = 0.0;
    double curtailed_kw = 0.0;
    double renewables_used_kw = 0.0;
};

GridImport ev_grid_import(double ev_charge_kw, double pv_kw, double wind_kw);

/// Normalised action to commanded port power: positive actions scale the
/// charge rating, negative ones the discharge rating.
double map_action(double action, double max_charge_kw, double max_discharge_kw);

// ---------------------------------------------------------------------------
// Episode stepping

struct DepartedEv {
    EvSession session;
    double final_soc = 0.0;
    int port = -1;
};

struct SimState {
    int step = 0;
    std::vector<std::optional<EvState>> ports;
    double last_total_power_kw = 0.0;  ///< EV-only aggregate commanded power of the previous step
    double overload_kwh = 0.0;
    double curtailed_kwh = 0.0;
    std::vector<DepartedEv> departed;
};

struct StepResult {
    int step = 0;
    Vector commanded_kw;  ///< after station normalisation
    Vector ev_power_kw;   ///< power that actually moved into (+) or out of (-) batteries
    double ev_charge_kw = 0.0;
    double ev_discharge_kw = 0.0;
    double site_kw = 0.0;
    double grid_import_ev_kw = 0.0;
    double net_grid_import_ev_kw = 0.0;  ///< import after netting V2G export, clamped at 0
    double overload_kw = 0.0;
    double curtailed_kw = 0.0;
    double renewables_available_kw = 0.0;
    double renewables_used_kw = 0.0;
    double served_kwh = 0.0;
    double discharged_kwh = 0.0;
    double clipped_kwh = 0.0;  ///< commanded charge energy the batteries did not absorb
    double carbon_intensity = 0.0;
    double dt_hours = 0.25;
    std::vector<DepartedEv> departures;  ///< vehicles leaving at the end of this step
};

/// Advances one site through an episode. Owns its state; profiles are shared
/// read-only between simulators.
class Simulator {
public:
    Simulator(ScenarioConfig config, std::shared_ptr<const SiteProfiles> profiles, SessionPlan plan);

    const SimState& state() const { return state_; }
    const ScenarioConfig& config() const { return config_; }
    const SiteProfiles& profiles() const { return *profiles_; }
    std::shared_ptr<const SiteProfiles> shared_profiles() const { return profiles_; }
    const SessionPlan& plan() const { return plan_; }

    int step_index() const { return state_.step; }
    bool done() const { return state_.step >= config_.episode_steps; }
    Exogenous exogenous() const;

    /// Applies one action per port. Throws std::invalid_argument on a length
    /// mismatch and RuntimeFailure when called after the episode ended.
    StepResult step(const ActionVector& actions);

private:
    void admit_arrivals(int step);

    ScenarioConfig config_;
    std::shared_ptr<const SiteProfiles> profiles_;
    SessionPlan plan_;
    SimState state_;
    std::size_t next_session_ = 0;
};

}  // namespace evcharge
