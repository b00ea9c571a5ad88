#pragma once

#include "evcharge/controller.hpp"
#include "evcharge/lp.hpp"

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace evcharge {

enum class MpcMode { G2V, V2G };

std::string_view to_string(MpcMode mode);

struct MpcParams {
    MpcMode mode = MpcMode::G2V;
    int horizon = 20;
    double lambda_emission = 5.0;
    double slack_penalty = 100.0;      ///< per kWh of unmet departure energy
    double overload_penalty = 1.0e4;   ///< per kWh above usable transformer capacity
    std::optional<TimeSeries> setpoint_kw;  ///< G2V tracking target; zero when absent
    int max_cut_rounds = 50;           ///< V2G: rounds of lazily added SoC rows
};

void validate(const MpcParams& params);

/// A connected vehicle as the optimiser sees it.
struct MpcEv {
    int port = -1;
    double soc = 0.0;
    double capacity_kwh = 1.0;
    double target_soc = 0.85;
    int steps_left = 1;  ///< departure_step - t

    double need_kwh() const { return std::max(0.0, target_soc - soc) * capacity_kwh; }
};

/// Everything one horizon solve needs; forecasts are aligned at index 0 = now.
struct MpcInputs {
    int horizon = 1;
    double dt_hours = 0.25;
    double max_charge_kwh = 5.5;     ///< per port per step
    double max_discharge_kwh = 5.5;
    double station_charge_kwh = std::numeric_limits<double>::infinity();  ///< per step, aggregate
    double station_discharge_kwh = std::numeric_limits<double>::infinity();
    double transformer_kw = 100.0;
    Vector carbon_intensity;  ///< kg/kWh
    Vector inflexible_kw;
    Vector renewables_kw;
    Vector dr_reduction_kw;
    Vector price_charge;
    Vector price_discharge;
    Vector setpoint_kw;
    std::vector<MpcEv> evs;
};

/// Collects the current observation. Forecasts are perfect-foresight windows
/// truncated at the end of the episode.
MpcInputs mpc_inputs(const Simulator& sim, const MpcParams& params);

/// Variable layout of one horizon LP. Index -1 marks a step the vehicle is gone.
struct HorizonProblem {
    lp::Problem<double> lp{lp::Sense::Minimize};
    std::vector<std::vector<int>> charge;     ///< [ev][h]
    std::vector<std::vector<int>> discharge;  ///< [ev][h]; empty in G2V
    std::vector<int> overload;                ///< [h], kWh above usable capacity
    std::vector<int> tracking;                ///< [h], G2V only
    std::vector<int> shortfall;               ///< [ev]
    /// Energy the vehicle must still receive inside the horizon.
    std::vector<double> required_kwh;
};

/// Builds the LP. V2G intermediate SoC rows are left out; solve_horizon adds
/// the ones an optimum violates.
HorizonProblem build_horizon_problem(MpcMode mode, const MpcInputs& in, const MpcParams& params);

struct MpcPlan {
    lp::Status status = lp::Status::Optimal;
    Matrix net_kwh;  ///< [ev][h] charge minus discharge
    Vector overload_kwh;
    double objective = 0.0;
    double emission_term = 0.0;  ///< sum_h I_h * net energy, kg
    int lp_iterations = 0;
};

MpcPlan solve_horizon(const MpcInputs& in, const MpcParams& params);

/// Step-0 energies of `plan` as normalised port actions.
ActionVector plan_to_action(const MpcPlan& plan, const MpcInputs& in, int n_ports);

/// Solve, net, and keep the first step. A failed solve yields zero action.
ActionVector mpc_act(const MpcInputs& in, const MpcParams& params, int n_ports, lp::Status* status = nullptr);

class MpcController final : public Controller {
public:
    explicit MpcController(MpcParams params);

    std::string name() const override { return params_.mode == MpcMode::G2V ? "MPC-G2V" : "MPC-V2G"; }
    ActionVector act(const Simulator& sim) override;
    void reset() override { failures_ = 0; }

    int failures() const { return failures_; }

private:
    MpcParams params_;
    int failures_ = 0;
};

}  // namespace evcharge
