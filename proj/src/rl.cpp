#include "evcharge/rl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evcharge {

int state_length(int n_transformers, int horizon, int n_ports) {
    return 2 + n_transformers * (3 + 3 * horizon) + horizon + 2 * n_ports;
}

StateVector build_state(const Simulator& sim, int horizon) {
    if (horizon < 1) throw std::invalid_argument("build_state: horizon must be >= 1");
    const auto& st = sim.state();
    const auto& prof = sim.profiles();
    const int n_ports = sim.config().n_ports;
    const int t = std::min(st.step, static_cast<int>(prof.steps()) - 1);

    StateVector s(state_length(1, horizon, n_ports));
    Eigen::Index k = 0;
    s[k++] = st.step;
    s[k++] = st.last_total_power_kw;

    const Exogenous ex = exogenous_at(prof, t);
    s[k++] = ex.inflexible_kw / 100.0;
    s[k++] = ex.pv_kw / 100.0;
    s[k++] = ex.wind_kw / 100.0;
    for (const TimeSeries* series : {&prof.inflexible_kw, &prof.pv_kw, &prof.wind_kw}) {
        s.segment(k, horizon) = forecast_window(*series, t, horizon).values / 100.0;
        k += horizon;
    }
    // kg/kWh -> g/kWh -> /1000
    s.segment(k, horizon) = forecast_window(prof.carbon_intensity, t, horizon).values;
    k += horizon;

    for (const auto& port : st.ports) {
        if (port) {
            s[k++] = port->soc;
            s[k++] = std::max(port->session.departure_step - st.step, 0);
        } else {
            s[k++] = 0.0;
            s[k++] = 0.0;
        }
    }
    return s;
}

void validate(const RewardWeights& w) {
    if (!(w.w_discharge >= 0.0 && w.w_co2 >= 0.0 && w.w_sat >= 0.0))
        throw ConfigError("reward weights must be non-negative");
    if (!(w.sat_threshold > 0.0 && w.sat_threshold <= 1.0))
        throw ConfigError("reward.sat_threshold must lie in (0, 1]");
}

std::string_view to_string(RewardVariant v) {
    switch (v) {
        case RewardVariant::Full: return "Full";
        case RewardVariant::NoCarbon: return "NoCarbon";
        case RewardVariant::NoSatisfaction: return "NoSatisfaction";
        case RewardVariant::NoDischarge: return "NoDischarge";
    }
    return "?";
}

std::optional<RewardVariant> parse_reward_variant(std::string_view text) {
    std::string low(text);
    std::transform(low.begin(), low.end(), low.begin(), [](unsigned char c) { return std::tolower(c); });
    if (low == "full") return RewardVariant::Full;
    if (low == "nocarbon") return RewardVariant::NoCarbon;
    if (low == "nosatisfaction") return RewardVariant::NoSatisfaction;
    if (low == "nodischarge") return RewardVariant::NoDischarge;
    return std::nullopt;
}

RewardWeights apply_variant(RewardWeights w, RewardVariant v) {
    switch (v) {
        case RewardVariant::Full: break;
        case RewardVariant::NoCarbon: w.w_co2 = 0.0; break;
        case RewardVariant::NoSatisfaction: w.w_sat = 0.0; break;
        case RewardVariant::NoDischarge: w.w_discharge = 0.0; break;
    }
    return w;
}

std::optional<double> departure_satisfaction(const std::vector<DepartedEv>& departures) {
    if (departures.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& d : departures) sum += std::min(d.final_soc / d.session.target_soc, 1.0);
    return sum / static_cast<double>(departures.size());
}

double satisfaction_penalty(std::optional<double> satisfaction, const RewardWeights& w) {
    if (!satisfaction || *satisfaction >= w.sat_threshold) return 0.0;
    return w.w_sat * w.sat_threshold - w.w_sat * *satisfaction;
}

RewardTerms reward_terms(const StepResult& step, double emission_kg, std::optional<double> satisfaction,
                         const RewardWeights& w) {
    RewardTerms r;
    double discharged = step.discharged_kwh;
    if (w.curtailment_in_discharge_term) discharged += step.curtailed_kw * step.dt_hours;
    r.discharge = w.w_discharge * discharged;
    const double served = step.served_kwh;
    r.carbon = w.w_co2 * (emission_kg / std::max(served, 0.1)) * served;
    r.satisfaction = satisfaction_penalty(satisfaction, w);
    r.reward = -(r.discharge + r.carbon + r.satisfaction);
    return r;
}

double compute_reward(const StepResult& step, double emission_kg, std::optional<double> satisfaction,
                      const RewardWeights& weights) {
    return reward_terms(step, emission_kg, satisfaction, weights).reward;
}

EvChargingEnv::EvChargingEnv(EnvConfig config) : config_(std::move(config)) {
    if (!config_.profiles) throw ConfigError("environment needs site profiles");
    if (config_.horizon < 1) throw ConfigError("rl.horizon must be >= 1");
    validate(config_.reward);
}

StateVector EvChargingEnv::reset(std::uint64_t seed) {
    sim_ = std::make_unique<Simulator>(config_.scenario, config_.profiles, generate_sessions(config_.scenario, seed));
    return build_state(*sim_, config_.horizon);
}

const Simulator& EvChargingEnv::simulator() const {
    if (!sim_) throw RuntimeFailure("environment used before reset");
    return *sim_;
}

EnvStep EvChargingEnv::step(const ActionVector& action) {
    if (!sim_) throw RuntimeFailure("environment stepped before reset");
    EnvStep out;
    out.result = sim_->step(action);
    out.emission_kg = step_emission(ev_grid_energy_kwh(out.result, config_.emissions), out.result.carbon_intensity);
    out.terms = reward_terms(out.result, out.emission_kg, departure_satisfaction(out.result.departures),
                             config_.reward);
    out.reward = out.terms.reward;
    out.done = sim_->done();
    out.state = build_state(*sim_, config_.horizon);
    return out;
}

ActionVector RandomController::act(const Simulator& sim) {
    ActionVector a(sim.config().n_ports);
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = rng_.uniform(-1.0, 1.0);
    return a;
}

}  // namespace evcharge
