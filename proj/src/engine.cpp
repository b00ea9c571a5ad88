#include "evcharge/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evcharge {

void validate(const SiteProfiles& p, Eigen::Index steps, double step_hours) {
    const std::pair<const TimeSeries*, const char*> all[] = {
        {&p.inflexible_kw, "inflexible_load"}, {&p.pv_kw, "solar"},
        {&p.wind_kw, "wind"},                   {&p.carbon_intensity, "carbon_intensity"},
        {&p.dr_reduction_kw, "demand_response"}, {&p.price_charge, "price_charge"},
        {&p.price_discharge, "price_discharge"}};
    for (const auto& [series, name] : all) {
        validate(*series, name);
        if (series->size() < steps)
            throw DataError(std::string(name) + ": covers " + std::to_string(series->size()) + " steps, episode needs " +
                            std::to_string(steps));
        if (std::abs(series->step_hours - step_hours) > 1e-12)
            throw DataError(std::string(name) + ": step duration differs from the episode grid");
    }
}

Exogenous exogenous_at(const SiteProfiles& p, Eigen::Index t) {
    return {p.inflexible_kw[t], p.pv_kw[t], p.wind_kw[t], p.carbon_intensity[t], p.dr_reduction_kw[t]};
}

double evse_power(PortCommand cmd, double voltage, int phases, double efficiency) {
    return efficiency * cmd.current_a * voltage * std::sqrt(static_cast<double>(phases)) / 1000.0;
}

double evse_current(double power_kw, double voltage, int phases, double efficiency) {
    return power_kw * 1000.0 / (efficiency * voltage * std::sqrt(static_cast<double>(phases)));
}

Vector normalize_station_currents(const Vector& currents_a, double max_a, double min_a) {
    const double total = currents_a.sum();
    if (total > max_a && total > 0.0) return currents_a * (max_a / total);
    if (total < min_a && total < 0.0) return currents_a * (min_a / total);
    return currents_a;
}

EvState make_ev_state(const EvSession& session) {
    EvState ev;
    ev.session = session;
    ev.soc = session.initial_soc;
    return ev;
}

EvState soc_step(const EvState& ev, double power_kw, double dt_hours) {
    EvState out = ev;
    const double capacity = ev.session.battery_capacity_kwh;
    const double tau = ev.session.cv_threshold;
    const double energy = power_kw * dt_hours;

    double soc = ev.soc;
    if (power_kw > 0.0 && tau < 1.0 && ev.soc >= tau) {
        soc = 1.0 + (ev.soc - 1.0) * std::exp(energy / (capacity * (tau - 1.0)));
    } else {
        soc = ev.soc + energy / capacity;
    }
    soc = std::clamp(soc, 0.0, 1.0);

    const double moved = (soc - ev.soc) * capacity;
    if (moved > 0.0) out.energy_charged_kwh += moved;
    if (moved < 0.0) out.energy_discharged_kwh -= moved;
    out.soc = soc;
    return out;
}

double site_balance(const Vector& ev_powers_kw, double inflexible_kw, double pv_kw, double wind_kw) {
    return ev_powers_kw.sum() + inflexible_kw - pv_kw - wind_kw;
}

double transformer_overload(double site_power_kw, double capacity_kw, double dr_reduction_kw) {
    return std::max(0.0, site_power_kw - (capacity_kw - dr_reduction_kw));
}

GridImport ev_grid_import(double ev_charge_kw, double pv_kw, double wind_kw) {
    const double supply = pv_kw + wind_kw;
    GridImport out;
    out.import_kw = std::max(0.0, ev_charge_kw - supply);
    out.curtailed_kw = std::max(0.0, supply - ev_charge_kw);
    out.renewables_used_kw = std::min(ev_charge_kw, supply);
    return out;
}

double map_action(double action, double max_charge_kw, double max_discharge_kw) {
    if (!std::isfinite(action)) return 0.0;
    action = std::clamp(action, -1.0, 1.0);
    return action >= 0.0 ? action * max_charge_kw : action * max_discharge_kw;
}

// ---------------------------------------------------------------------------

Simulator::Simulator(ScenarioConfig config, std::shared_ptr<const SiteProfiles> profiles, SessionPlan plan)
    : config_(std::move(config)), profiles_(std::move(profiles)), plan_(std::move(plan)) {
    if (!profiles_) throw std::invalid_argument("Simulator needs site profiles");
    if (auto v = validate_config(config_); !v.empty())
        throw ConfigError("invalid scenario config: " + v.front().field + " " + v.front().message);
    validate(*profiles_, config_.episode_steps, config_.step_hours);

    std::stable_sort(plan_.sessions.begin(), plan_.sessions.end(),
                     [](const EvSession& a, const EvSession& b) { return a.arrival_step < b.arrival_step; });
    for (const auto& s : plan_.sessions) {
        if (s.port < 0 || s.port >= config_.n_ports)
            throw DataError("session " + std::to_string(s.id) + " has port outside the site");
        if (!(s.arrival_step >= 0 && s.arrival_step < s.departure_step && s.departure_step <= config_.episode_steps))
            throw DataError("session " + std::to_string(s.id) + " has an invalid plug-in window");
        if (!(s.battery_capacity_kwh > 0.0 && 0.0 <= s.initial_soc && s.initial_soc <= s.target_soc &&
              s.target_soc <= 1.0 && s.cv_threshold > 0.0 && s.cv_threshold <= 1.0))
            throw DataError("session " + std::to_string(s.id) + " has invalid battery parameters");
    }
    state_.ports.assign(static_cast<std::size_t>(config_.n_ports), std::nullopt);
    admit_arrivals(0);
}

Exogenous Simulator::exogenous() const {
    return exogenous_at(*profiles_, std::min(state_.step, config_.episode_steps - 1));
}

void Simulator::admit_arrivals(int step) {
    while (next_session_ < plan_.sessions.size() && plan_.sessions[next_session_].arrival_step <= step) {
        const auto& s = plan_.sessions[next_session_++];
        auto& slot = state_.ports[static_cast<std::size_t>(s.port)];
        if (slot) throw DataError("two sessions share port " + std::to_string(s.port) + " at step " +
                                  std::to_string(step));
        slot = make_ev_state(s);
    }
}

StepResult Simulator::step(const ActionVector& actions) {
    if (done()) throw RuntimeFailure("step called after the episode finished");
    if (actions.size() != config_.n_ports)
        throw std::invalid_argument("action length " + std::to_string(actions.size()) + " does not match " +
                                    std::to_string(config_.n_ports) + " ports");

    const int t = state_.step;
    const double dt = config_.step_hours;
    const auto n = static_cast<Eigen::Index>(config_.n_ports);

    StepResult r;
    r.step = t;
    r.dt_hours = dt;

    // Action -> commanded current, then the aggregate station limit.
    Vector currents = Vector::Zero(n);
    for (Eigen::Index p = 0; p < n; ++p) {
        if (!state_.ports[static_cast<std::size_t>(p)]) continue;
        const double power = map_action(actions[p], config_.evse_max_charge_kw, config_.evse_max_discharge_kw);
        const double eta = power >= 0.0 ? config_.charge_efficiency : config_.discharge_efficiency;
        currents[p] = evse_current(power, config_.voltage, config_.phases, eta);
    }
    currents = normalize_station_currents(currents, config_.station_current_max_a(), config_.station_current_min_a());

    r.commanded_kw = Vector::Zero(n);
    r.ev_power_kw = Vector::Zero(n);
    for (Eigen::Index p = 0; p < n; ++p) {
        auto& slot = state_.ports[static_cast<std::size_t>(p)];
        if (!slot) continue;
        const double eta = currents[p] >= 0.0 ? config_.charge_efficiency : config_.discharge_efficiency;
        const double commanded = evse_power(PortCommand{currents[p]}, config_.voltage, config_.phases, eta);
        r.commanded_kw[p] = commanded;

        const EvState next = soc_step(*slot, commanded, dt);
        const double moved_kwh = (next.soc - slot->soc) * slot->session.battery_capacity_kwh;
        r.ev_power_kw[p] = moved_kwh / dt;
        if (moved_kwh > 0.0) r.served_kwh += moved_kwh;
        if (moved_kwh < 0.0) r.discharged_kwh -= moved_kwh;
        if (commanded > 0.0) r.clipped_kwh += commanded * dt - std::max(0.0, moved_kwh);
        *slot = next;
    }

    const Exogenous ex = exogenous_at(*profiles_, t);
    r.carbon_intensity = ex.carbon_intensity;
    r.ev_charge_kw = r.ev_power_kw.cwiseMax(0.0).sum();
    r.ev_discharge_kw = -r.ev_power_kw.cwiseMin(0.0).sum();
    r.site_kw = site_balance(r.ev_power_kw, ex.inflexible_kw, ex.pv_kw, ex.wind_kw);
    r.overload_kw = transformer_overload(r.site_kw, config_.transformer_capacity_kw, ex.dr_reduction_kw);

    const GridImport g = ev_grid_import(r.ev_charge_kw, ex.pv_kw, ex.wind_kw);
    r.grid_import_ev_kw = g.import_kw;
    r.curtailed_kw = g.curtailed_kw;
    r.renewables_used_kw = g.renewables_used_kw;
    r.renewables_available_kw = ex.renewables_kw();
    r.net_grid_import_ev_kw = std::max(0.0, g.import_kw - r.ev_discharge_kw);

    state_.last_total_power_kw = r.commanded_kw.sum();
    state_.overload_kwh += r.overload_kw * dt;
    state_.curtailed_kwh += r.curtailed_kw * dt;

    // Advance the clock: vehicles whose window closes leave, new ones plug in.
    state_.step = t + 1;
    for (std::size_t p = 0; p < state_.ports.size(); ++p) {
        auto& slot = state_.ports[p];
        if (slot && slot->session.departure_step <= state_.step) {
            DepartedEv d{slot->session, slot->soc, static_cast<int>(p)};
            r.departures.push_back(d);
            state_.departed.push_back(d);
            slot.reset();
        }
    }
    if (!done()) admit_arrivals(state_.step);
    return r;
}

}  // namespace evcharge
