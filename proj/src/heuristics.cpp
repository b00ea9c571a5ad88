#include "evcharge/heuristics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace evcharge {

std::string_view to_string(HeuristicKind kind) {
    switch (kind) {
        case HeuristicKind::Afap: return "AFAP";
        case HeuristicKind::AfapPlus: return "AFAP+";
        case HeuristicKind::AfapStar: return "AFAP*";
        case HeuristicKind::Alap: return "ALAP";
        case HeuristicKind::Fsb: return "FSB";
        case HeuristicKind::RoundRobin: return "RR";
    }
    return "?";
}

std::optional<HeuristicKind> parse_heuristic(std::string_view name) {
    std::string up(name);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
    if (up == "AFAP") return HeuristicKind::Afap;
    if (up == "AFAP+" || up == "AFAP_PLUS") return HeuristicKind::AfapPlus;
    if (up == "AFAP*" || up == "AFAP_STAR") return HeuristicKind::AfapStar;
    if (up == "ALAP") return HeuristicKind::Alap;
    if (up == "FSB") return HeuristicKind::Fsb;
    if (up == "RR" || up == "ROUND_ROBIN") return HeuristicKind::RoundRobin;
    return std::nullopt;
}

void validate(const HeuristicSpec& spec) {
    if (spec.power_cap_kw && !(*spec.power_cap_kw >= 0.0)) throw ConfigError("heuristic.power_cap must be >= 0");
    if (!(spec.stop_soc > 0.0 && spec.stop_soc <= 1.0)) throw ConfigError("heuristic.stop_soc must lie in (0, 1]");
    if (spec.start_step && *spec.start_step < 0) throw ConfigError("heuristic.start_step must be >= 0");
    if (spec.rr_budget_kw && !(*spec.rr_budget_kw > 0.0)) throw ConfigError("heuristic.rr_budget must be > 0");
}

namespace {

bool below_target(const EvState& ev) { return ev.soc < ev.session.target_soc; }

ActionVector afap(const Simulator& sim, double stop_soc) {
    const auto& ports = sim.state().ports;
    ActionVector a = ActionVector::Zero(static_cast<Eigen::Index>(ports.size()));
    for (std::size_t p = 0; p < ports.size(); ++p) {
        if (ports[p] && below_target(*ports[p]) && ports[p]->soc < stop_soc) a[static_cast<Eigen::Index>(p)] = 1.0;
    }
    return a;
}

}  // namespace

int default_fsb_start_step(const ScenarioConfig& config) {
    const double hours = std::fmod(10.0 - config.start_hour + 24.0, 24.0);
    return static_cast<int>(std::lround(hours / config.step_hours));
}

ActionVector afap_family_act(const HeuristicSpec& spec, const Simulator& sim) {
    const auto& config = sim.config();
    switch (spec.kind) {
        case HeuristicKind::Afap: return afap(sim, 1.0 + 1e-12);
        case HeuristicKind::AfapStar: return afap(sim, spec.stop_soc);
        case HeuristicKind::AfapPlus: {
            ActionVector a = afap(sim, 1.0 + 1e-12);
            const double cap = spec.power_cap_kw.value_or(config.transformer_capacity_kw);
            const double requested = a.sum() * config.evse_max_charge_kw;
            if (requested > cap) a *= cap / requested;
            return a;
        }
        case HeuristicKind::Fsb: {
            const int start = spec.start_step.value_or(default_fsb_start_step(config));
            if (sim.step_index() < start) return ActionVector::Zero(config.n_ports);
            return afap(sim, 1.0 + 1e-12);
        }
        default: throw std::invalid_argument("afap_family_act: not an AFAP-family heuristic");
    }
}

int alap_needed_steps(double need_kwh, double max_kw, double dt_hours) {
    if (need_kwh <= 0.0) return 0;
    return static_cast<int>(std::ceil(need_kwh / (max_kw * dt_hours) - 1e-9));
}

ActionVector alap_act(const Simulator& sim) {
    const auto& config = sim.config();
    const auto& ports = sim.state().ports;
    const int t = sim.step_index();
    ActionVector a = ActionVector::Zero(config.n_ports);
    for (std::size_t p = 0; p < ports.size(); ++p) {
        if (!ports[p]) continue;
        const double need = ports[p]->session.energy_to_target_kwh(ports[p]->soc);
        const int needed = alap_needed_steps(need, config.evse_max_charge_kw, config.step_hours);
        if (needed > 0 && ports[p]->session.departure_step - t <= needed) a[static_cast<Eigen::Index>(p)] = 1.0;
    }
    return a;
}

ActionVector round_robin_act(const Simulator& sim, double budget_kw) {
    const auto& config = sim.config();
    const auto& ports = sim.state().ports;
    const int n = config.n_ports;
    ActionVector a = ActionVector::Zero(n);
    double left = std::max(0.0, budget_kw);
    for (int i = 0; i < n && left > 0.0; ++i) {
        const int p = (sim.step_index() + i) % n;
        const auto& slot = ports[static_cast<std::size_t>(p)];
        if (!slot || !below_target(*slot)) continue;
        const double grant = std::min(left, config.evse_max_charge_kw);
        a[p] = grant / config.evse_max_charge_kw;
        left -= grant;
    }
    return a;
}

HeuristicController::HeuristicController(HeuristicSpec spec) : spec_(spec) { validate(spec_); }

ActionVector HeuristicController::act(const Simulator& sim) {
    switch (spec_.kind) {
        case HeuristicKind::Alap: return alap_act(sim);
        case HeuristicKind::RoundRobin: {
            const double budget =
                spec_.rr_budget_kw.value_or(sim.config().transformer_capacity_kw - sim.exogenous().inflexible_kw);
            return round_robin_act(sim, budget);
        }
        default: return afap_family_act(spec_, sim);
    }
}

}  // namespace evcharge
