#pragma once

#include "evcharge/controller.hpp"

#include <optional>
#include <string_view>

namespace evcharge {

enum class HeuristicKind { Afap, AfapPlus, AfapStar, Alap, Fsb, RoundRobin };

std::string_view to_string(HeuristicKind kind);
std::optional<HeuristicKind> parse_heuristic(std::string_view name);

/// Parameters for the rule-based controllers. Unset optionals take the
/// site-dependent defaults described on each field.
struct HeuristicSpec {
    HeuristicKind kind = HeuristicKind::Afap;
    std::optional<double> power_cap_kw;  ///< AFAP+; default transformer capacity
    double stop_soc = 0.8;               ///< AFAP*
    std::optional<int> start_step;       ///< FSB; default the step at 10:00
    std::optional<double> rr_budget_kw;  ///< RR; default capacity minus current inflexible load
};

/// Throws ConfigError when a parameter is out of range.
void validate(const HeuristicSpec& spec);

/// AFAP, AFAP+, AFAP* and FSB.
ActionVector afap_family_act(const HeuristicSpec& spec, const Simulator& sim);

/// Idle until the latest step from which full-rate charging still reaches target.
ActionVector alap_act(const Simulator& sim);

/// Full-rate grants in port order rotated by t until `budget_kw` is spent.
ActionVector round_robin_act(const Simulator& sim, double budget_kw);

/// Steps needed at full rating to cover `need_kwh`.
int alap_needed_steps(double need_kwh, double max_kw, double dt_hours);

/// FSB start step for a 10:00 start under the config's clock.
int default_fsb_start_step(const ScenarioConfig& config);

class HeuristicController final : public Controller {
public:
    explicit HeuristicController(HeuristicSpec spec);

    std::string name() const override { return std::string(to_string(spec_.kind)); }
    ActionVector act(const Simulator& sim) override;

private:
    HeuristicSpec spec_;
};

}  // namespace evcharge
