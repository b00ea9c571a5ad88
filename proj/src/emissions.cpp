#include "evcharge/emissions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evcharge {

double step_emission(double grid_energy_kwh, double intensity_kg_per_kwh) {
    if (!(intensity_kg_per_kwh >= 0.0)) throw std::invalid_argument("carbon intensity must be non-negative");
    if (!(grid_energy_kwh >= 0.0)) throw std::invalid_argument("grid energy must be non-negative");
    return grid_energy_kwh * intensity_kg_per_kwh;
}

std::optional<double> carbon_intensity_metric(double total_kg, double total_charged_kwh) {
    if (!(total_charged_kwh > 0.0)) return std::nullopt;
    return 1000.0 * total_kg / total_charged_kwh;
}

std::optional<double> re_self_consumption(double renewables_used_kwh, double renewables_available_kwh) {
    if (!(renewables_available_kwh > 0.0)) return std::nullopt;
    return renewables_used_kwh / renewables_available_kwh;
}

double ev_grid_energy_kwh(const StepResult& step, const EmissionOptions& options) {
    const double kw = options.net_export_credit ? step.net_grid_import_ev_kw : step.grid_import_ev_kw;
    return kw * step.dt_hours;
}

double EmissionLedger::record(const StepResult& step) {
    const double grid = ev_grid_energy_kwh(step, options_);
    const double kg = step_emission(grid, step.carbon_intensity);
    per_step_kg_.push_back(kg);
    total_kg_ += kg;
    total_grid_kwh_ += grid;
    total_charged_kwh_ += step.served_kwh;
    return kg;
}

}  // namespace evcharge
