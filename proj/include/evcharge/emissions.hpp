#pragma once

#include "evcharge/engine.hpp"

#include <optional>
#include <vector>

namespace evcharge {

/// kgCO2 for `grid_energy_kwh` drawn at `intensity` kg/kWh.
double step_emission(double grid_energy_kwh, double intensity_kg_per_kwh);

/// Episode carbon intensity in g/kWh; empty when nothing was charged.
std::optional<double> carbon_intensity_metric(double total_kg, double total_charged_kwh);

/// Share of local renewable generation consumed by EV charging; empty when no
/// renewable energy was available.
std::optional<double> re_self_consumption(double renewables_used_kwh, double renewables_available_kwh);

/// Converts an intensity from g/kWh to kg/kWh.
inline double grams_to_kg(double g_per_kwh) { return g_per_kwh / 1000.0; }

struct EmissionOptions {
    /// Net V2G export against EV import before applying the intensity. Off:
    /// only import counts.
    bool net_export_credit = false;
};

/// Grid energy attributed to EV charging in one step, in kWh.
double ev_grid_energy_kwh(const StepResult& step, const EmissionOptions& options = {});

class EmissionLedger {
public:
    explicit EmissionLedger(EmissionOptions options = {}) : options_(options) {}

    /// Books one engine step and returns its emission in kg.
    double record(const StepResult& step);

    const std::vector<double>& per_step_kg() const { return per_step_kg_; }
    double total_kg() const { return total_kg_; }
    double total_charged_kwh() const { return total_charged_kwh_; }
    double total_grid_kwh() const { return total_grid_kwh_; }
    std::optional<double> carbon_intensity() const { return carbon_intensity_metric(total_kg_, total_charged_kwh_); }

private:
    EmissionOptions options_;
    std::vector<double> per_step_kg_;
    double total_kg_ = 0.0;
    double total_charged_kwh_ = 0.0;
    double total_grid_kwh_ = 0.0;
};

}  // namespace evcharge
