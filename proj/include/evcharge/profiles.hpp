#pragma once

#include "evcharge/random.hpp"
#include "evcharge/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace evcharge {

enum class Unit { Kilowatt, KgCo2PerKwh, CurrencyPerKwh };

std::string_view to_string(Unit unit);

/// Uniformly sampled exogenous signal on the simulation step grid.
///
/// Generation and load series (kW) and carbon intensity are non-negative;
/// prices may take either sign.
struct TimeSeries {
    double step_hours = 0.25;
    Vector values;
    Unit unit = Unit::Kilowatt;

    Eigen::Index size() const { return values.size(); }
    double operator[](Eigen::Index i) const { return values[i]; }

    /// Integral of the signal over the series (value x hours).
    double integral() const { return values.sum() * step_hours; }

    static TimeSeries constant(double value, Eigen::Index len, double step_hours, Unit unit);
};

/// Checks every TimeSeries invariant; throws DataError naming the problem.
void validate(const TimeSeries& series, std::string_view what = "series");

/// Reads a two-column `step,value` CSV (header optional).
TimeSeries load_series(const std::filesystem::path& path, Unit unit, double step_hours);

/// Writes the same two-column format that load_series reads.
void save_series(const std::filesystem::path& path, const TimeSeries& series);

/// Zero-order-hold resampling onto a grid of `target_len` steps of `target_step` hours.
/// Each target step takes the source sample active at its start time. Without
/// `extrapolate`, a target grid reaching past the source coverage is an error;
/// with it, the last sample is held.
TimeSeries resample_to_grid(const TimeSeries& series, double target_step, Eigen::Index target_len,
                            bool extrapolate = false);

/// Copy with every sample multiplied by `factor`.
TimeSeries scaled(const TimeSeries& series, double factor);

// ---------------------------------------------------------------------------
// Renewable penetration

enum class SourceMix { Solar, Wind, Hybrid };

std::string_view to_string(SourceMix mix);
SourceMix parse_source_mix(std::string_view text);

struct PenetrationSpec {
    double target_fraction = 0.0;
    SourceMix source_mix = SourceMix::Solar;
    /// Share of the target assigned to solar; only read for Hybrid.
    double hybrid_split = 0.5;
};

void validate(const PenetrationSpec& spec);

/// Energy of `base_profile` per 24 h (kWh for a kW profile).
double daily_energy(const TimeSeries& base_profile);

/// Multiplier m with m * daily_energy(base) == target_fraction * baseline_daily_kwh.
double penetration_multiplier(const TimeSeries& base_profile, double baseline_daily_kwh,
                              double target_fraction);

/// Single-source form: the multiplier for `base_profile` under `spec`. For
/// Hybrid this returns the multiplier for the share not given to solar
/// (use penetration_multipliers for both).
double penetration_multiplier(const TimeSeries& base_profile, double baseline_daily_kwh,
                              const PenetrationSpec& spec);

struct PenetrationMultipliers {
    double solar = 0.0;
    double wind = 0.0;
};

PenetrationMultipliers penetration_multipliers(const TimeSeries& solar_base, const TimeSeries& wind_base,
                                               double baseline_daily_kwh, const PenetrationSpec& spec);

// ---------------------------------------------------------------------------
// Forecasts

struct ForecastWindow {
    int horizon = 1;
    Vector values;
};

/// Values at steps t..t+H-1; steps past the end repeat the final sample.
ForecastWindow forecast_window(const TimeSeries& series, Eigen::Index t, int horizon);

/// Same slice with additive Gaussian noise of standard deviation `noise_std`
/// applied to every element after the first (the current sample is observed).
ForecastWindow forecast_window(const TimeSeries& series, Eigen::Index t, int horizon, double noise_std,
                               Rng& rng);

// ---------------------------------------------------------------------------
// Synthetic stand-ins for the measured profiles. All take the clock hour of
// step 0 so that they line up with an episode starting at any time of day.

struct ProfileGrid {
    Eigen::Index steps = 96;
    double step_hours = 0.25;
    double start_hour = 5.0;
};

/// Grid carbon intensity in kgCO2/kWh with a night trough and an evening peak.
TimeSeries synthetic_carbon_intensity(const ProfileGrid& grid);

/// Clear-sky-like PV shape with a 1 kW peak.
TimeSeries synthetic_solar(const ProfileGrid& grid);

/// Per-unit wind output (mean around 0.5 kW) with evening strengthening.
TimeSeries synthetic_wind(const ProfileGrid& grid);

/// Workplace building load rising from `base_kw` overnight to `peak_kw` in office hours.
TimeSeries synthetic_inflexible_load(const ProfileGrid& grid, double base_kw, double peak_kw);

}  // namespace evcharge
