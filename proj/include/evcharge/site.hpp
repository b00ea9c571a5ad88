#pragma once

#include "evcharge/engine.hpp"
#include "evcharge/profiles.hpp"
#include "evcharge/scenario.hpp"

#include <optional>
#include <string>

namespace evcharge {

/// Measured inputs for one site. Every series left empty is replaced by its
/// synthetic stand-in; supplied series are resampled onto the episode grid.
struct ProfileSources {
    std::optional<TimeSeries> inflexible_kw;
    std::optional<TimeSeries> solar_base_kw;  ///< shape only; scaled by the penetration multiplier
    std::optional<TimeSeries> wind_base_kw;
    std::optional<TimeSeries> carbon_intensity;  ///< kg/kWh
    std::optional<TimeSeries> price_charge;
    std::optional<TimeSeries> price_discharge;
    bool extrapolate = false;
};

/// A named renewable build-out, e.g. "50% Wind".
struct ScenarioSpec {
    std::string name = "No RE";
    PenetrationSpec penetration;
};

/// Daily EV energy demand the renewable build-out is sized against: the
/// expected need of a Medium-demand day under `config`.
double baseline_daily_charging_kwh(const ScenarioConfig& config);

/// Demand-response capacity reduction series implied by the config.
TimeSeries demand_response_series(const ScenarioConfig& config);

SiteProfiles build_site_profiles(const ScenarioConfig& config, const PenetrationSpec& penetration,
                                 const ProfileSources& sources = {});

/// No RE, 50% Solar, 50% Wind, 25% Hybrid, 50% Hybrid.
std::vector<ScenarioSpec> default_scenario_set();

}  // namespace evcharge
