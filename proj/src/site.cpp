#include "evcharge/site.hpp"

namespace evcharge {

double baseline_daily_charging_kwh(const ScenarioConfig& config) {
    ScenarioConfig medium = config;
    medium.demand_level = DemandLevel::Medium;
    return expected_arrivals(medium) * expected_session_need_kwh(config.sessions);
}

TimeSeries demand_response_series(const ScenarioConfig& config) {
    TimeSeries dr = TimeSeries::constant(0.0, config.episode_steps, config.step_hours, Unit::Kilowatt);
    const auto& ev = config.demand_response;
    const int end = std::min(ev.start_step + ev.duration_steps, config.episode_steps);
    for (int t = std::max(0, ev.start_step); t < end; ++t) dr.values[t] = ev.fraction * config.transformer_capacity_kw;
    return dr;
}

namespace {

TimeSeries on_grid(const std::optional<TimeSeries>& supplied, const TimeSeries& fallback, const ScenarioConfig& c,
                   bool extrapolate) {
    if (!supplied) return fallback;
    return resample_to_grid(*supplied, c.step_hours, c.episode_steps, extrapolate);
}

}  // namespace

SiteProfiles build_site_profiles(const ScenarioConfig& config, const PenetrationSpec& penetration,
                                 const ProfileSources& sources) {
    validate(penetration);
    const ProfileGrid grid{config.episode_steps, config.step_hours, config.start_hour};
    const bool ex = sources.extrapolate;

    SiteProfiles p;
    p.inflexible_kw = on_grid(sources.inflexible_kw,
                              synthetic_inflexible_load(grid, config.inflexible_base_kw, config.inflexible_peak_kw),
                              config, ex);
    p.carbon_intensity = on_grid(sources.carbon_intensity, synthetic_carbon_intensity(grid), config, ex);
    p.carbon_intensity.unit = Unit::KgCo2PerKwh;

    const TimeSeries solar = on_grid(sources.solar_base_kw, synthetic_solar(grid), config, ex);
    const TimeSeries wind = on_grid(sources.wind_base_kw, synthetic_wind(grid), config, ex);
    const auto m = penetration_multipliers(solar, wind, baseline_daily_charging_kwh(config), penetration);
    p.pv_kw = scaled(solar, m.solar);
    p.wind_kw = scaled(wind, m.wind);

    p.dr_reduction_kw = demand_response_series(config);
    p.price_charge = on_grid(sources.price_charge,
                             TimeSeries::constant(0.25, config.episode_steps, config.step_hours, Unit::CurrencyPerKwh),
                             config, ex);
    p.price_discharge = on_grid(
        sources.price_discharge,
        TimeSeries::constant(0.15, config.episode_steps, config.step_hours, Unit::CurrencyPerKwh), config, ex);
    validate(p, config.episode_steps, config.step_hours);
    return p;
}

std::vector<ScenarioSpec> default_scenario_set() {
    return {
        {"No RE", {0.0, SourceMix::Solar, 0.5}},
        {"50% Solar", {0.5, SourceMix::Solar, 0.5}},
        {"50% Wind", {0.5, SourceMix::Wind, 0.5}},
        {"25% Hybrid", {0.25, SourceMix::Hybrid, 0.5}},
        {"50% Hybrid", {0.5, SourceMix::Hybrid, 0.5}},
    };
}

}  // namespace evcharge
