#include "evcharge/scenario.hpp"

#include "evcharge/random.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace evcharge {

std::string_view to_string(DemandLevel level) {
    switch (level) {
        case DemandLevel::Low: return "Low";
        case DemandLevel::Medium: return "Medium";
        case DemandLevel::High: return "High";
    }
    return "?";
}

DemandLevel parse_demand_level(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "low") return DemandLevel::Low;
    if (lower == "medium") return DemandLevel::Medium;
    if (lower == "high") return DemandLevel::High;
    throw ConfigError("unknown demand level '" + std::string(text) + "' (expected Low, Medium or High)");
}

double demand_scale(DemandLevel level) {
    switch (level) {
        case DemandLevel::Low: return 0.5;
        case DemandLevel::Medium: return 1.0;
        case DemandLevel::High: return 1.5;
    }
    return 1.0;
}

double ScenarioConfig::port_current_limit_a() const {
    return evse_max_charge_kw * 1000.0 / (charge_efficiency * voltage * std::sqrt(static_cast<double>(phases)));
}

double ScenarioConfig::station_current_max_a() const {
    if (station_max_current_a > 0.0) return station_max_current_a;
    return n_ports * port_current_limit_a();
}

double ScenarioConfig::station_current_min_a() const {
    if (station_min_current_a < 0.0) return station_min_current_a;
    const double discharge_limit =
        evse_max_discharge_kw * 1000.0 / (discharge_efficiency * voltage * std::sqrt(static_cast<double>(phases)));
    return -n_ports * discharge_limit;
}

std::array<double, 24> default_arrival_rates() {
    return {0.10, 0.05, 0.05, 0.05, 0.10, 0.60, 1.80, 4.50, 6.00, 4.50, 2.40, 1.40,
            1.40, 1.20, 0.90, 0.60, 0.40, 0.30, 0.30, 0.20, 0.20, 0.15, 0.10, 0.10};
}

ScenarioConfig default_scenario_config(int n_ports) {
    ScenarioConfig config;
    const double site_scale = static_cast<double>(n_ports) / 25.0;
    config.n_ports = n_ports;
    config.transformer_capacity_kw = 60.0 * site_scale;
    config.inflexible_base_kw = 15.0 * site_scale;
    config.inflexible_peak_kw = 45.0 * site_scale;
    config.arrival_rate_table = default_arrival_rates();
    for (auto& rate : config.arrival_rate_table) rate *= site_scale;
    return config;
}

std::vector<ConfigViolation> validate_config(const ScenarioConfig& c) {
    std::vector<ConfigViolation> out;
    auto check = [&](bool ok, const char* field, const char* message) {
        if (!ok) out.push_back({field, message});
    };
    check(c.n_ports >= 1, "n_ports", "must be at least 1");
    check(c.transformer_capacity_kw > 0.0, "transformer_capacity", "must be positive");
    check(c.episode_steps >= 1, "episode_steps", "must be at least 1");
    check(c.step_hours > 0.0, "step_duration", "must be positive");
    check(c.start_hour >= 0.0 && c.start_hour < 24.0, "start_hour", "must lie in [0, 24)");
    check(c.evse_max_charge_kw > 0.0, "evse_max_charge", "must be positive");
    check(c.evse_max_discharge_kw >= 0.0, "evse_max_discharge", "must be non-negative");
    check(c.charge_efficiency > 0.0 && c.charge_efficiency <= 1.0, "charge_efficiency", "must lie in (0, 1]");
    check(c.discharge_efficiency > 0.0 && c.discharge_efficiency <= 1.0, "discharge_efficiency",
          "must lie in (0, 1]");
    check(c.voltage > 0.0, "voltage", "must be positive");
    check(c.phases == 1 || c.phases == 3, "phases", "must be 1 or 3");
    check(c.station_max_current_a >= 0.0, "station_max_current", "must be non-negative (0 = sum of ports)");
    check(c.station_min_current_a <= 0.0, "station_min_current", "must be non-positive (0 = sum of ports)");
    check(std::all_of(c.arrival_rate_table.begin(), c.arrival_rate_table.end(),
                      [](double r) { return std::isfinite(r) && r >= 0.0; }),
          "arrival_rate_table", "rates must be finite and non-negative");

    const auto& s = c.sessions;
    check(s.stay_median_hours > 0.0, "sessions.stay_median_hours", "must be positive");
    check(s.stay_sigma_log >= 0.0, "sessions.stay_sigma_log", "must be non-negative");
    check(0.0 <= s.initial_soc_min && s.initial_soc_min <= s.initial_soc_max && s.initial_soc_max <= 1.0,
          "sessions.initial_soc", "need 0 <= min <= max <= 1");
    check(s.target_soc >= s.initial_soc_max && s.target_soc <= 1.0, "sessions.target_soc",
          "must lie in [initial_soc_max, 1]");
    check(0.0 < s.capacity_min_kwh && s.capacity_min_kwh <= s.capacity_max_kwh, "sessions.capacity",
          "need 0 < min <= max");
    check(s.cv_threshold > 0.0 && s.cv_threshold <= 1.0, "sessions.cv_threshold", "must lie in (0, 1]");

    const auto& dr = c.demand_response;
    check(dr.duration_steps >= 0, "demand_response.duration_steps", "must be non-negative");
    check(dr.start_step >= 0, "demand_response.start_step", "must be non-negative");
    check(dr.fraction >= 0.0 && dr.fraction <= 1.0, "demand_response.fraction", "must lie in [0, 1]");

    check(c.inflexible_base_kw >= 0.0 && c.inflexible_peak_kw >= 0.0, "inflexible_load", "must be non-negative");
    return out;
}

namespace {

int clock_hour(const ScenarioConfig& config, int step) {
    const double h = std::fmod(config.start_hour + step * config.step_hours, 24.0);
    return static_cast<int>(std::floor(h)) % 24;
}

double step_rate(const ScenarioConfig& config, int step) {
    return config.arrival_rate_table[static_cast<std::size_t>(clock_hour(config, step))] *
           demand_scale(config.demand_level) * config.step_hours;
}

}  // namespace

double expected_arrivals(const ScenarioConfig& config) {
    double total = 0.0;
    for (int s = 0; s < config.episode_steps; ++s) total += step_rate(config, s);
    return total;
}

double expected_session_need_kwh(const SessionModel& m) {
    const double mean_capacity = 0.5 * (m.capacity_min_kwh + m.capacity_max_kwh);
    const double mean_soc = 0.5 * (m.initial_soc_min + m.initial_soc_max);
    return mean_capacity * (m.target_soc - mean_soc);
}

SessionPlan generate_sessions(const ScenarioConfig& config, std::uint64_t seed) {
    if (auto v = validate_config(config); !v.empty())
        throw ConfigError("invalid scenario config: " + v.front().field + " " + v.front().message);

    Rng rng(seed);
    const auto& model = config.sessions;
    const double log_median = std::log(model.stay_median_hours);

    SessionPlan plan;
    std::vector<int> busy_until(static_cast<std::size_t>(config.n_ports), 0);
    int next_id = 0;
    for (int step = 0; step < config.episode_steps; ++step) {
        const std::uint32_t count = rng.poisson(step_rate(config, step));
        for (std::uint32_t n = 0; n < count; ++n) {
            // Draw every attribute before the port check so that the random
            // stream does not depend on occupancy.
            const double stay_hours = std::exp(log_median + model.stay_sigma_log * rng.normal());
            const double capacity = rng.uniform(model.capacity_min_kwh, model.capacity_max_kwh);
            const double soc0 = rng.uniform(model.initial_soc_min, model.initial_soc_max);

            const auto free = std::find_if(busy_until.begin(), busy_until.end(), [&](int t) { return t <= step; });
            if (free == busy_until.end()) {
                ++plan.dropped_arrivals;
                continue;
            }
            const int stay_steps = std::max(1, static_cast<int>(std::lround(stay_hours / config.step_hours)));
            EvSession s;
            s.id = next_id++;
            s.port = static_cast<int>(free - busy_until.begin());
            s.arrival_step = step;
            s.departure_step = std::min(step + stay_steps, config.episode_steps);
            s.battery_capacity_kwh = capacity;
            s.initial_soc = soc0;
            s.target_soc = model.target_soc;
            s.cv_threshold = model.cv_threshold;
            *free = s.departure_step;
            plan.sessions.push_back(s);
        }
    }
    return plan;
}

}  // namespace evcharge
