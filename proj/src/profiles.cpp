#include "evcharge/profiles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <vector>

namespace evcharge {

namespace {

constexpr double kTimeEps = 1e-9;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    double value = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

bool must_be_non_negative(Unit unit) { return unit != Unit::CurrencyPerKwh; }

double hour_of_step(const ProfileGrid& grid, Eigen::Index i) {
    return std::fmod(grid.start_hour + static_cast<double>(i) * grid.step_hours, 24.0);
}

template <typename Shape>
TimeSeries sample_shape(const ProfileGrid& grid, Unit unit, Shape shape) {
    TimeSeries out;
    out.step_hours = grid.step_hours;
    out.unit = unit;
    out.values.resize(grid.steps);
    for (Eigen::Index i = 0; i < grid.steps; ++i) out.values[i] = shape(hour_of_step(grid, i));
    return out;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

std::string_view to_string(Unit unit) {
    switch (unit) {
        case Unit::Kilowatt: return "kW";
        case Unit::KgCo2PerKwh: return "kgCO2/kWh";
        case Unit::CurrencyPerKwh: return "currency/kWh";
    }
    return "?";
}

TimeSeries TimeSeries::constant(double value, Eigen::Index len, double step_hours, Unit unit) {
    return TimeSeries{step_hours, Vector::Constant(len, value), unit};
}

void validate(const TimeSeries& series, std::string_view what) {
    const std::string name(what);
    if (!(series.step_hours > 0.0) || !std::isfinite(series.step_hours))
        throw DataError(name + ": step duration must be positive");
    if (series.size() < 1) throw DataError(name + ": no samples");
    if (!series.values.allFinite()) throw DataError(name + ": non-finite sample");
    if (must_be_non_negative(series.unit) && series.values.minCoeff() < 0.0)
        throw DataError(name + ": negative value in a " + std::string(to_string(series.unit)) + " series");
}

TimeSeries load_series(const std::filesystem::path& path, Unit unit, double step_hours) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open profile file '" + path.string() + "'");

    std::vector<double> values;
    std::optional<long long> last_step;
    std::string line;
    int line_no = 0;
    bool seen_row = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;
        const auto comma = text.find(',');
        const auto where = path.string() + ":" + std::to_string(line_no);
        if (comma == std::string_view::npos) throw DataError(where + ": expected 'step,value', got '" + line + "'");
        const auto step_field = parse_double(text.substr(0, comma));
        const auto value_field = parse_double(text.substr(comma + 1));
        const bool first_row = !seen_row;
        seen_row = true;
        if (first_row && !step_field) continue;  // header
        if (!step_field || !value_field)
            throw DataError(where + ": malformed row '" + std::string(text) + "'");
        const double step_value = *step_field;
        if (step_value != std::floor(step_value))
            throw DataError(where + ": step index must be an integer");
        const auto step = static_cast<long long>(step_value);
        if (last_step && step <= *last_step)
            throw DataError(where + ": step index not increasing (" + std::to_string(step) + " after " +
                            std::to_string(*last_step) + ")");
        if (last_step && step != *last_step + 1)
            throw DataError(where + ": gap in step index after " + std::to_string(*last_step));
        if (!std::isfinite(*value_field)) throw DataError(where + ": non-finite value");
        if (must_be_non_negative(unit) && *value_field < 0.0)
            throw DataError(where + ": negative value for unit " + std::string(to_string(unit)));
        last_step = step;
        values.push_back(*value_field);
    }
    if (values.empty()) throw DataError(path.string() + ": no samples");

    TimeSeries series;
    series.step_hours = step_hours;
    series.unit = unit;
    series.values = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
    validate(series, path.string());
    return series;
}

void save_series(const std::filesystem::path& path, const TimeSeries& series) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << "step,value\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < series.size(); ++i) out << i << ',' << series.values[i] << '\n';
}

TimeSeries resample_to_grid(const TimeSeries& series, double target_step, Eigen::Index target_len,
                            bool extrapolate) {
    validate(series);
    if (!(target_step > 0.0)) throw DataError("resample: target step must be positive");
    if (target_len < 1) throw DataError("resample: target length must be at least 1");

    const double coverage = static_cast<double>(series.size()) * series.step_hours;
    const double needed = static_cast<double>(target_len) * target_step;
    if (!extrapolate && needed > coverage + kTimeEps)
        throw DataError("resample: target grid (" + std::to_string(needed) + " h) exceeds source coverage (" +
                        std::to_string(coverage) + " h)");

    TimeSeries out;
    out.step_hours = target_step;
    out.unit = series.unit;
    out.values.resize(target_len);
    const Eigen::Index last = series.size() - 1;
    for (Eigen::Index i = 0; i < target_len; ++i) {
        const double start = static_cast<double>(i) * target_step;
        auto src = static_cast<Eigen::Index>(std::floor(start / series.step_hours + kTimeEps));
        out.values[i] = series.values[std::min(src, last)];
    }
    return out;
}

TimeSeries scaled(const TimeSeries& series, double factor) {
    TimeSeries out = series;
    out.values *= factor;
    return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SourceMix mix) {
    switch (mix) {
        case SourceMix::Solar: return "Solar";
        case SourceMix::Wind: return "Wind";
        case SourceMix::Hybrid: return "Hybrid";
    }
    return "?";
}

SourceMix parse_source_mix(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "solar" || lower == "pv") return SourceMix::Solar;
    if (lower == "wind") return SourceMix::Wind;
    if (lower == "hybrid") return SourceMix::Hybrid;
    throw ConfigError("unknown source mix '" + std::string(text) + "' (expected Solar, Wind or Hybrid)");
}

void validate(const PenetrationSpec& spec) {
    if (!(spec.target_fraction >= 0.0 && spec.target_fraction <= 1.0))
        throw ConfigError("penetration.target_fraction must lie in [0, 1]");
    if (!(spec.hybrid_split >= 0.0 && spec.hybrid_split <= 1.0))
        throw ConfigError("penetration.hybrid_split must lie in [0, 1]");
}

double daily_energy(const TimeSeries& base_profile) {
    const double hours = static_cast<double>(base_profile.size()) * base_profile.step_hours;
    return base_profile.integral() * 24.0 / hours;
}

double penetration_multiplier(const TimeSeries& base_profile, double baseline_daily_kwh, double target_fraction) {
    if (!(target_fraction >= 0.0 && target_fraction <= 1.0))
        throw ConfigError("penetration target fraction must lie in [0, 1]");
    if (target_fraction == 0.0) return 0.0;
    const double base = daily_energy(base_profile);
    if (!(base > 0.0)) throw DataError("penetration: base profile has zero daily energy but the target is nonzero");
    if (!(baseline_daily_kwh >= 0.0)) throw ConfigError("penetration: baseline daily charging energy must be >= 0");
    return target_fraction * baseline_daily_kwh / base;
}

double penetration_multiplier(const TimeSeries& base_profile, double baseline_daily_kwh,
                              const PenetrationSpec& spec) {
    validate(spec);
    double share = spec.target_fraction;
    if (spec.source_mix == SourceMix::Hybrid) share *= 1.0 - spec.hybrid_split;
    return penetration_multiplier(base_profile, baseline_daily_kwh, share);
}

PenetrationMultipliers penetration_multipliers(const TimeSeries& solar_base, const TimeSeries& wind_base,
                                               double baseline_daily_kwh, const PenetrationSpec& spec) {
    validate(spec);
    const double f = spec.target_fraction;
    switch (spec.source_mix) {
        case SourceMix::Solar: return {penetration_multiplier(solar_base, baseline_daily_kwh, f), 0.0};
        case SourceMix::Wind: return {0.0, penetration_multiplier(wind_base, baseline_daily_kwh, f)};
        case SourceMix::Hybrid:
            return {penetration_multiplier(solar_base, baseline_daily_kwh, f * spec.hybrid_split),
                    penetration_multiplier(wind_base, baseline_daily_kwh, f * (1.0 - spec.hybrid_split))};
    }
    return {};
}

// ---------------------------------------------------------------------------

ForecastWindow forecast_window(const TimeSeries& series, Eigen::Index t, int horizon) {
    if (horizon < 1) throw std::invalid_argument("forecast horizon must be >= 1");
    if (t < 0 || t >= series.size()) throw std::out_of_range("forecast start outside the series");
    ForecastWindow out{horizon, Vector(horizon)};
    const Eigen::Index last = series.size() - 1;
    for (int h = 0; h < horizon; ++h) out.values[h] = series.values[std::min<Eigen::Index>(t + h, last)];
    return out;
}

ForecastWindow forecast_window(const TimeSeries& series, Eigen::Index t, int horizon, double noise_std, Rng& rng) {
    auto out = forecast_window(series, t, horizon);
    if (noise_std > 0.0) {
        for (int h = 1; h < horizon; ++h) out.values[h] += rng.normal(0.0, noise_std);
    }
    return out;
}

// ---------------------------------------------------------------------------

TimeSeries synthetic_carbon_intensity(const ProfileGrid& grid) {
    // Hourly anchors, linearly interpolated; values in kgCO2/kWh.
    static constexpr std::array<double, 24> kHourly = {
        0.200, 0.190, 0.182, 0.178, 0.180, 0.190, 0.212, 0.248, 0.288, 0.310, 0.312, 0.302,
        0.284, 0.270, 0.268, 0.280, 0.308, 0.352, 0.380, 0.372, 0.340, 0.300, 0.262, 0.224};
    return sample_shape(grid, Unit::KgCo2PerKwh, [](double h) {
        const auto lo = static_cast<std::size_t>(std::floor(h)) % 24;
        const auto hi = (lo + 1) % 24;
        const double w = h - std::floor(h);
        return (1.0 - w) * kHourly[lo] + w * kHourly[hi];
    });
}

TimeSeries synthetic_solar(const ProfileGrid& grid) {
    constexpr double sunrise = 6.0;
    constexpr double sunset = 21.0;
    return sample_shape(grid, Unit::Kilowatt, [](double h) {
        if (h <= sunrise || h >= sunset) return 0.0;
        const double s = std::sin(std::numbers::pi * (h - sunrise) / (sunset - sunrise));
        return std::pow(s, 1.5);
    });
}

TimeSeries synthetic_wind(const ProfileGrid& grid) {
    return sample_shape(grid, Unit::Kilowatt, [](double h) {
        const double diurnal = 0.16 * std::cos(2.0 * std::numbers::pi * (h - 21.0) / 24.0);
        const double gusts = 0.08 * std::sin(2.0 * std::numbers::pi * h / 6.3) +
                             0.05 * std::sin(2.0 * std::numbers::pi * h / 2.7 + 1.0);
        return std::max(0.0, 0.48 + diurnal + gusts);
    });
}

TimeSeries synthetic_inflexible_load(const ProfileGrid& grid, double base_kw, double peak_kw) {
    return sample_shape(grid, Unit::Kilowatt, [=](double h) {
        const double office = logistic((h - 8.0) / 0.7) - logistic((h - 18.0) / 0.8);
        return base_kw + (peak_kw - base_kw) * std::clamp(office, 0.0, 1.0);
    });
}

}  // namespace evcharge
