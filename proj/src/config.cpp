#include "evcharge/config.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace evcharge {

namespace {

using json = nlohmann::json;

void allow_keys(const json& obj, std::string_view where, std::initializer_list<std::string_view> keys) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected an object");
    for (const auto& [k, v] : obj.items()) {
        bool known = false;
        for (auto allowed : keys) known = known || k == allowed;
        if (!known) throw ConfigError(std::string(where) + ": unknown key '" + k + "'");
    }
}

std::string key_path(std::string_view where, std::string_view key) {
    return where.empty() ? std::string(key) : std::string(where) + "." + std::string(key);
}

template <typename T>
void read(const json& obj, std::string_view where, std::string_view key, T& out) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(key_path(where, key) + ": wrong type");
    }
}

template <typename T>
void read_opt(const json& obj, std::string_view where, std::string_view key, std::optional<T>& out) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end() || it->is_null()) return;
    T v{};
    read(obj, where, key, v);
    out = v;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

void parse_scenario(const json& j, ScenarioConfig& c) {
    allow_keys(j, "scenario",
               {"n_ports", "transformer_capacity", "episode_steps", "step_duration", "start_hour", "evse_max_charge",
                "evse_max_discharge", "charge_efficiency", "discharge_efficiency", "voltage", "phases",
                "station_max_current", "station_min_current", "demand_level", "arrival_rate_table", "seed",
                "sessions", "demand_response", "inflexible_base", "inflexible_peak"});
    // Site-sized defaults follow the port count unless overridden.
    if (j.contains("n_ports")) {
        int n = 0;
        read(j, "scenario", "n_ports", n);
        if (n < 1) throw ConfigError("scenario.n_ports: must be at least 1");
        c = default_scenario_config(n);
    }
    read(j, "scenario", "transformer_capacity", c.transformer_capacity_kw);
    read(j, "scenario", "episode_steps", c.episode_steps);
    read(j, "scenario", "step_duration", c.step_hours);
    read(j, "scenario", "start_hour", c.start_hour);
    read(j, "scenario", "evse_max_charge", c.evse_max_charge_kw);
    read(j, "scenario", "evse_max_discharge", c.evse_max_discharge_kw);
    read(j, "scenario", "charge_efficiency", c.charge_efficiency);
    read(j, "scenario", "discharge_efficiency", c.discharge_efficiency);
    read(j, "scenario", "voltage", c.voltage);
    read(j, "scenario", "phases", c.phases);
    read(j, "scenario", "station_max_current", c.station_max_current_a);
    read(j, "scenario", "station_min_current", c.station_min_current_a);
    read(j, "scenario", "seed", c.seed);
    read(j, "scenario", "inflexible_base", c.inflexible_base_kw);
    read(j, "scenario", "inflexible_peak", c.inflexible_peak_kw);
    if (j.contains("demand_level")) {
        std::string s;
        read(j, "scenario", "demand_level", s);
        try {
            c.demand_level = parse_demand_level(s);
        } catch (const std::exception&) {
            throw ConfigError("scenario.demand_level: expected Low, Medium or High");
        }
    }
    if (j.contains("arrival_rate_table")) {
        std::vector<double> rates;
        read(j, "scenario", "arrival_rate_table", rates);
        if (rates.size() != 24) throw ConfigError("scenario.arrival_rate_table: expected 24 hourly values");
        std::copy(rates.begin(), rates.end(), c.arrival_rate_table.begin());
    }
    if (j.contains("sessions")) {
        const json& s = j["sessions"];
        allow_keys(s, "scenario.sessions",
                   {"stay_median_hours", "stay_sigma_log", "initial_soc_min", "initial_soc_max", "target_soc",
                    "capacity_min", "capacity_max", "cv_threshold"});
        read(s, "scenario.sessions", "stay_median_hours", c.sessions.stay_median_hours);
        read(s, "scenario.sessions", "stay_sigma_log", c.sessions.stay_sigma_log);
        read(s, "scenario.sessions", "initial_soc_min", c.sessions.initial_soc_min);
        read(s, "scenario.sessions", "initial_soc_max", c.sessions.initial_soc_max);
        read(s, "scenario.sessions", "target_soc", c.sessions.target_soc);
        read(s, "scenario.sessions", "capacity_min", c.sessions.capacity_min_kwh);
        read(s, "scenario.sessions", "capacity_max", c.sessions.capacity_max_kwh);
        read(s, "scenario.sessions", "cv_threshold", c.sessions.cv_threshold);
    }
    if (j.contains("demand_response")) {
        const json& d = j["demand_response"];
        allow_keys(d, "scenario.demand_response", {"start_step", "duration_steps", "fraction"});
        read(d, "scenario.demand_response", "start_step", c.demand_response.start_step);
        read(d, "scenario.demand_response", "duration_steps", c.demand_response.duration_steps);
        read(d, "scenario.demand_response", "fraction", c.demand_response.fraction);
    }
}

SourceMix mix_from(const std::string& s, std::string_view where) {
    try {
        return parse_source_mix(s);
    } catch (const std::exception&) {
        throw ConfigError(std::string(where) + ": expected Solar, Wind or Hybrid");
    }
}

PenetrationSpec parse_penetration(const json& j, std::string_view where) {
    allow_keys(j, where, {"name", "target_fraction", "source_mix", "hybrid_split"});
    PenetrationSpec p;
    read(j, where, "target_fraction", p.target_fraction);
    read(j, where, "hybrid_split", p.hybrid_split);
    if (j.contains("source_mix")) {
        std::string s;
        read(j, where, "source_mix", s);
        p.source_mix = mix_from(s, key_path(where, "source_mix"));
    }
    return p;
}

std::string default_scenario_name(const PenetrationSpec& p) {
    if (p.target_fraction == 0.0) return "No RE";
    std::ostringstream os;
    os << p.target_fraction * 100.0 << "% " << to_string(p.source_mix);
    return os.str();
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    allow_keys(root, "config",
               {"scenario", "profiles", "ci_unit", "scenarios", "strategies", "reward", "heuristic", "mpc", "emissions",
                "rl", "benchmark", "sweep"});
    RunConfig rc;
    if (root.contains("scenario")) parse_scenario(root["scenario"], rc.scenario);

    double ci_factor = 1.0;
    if (root.contains("ci_unit")) {
        std::string u;
        read(root, "", "ci_unit", u);
        if (u == "g/kWh") ci_factor = 1e-3;
        else if (u != "kg/kWh") throw ConfigError("ci_unit: expected \"kg/kWh\" or \"g/kWh\"");
    }

    if (root.contains("profiles")) {
        const json& p = root["profiles"];
        allow_keys(p, "profiles",
                   {"inflexible", "solar", "wind", "carbon_intensity", "price_charge", "price_discharge",
                    "step_duration", "extrapolate"});
        double step = rc.scenario.step_hours;
        read(p, "profiles", "step_duration", step);
        if (!(step > 0.0)) throw ConfigError("profiles.step_duration: must be positive");
        read(p, "profiles", "extrapolate", rc.sources.extrapolate);
        auto load = [&](const char* key, Unit unit, std::optional<TimeSeries>& out) {
            if (!p.contains(key)) return;
            std::string path;
            read(p, "profiles", key, path);
            out = load_series(resolve(base_dir, path), unit, step);
        };
        load("inflexible", Unit::Kilowatt, rc.sources.inflexible_kw);
        load("solar", Unit::Kilowatt, rc.sources.solar_base_kw);
        load("wind", Unit::Kilowatt, rc.sources.wind_base_kw);
        load("carbon_intensity", Unit::KgCo2PerKwh, rc.sources.carbon_intensity);
        load("price_charge", Unit::CurrencyPerKwh, rc.sources.price_charge);
        load("price_discharge", Unit::CurrencyPerKwh, rc.sources.price_discharge);
        if (rc.sources.carbon_intensity && ci_factor != 1.0)
            rc.sources.carbon_intensity = scaled(*rc.sources.carbon_intensity, ci_factor);
    }

    if (root.contains("scenarios")) {
        const json& s = root["scenarios"];
        if (!s.is_array() || s.empty()) throw ConfigError("scenarios: expected a non-empty array");
        rc.scenarios.clear();
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::string where = "scenarios[" + std::to_string(i) + "]";
            ScenarioSpec spec;
            spec.penetration = parse_penetration(s[i], where);
            spec.name = default_scenario_name(spec.penetration);
            read(s[i], where, "name", spec.name);
            rc.scenarios.push_back(spec);
        }
    }

    if (root.contains("strategies")) {
        read(root, "", "strategies", rc.strategies);
        for (const auto& name : rc.strategies)
            if (!canonical_strategy(name)) throw ConfigError("strategies: unknown strategy '" + name + "'");
    }

    if (root.contains("reward")) {
        const json& r = root["reward"];
        allow_keys(r, "reward", {"w_discharge", "w_co2", "w_sat", "sat_threshold", "curtailment_in_discharge_term"});
        read(r, "reward", "w_discharge", rc.reward.w_discharge);
        read(r, "reward", "w_co2", rc.reward.w_co2);
        read(r, "reward", "w_sat", rc.reward.w_sat);
        read(r, "reward", "sat_threshold", rc.reward.sat_threshold);
        read(r, "reward", "curtailment_in_discharge_term", rc.reward.curtailment_in_discharge_term);
    }

    if (root.contains("heuristic")) {
        const json& h = root["heuristic"];
        allow_keys(h, "heuristic", {"power_cap", "stop_soc", "start_step", "rr_budget"});
        read_opt(h, "heuristic", "power_cap", rc.heuristic.power_cap_kw);
        read(h, "heuristic", "stop_soc", rc.heuristic.stop_soc);
        read_opt(h, "heuristic", "start_step", rc.heuristic.start_step);
        read_opt(h, "heuristic", "rr_budget", rc.heuristic.rr_budget_kw);
    }

    if (root.contains("mpc")) {
        const json& m = root["mpc"];
        allow_keys(m, "mpc",
                   {"horizon", "lambda_emission", "slack_penalty", "overload_penalty", "setpoint", "max_cut_rounds"});
        read(m, "mpc", "horizon", rc.mpc.horizon);
        read(m, "mpc", "lambda_emission", rc.mpc.lambda_emission);
        read(m, "mpc", "slack_penalty", rc.mpc.slack_penalty);
        read(m, "mpc", "overload_penalty", rc.mpc.overload_penalty);
        read(m, "mpc", "max_cut_rounds", rc.mpc.max_cut_rounds);
        if (m.contains("setpoint")) {
            std::string path;
            read(m, "mpc", "setpoint", path);
            const TimeSeries raw = load_series(resolve(base_dir, path), Unit::Kilowatt, rc.scenario.step_hours);
            rc.mpc.setpoint_kw = resample_to_grid(raw, rc.scenario.step_hours, rc.scenario.episode_steps, true);
        }
    }

    if (root.contains("emissions")) {
        const json& e = root["emissions"];
        allow_keys(e, "emissions", {"net_export_credit"});
        read(e, "emissions", "net_export_credit", rc.emissions.net_export_credit);
    }

    if (root.contains("rl")) {
        const json& r = root["rl"];
        allow_keys(r, "rl",
                   {"horizon", "policy", "hidden", "replay_capacity", "batch_size", "gamma", "tau", "learning_rate",
                    "target_entropy", "initial_alpha", "reward_scale", "total_steps", "learning_starts",
                    "update_every", "gradient_steps", "eval_every", "eval_episodes", "eval_seed_base", "seed",
                    "log_csv", "checkpoint", "train_scenario"});
        auto& t = rc.train;
        read(r, "rl", "horizon", rc.rl_horizon);
        if (r.contains("policy")) {
            std::string p;
            read(r, "rl", "policy", p);
            rc.policy = resolve(base_dir, p);
        }
        read(r, "rl", "hidden", t.hidden);
        read(r, "rl", "replay_capacity", t.replay_capacity);
        read(r, "rl", "batch_size", t.batch_size);
        read(r, "rl", "gamma", t.gamma);
        read(r, "rl", "tau", t.tau);
        read(r, "rl", "learning_rate", t.learning_rate);
        read_opt(r, "rl", "target_entropy", t.target_entropy);
        read(r, "rl", "initial_alpha", t.initial_alpha);
        read(r, "rl", "reward_scale", t.reward_scale);
        read(r, "rl", "total_steps", t.total_steps);
        read(r, "rl", "learning_starts", t.learning_starts);
        read(r, "rl", "update_every", t.update_every);
        read(r, "rl", "gradient_steps", t.gradient_steps);
        read(r, "rl", "eval_every", t.eval_every);
        read(r, "rl", "eval_episodes", t.eval_episodes);
        read(r, "rl", "eval_seed_base", t.eval_seed_base);
        read(r, "rl", "seed", t.seed);
        if (r.contains("log_csv")) {
            std::string p;
            read(r, "rl", "log_csv", p);
            t.log_csv = resolve(base_dir, p);
        }
        if (r.contains("checkpoint")) {
            std::string p;
            read(r, "rl", "checkpoint", p);
            t.checkpoint = resolve(base_dir, p);
        }
        if (r.contains("train_scenario")) rc.train_penetration = parse_penetration(r["train_scenario"], "rl.train_scenario");
    }

    if (root.contains("benchmark")) {
        const json& b = root["benchmark"];
        allow_keys(b, "benchmark", {"runs", "workers", "seed", "timing"});
        read(b, "benchmark", "runs", rc.runs);
        read(b, "benchmark", "workers", rc.workers);
        read(b, "benchmark", "seed", rc.seed);
        read(b, "benchmark", "timing", rc.timing);
    }

    if (root.contains("sweep")) {
        const json& s = root["sweep"];
        allow_keys(s, "sweep", {"axis", "values", "penetration_mix", "retrain"});
        if (s.contains("axis")) {
            std::string a;
            read(s, "sweep", "axis", a);
            auto axis = parse_sweep_axis(a);
            if (!axis) throw ConfigError("sweep.axis: expected reward_ablation, w_co2, penetration or demand");
            rc.sweep.axis = *axis;
        }
        if (s.contains("values")) {
            const json& v = s["values"];
            if (!v.is_array()) throw ConfigError("sweep.values: expected an array");
            for (const auto& x : v) {
                if (x.is_number()) {
                    rc.sweep.values.push_back(x.get<double>());
                } else if (x.is_string()) {
                    const std::string label = x.get<std::string>();
                    if (auto rv = parse_reward_variant(label)) {
                        rc.sweep.values.push_back(static_cast<double>(*rv));
                    } else {
                        try {
                            rc.sweep.values.push_back(static_cast<double>(parse_demand_level(label)));
                        } catch (const std::exception&) {
                            throw ConfigError("sweep.values: unknown value '" + label + "'");
                        }
                    }
                } else {
                    throw ConfigError("sweep.values: expected numbers or names");
                }
            }
        }
        if (s.contains("penetration_mix")) {
            std::string m;
            read(s, "sweep", "penetration_mix", m);
            rc.sweep.penetration_mix = mix_from(m, "sweep.penetration_mix");
        }
        read(s, "sweep", "retrain", rc.retrain_in_sweep);
    }
    rc.sweep.rl_horizon = rc.rl_horizon;
    return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_run_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::vector<std::string> resolved_strategies(const RunConfig& c) {
    if (!c.strategies.empty()) return c.strategies;
    auto s = default_strategies();
    if (c.policy) s.push_back("SAC");
    return s;
}

std::vector<std::string> check_run_config(const RunConfig& c) {
    std::vector<std::string> out;
    for (const auto& v : validate_config(c.scenario)) out.push_back("scenario." + v.field + ": " + v.message);
    auto guard = [&](auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            out.emplace_back(e.what());
        }
    };
    for (const auto& s : c.scenarios) guard([&] { validate(s.penetration); });
    guard([&] { validate(c.reward); });
    guard([&] { validate(c.heuristic); });
    guard([&] { validate(c.mpc); });
    guard([&] { sac::validate(c.train); });
    if (c.rl_horizon < 1) out.emplace_back("rl.horizon: must be >= 1");
    if (c.runs < 1) out.emplace_back("benchmark.runs: must be >= 1");
    if (c.workers < 1) out.emplace_back("benchmark.workers: must be >= 1");
    for (const auto& name : resolved_strategies(c)) {
        if (canonical_strategy(name) == std::optional<std::string>("SAC") && !c.policy &&
            !(c.retrain_in_sweep))
            out.emplace_back("strategies: SAC requires rl.policy");
    }
    if (out.empty()) {
        // Profiles must build for every scenario.
        for (const auto& s : c.scenarios)
            guard([&] { build_site_profiles(c.scenario, s.penetration, c.sources); });
    }
    return out;
}

MatrixSpec make_matrix_spec(const RunConfig& c) {
    if (auto v = check_run_config(c); !v.empty()) throw ConfigError(v.front());
    MatrixSpec m;
    m.base = c.scenario;
    m.scenarios = c.scenarios;
    m.strategies = resolved_strategies(c);
    m.runs = c.runs;
    m.base_seed = c.seed;
    m.workers = c.workers;
    m.strategy_options.heuristic = c.heuristic;
    m.strategy_options.mpc = c.mpc;
    m.episode.reward = c.reward;
    m.episode.emissions = c.emissions;
    m.episode.timing = c.timing;
    m.sources = c.sources;
    bool wants_rl = false;
    for (const auto& s : m.strategies) wants_rl = wants_rl || canonical_strategy(s) == std::optional<std::string>("SAC");
    if (wants_rl && c.policy) {
        m.strategy_options.policy = std::make_shared<const PolicyArtifact>(
            load_policy(*c.policy, EnvSignature{c.scenario.n_ports, c.rl_horizon, 1}));
    }
    return m;
}

EnvConfig make_env_config(const RunConfig& c, const PenetrationSpec& penetration) {
    EnvConfig e;
    e.scenario = c.scenario;
    e.profiles = std::make_shared<const SiteProfiles>(build_site_profiles(c.scenario, penetration, c.sources));
    e.reward = c.reward;
    e.emissions = c.emissions;
    e.horizon = c.rl_horizon;
    return e;
}

}  // namespace evcharge
