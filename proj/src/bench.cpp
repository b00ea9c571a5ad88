#include "evcharge/bench.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace evcharge {

std::optional<double> user_satisfaction(const std::vector<std::pair<double, double>>& final_and_target) {
    if (final_and_target.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& [final_soc, target] : final_and_target) {
        if (!(target > 0.0)) throw std::invalid_argument("user_satisfaction: target must be > 0");
        sum += std::min(final_soc / target, 1.0);
    }
    return 100.0 * sum / static_cast<double>(final_and_target.size());
}

Stat summarize(const std::vector<double>& v) {
    Stat s;
    s.n = static_cast<int>(v.size());
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= s.n;
    if (s.n > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / (s.n - 1));
    }
    return s;
}

AggregateRow aggregate_group(const std::vector<MetricsReport>& rows) {
    if (rows.empty()) throw std::invalid_argument("aggregate_group: empty group");
    AggregateRow a;
    a.scenario = rows.front().scenario;
    a.strategy = rows.front().strategy;
    std::vector<double> co2, ci, sat, ol, ch, dis, re, drop, rew;
    for (const auto& r : rows) {
        if (r.scenario != a.scenario || r.strategy != a.strategy)
            throw std::invalid_argument("aggregate_group: rows from different scenario/strategy groups");
        co2.push_back(r.co2_kg);
        if (r.ci_g_per_kwh) ci.push_back(*r.ci_g_per_kwh);
        if (r.satisfaction_pct) sat.push_back(*r.satisfaction_pct);
        ol.push_back(r.overload_kwh);
        ch.push_back(r.charged_kwh);
        dis.push_back(r.discharged_kwh);
        re.push_back(r.re_ratio);
        drop.push_back(r.dropped_arrivals);
        rew.push_back(r.reward);
    }
    a.runs = static_cast<int>(rows.size());
    a.co2_kg = summarize(co2);
    a.ci_g_per_kwh = summarize(ci);
    a.satisfaction_pct = summarize(sat);
    a.overload_kwh = summarize(ol);
    a.charged_kwh = summarize(ch);
    a.discharged_kwh = summarize(dis);
    a.re_ratio = summarize(re);
    a.dropped_arrivals = summarize(drop);
    a.reward = summarize(rew);
    return a;
}

std::vector<AggregateRow> aggregate_runs(const std::vector<MetricsReport>& rows) {
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<MetricsReport>> groups;
    for (const auto& r : rows) {
        if (!r.error.empty()) continue;
        auto key = std::make_pair(r.scenario, r.strategy);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(r);
    }
    std::vector<AggregateRow> out;
    for (const auto& key : order) out.push_back(aggregate_group(groups[key]));
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> default_strategies() {
    return {"AFAP", "AFAP+", "AFAP*", "ALAP", "FSB", "RR", "MPC-G2V", "MPC-V2G"};
}

namespace {

std::string upper(std::string_view s) {
    std::string u(s);
    std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return std::toupper(c); });
    return u;
}

class IdleController final : public Controller {
public:
    std::string name() const override { return "Idle"; }
    ActionVector act(const Simulator& sim) override { return ActionVector::Zero(sim.config().n_ports); }
};

}  // namespace

std::optional<std::string> canonical_strategy(std::string_view name) {
    if (auto h = parse_heuristic(name)) return std::string(to_string(*h));
    const std::string u = upper(name);
    if (u == "MPC-G2V" || u == "MPC_G2V") return "MPC-G2V";
    if (u == "MPC-V2G" || u == "MPC_V2G") return "MPC-V2G";
    if (u == "SAC" || u == "RL") return "SAC";
    if (u == "RANDOM") return "Random";
    if (u == "IDLE") return "Idle";
    return std::nullopt;
}

ControllerPtr make_controller(const std::string& name, const StrategyOptions& options) {
    const auto canon = canonical_strategy(name);
    if (!canon) throw ConfigError("unknown strategy '" + name + "'");
    if (auto h = parse_heuristic(*canon)) {
        HeuristicSpec spec = options.heuristic;
        spec.kind = *h;
        return std::make_unique<HeuristicController>(spec);
    }
    if (*canon == "MPC-G2V" || *canon == "MPC-V2G") {
        MpcParams p = options.mpc;
        p.mode = *canon == "MPC-G2V" ? MpcMode::G2V : MpcMode::V2G;
        return std::make_unique<MpcController>(p);
    }
    if (*canon == "SAC") {
        if (!options.policy) throw ConfigError("strategy SAC needs a policy (rl.policy)");
        return std::make_unique<PolicyController>(*options.policy);
    }
    if (*canon == "Random") return std::make_unique<RandomController>(options.random_seed);
    return std::make_unique<IdleController>();
}

// ---------------------------------------------------------------------------

EpisodeResult run_episode(const ScenarioConfig& config, std::shared_ptr<const SiteProfiles> profiles,
                          const SessionPlan& plan, Controller& controller, const EpisodeOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    controller.reset();
    Simulator sim(config, std::move(profiles), plan);
    EmissionLedger ledger(options.emissions);
    EpisodeResult out;
    MetricsReport& m = out.report;
    m.strategy = controller.name();
    m.dropped_arrivals = plan.dropped_arrivals;
    double available_kwh = 0.0, used_kwh = 0.0;
    std::vector<std::pair<double, double>> departed;
    while (!sim.done()) {
        const int connected = static_cast<int>(std::count_if(sim.state().ports.begin(), sim.state().ports.end(),
                                                             [](const auto& p) { return p.has_value(); }));
        const StepResult r = sim.step(controller.act(sim));
        const double kg = ledger.record(r);
        const double reward = compute_reward(r, kg, departure_satisfaction(r.departures), options.reward);
        m.reward += reward;
        m.overload_kwh += r.overload_kw * r.dt_hours;
        m.discharged_kwh += r.discharged_kwh;
        available_kwh += r.renewables_available_kw * r.dt_hours;
        used_kwh += r.renewables_used_kw * r.dt_hours;
        for (const auto& d : r.departures) departed.emplace_back(d.final_soc, d.session.target_soc);
        if (options.trace) {
            out.trace.push_back({r.step, r.site_kw, r.ev_charge_kw, r.ev_discharge_kw, r.grid_import_ev_kw,
                                 r.overload_kw, r.renewables_available_kw, r.renewables_used_kw, r.curtailed_kw,
                                 r.carbon_intensity, kg, reward, connected});
        }
    }
    m.co2_kg = ledger.total_kg();
    m.charged_kwh = ledger.total_charged_kwh();
    m.ci_g_per_kwh = ledger.carbon_intensity();
    m.satisfaction_pct = user_satisfaction(departed);
    m.re_ratio = re_self_consumption(used_kwh, available_kwh).value_or(0.0);
    if (options.timing) m.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& trace) {
    std::ofstream os(path);
    if (!os) throw RuntimeFailure("cannot write " + path.string());
    os << "step,site_kw,ev_charge_kw,ev_discharge_kw,grid_import_ev_kw,overload_kw,renewables_available_kw,"
          "renewables_used_kw,curtailed_kw,carbon_intensity_kg_per_kwh,emission_kg,reward,connected\n";
    char buf[512];
    auto z = [](double v) { return std::abs(v) < 5e-7 ? 0.0 : v; };  // no "-0.000000"
    for (const auto& t : trace) {
        std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n", t.step,
                      z(t.site_kw), z(t.ev_charge_kw), z(t.ev_discharge_kw), z(t.grid_import_ev_kw), z(t.overload_kw),
                      z(t.renewables_available_kw), z(t.renewables_used_kw), z(t.curtailed_kw), z(t.carbon_intensity),
                      z(t.emission_kg), z(t.reward), t.connected);
        os << buf;
    }
}

// ---------------------------------------------------------------------------

namespace {

std::string file_safe(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') out += c;
        else if (c == '+') out += "plus";
        else if (c == '*') out += "star";
        else if (c == '%') out += "pct";
        else if (c == '.') out += 'p';
        else out += '_';
    }
    return out;
}

}  // namespace

std::vector<MetricsReport> run_matrix(const MatrixSpec& spec) {
    if (auto v = validate_config(spec.base); !v.empty()) throw ConfigError(v.front().field + ": " + v.front().message);
    if (spec.runs < 1) throw ConfigError("runs must be >= 1");
    if (spec.scenarios.empty()) throw ConfigError("no scenarios configured");
    if (spec.strategies.empty()) throw ConfigError("no strategies configured");
    std::vector<std::string> names;
    for (const auto& s : spec.strategies) {
        auto canon = canonical_strategy(s);
        if (!canon) throw ConfigError("unknown strategy '" + s + "'");
        if (*canon == "SAC" && !spec.strategy_options.policy) throw ConfigError("strategy SAC needs a policy (rl.policy)");
        if (*canon == "SAC" && spec.strategy_options.policy->signature.n_ports != spec.base.n_ports)
            throw ConfigError("policy was trained for a different number of ports");
        names.push_back(*canon);
    }
    validate(spec.strategy_options.heuristic);
    validate(spec.strategy_options.mpc);

    std::vector<std::shared_ptr<const SiteProfiles>> profiles;
    for (const auto& sc : spec.scenarios)
        profiles.push_back(std::make_shared<const SiteProfiles>(build_site_profiles(spec.base, sc.penetration, spec.sources)));
    std::vector<SessionPlan> plans;
    for (int k = 0; k < spec.runs; ++k) plans.push_back(generate_sessions(spec.base, spec.base_seed + static_cast<std::uint64_t>(k)));

    const std::size_t n_sc = spec.scenarios.size(), n_st = names.size(), n_run = static_cast<std::size_t>(spec.runs);
    const std::size_t cells = n_sc * n_st * n_run;
    std::vector<MetricsReport> rows(cells);
    std::atomic<std::size_t> next{0};
    std::mutex io;
    if (spec.trace_dir) std::filesystem::create_directories(*spec.trace_dir);

    auto worker = [&] {
        for (std::size_t cell = next++; cell < cells; cell = next++) {
            const std::size_t run = cell % n_run, st = (cell / n_run) % n_st, sc = cell / (n_run * n_st);
            MetricsReport& row = rows[cell];
            row.scenario = spec.scenarios[sc].name;
            row.strategy = names[st];
            row.seed = spec.base_seed + run;
            try {
                StrategyOptions opts = spec.strategy_options;
                opts.random_seed = row.seed;
                auto ctl = make_controller(names[st], opts);
                EpisodeOptions eo = spec.episode;
                eo.trace = spec.trace_dir.has_value();
                EpisodeResult res = run_episode(spec.base, profiles[sc], plans[run], *ctl, eo);
                res.report.scenario = row.scenario;
                res.report.strategy = row.strategy;
                res.report.seed = row.seed;
                row = std::move(res.report);
                if (spec.trace_dir) {
                    const auto file = *spec.trace_dir / (file_safe(row.scenario) + "__" + file_safe(row.strategy) +
                                                         "__" + std::to_string(row.seed) + ".csv");
                    write_trace_csv(file, res.trace);
                }
            } catch (const std::exception& e) {
                row.error = e.what();
                std::lock_guard lock(io);
                std::fprintf(stderr, "episode failed (%s, %s, seed %llu): %s\n", row.scenario.c_str(),
                             row.strategy.c_str(), static_cast<unsigned long long>(row.seed), e.what());
            }
        }
    };
    const int n_workers = std::max(1, std::min<int>(spec.workers, static_cast<int>(cells)));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return rows;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::RewardAblation: return "reward_ablation";
        case SweepAxis::WCo2: return "w_co2";
        case SweepAxis::Penetration: return "penetration";
        case SweepAxis::Demand: return "demand";
    }
    return "?";
}

std::optional<SweepAxis> parse_sweep_axis(std::string_view text) {
    for (auto a : {SweepAxis::RewardAblation, SweepAxis::WCo2, SweepAxis::Penetration, SweepAxis::Demand})
        if (to_string(a) == text) return a;
    return std::nullopt;
}

namespace {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string penetration_label(double fraction, SourceMix mix) {
    return format_number(std::round(fraction * 1000.0) / 10.0) + "% " + std::string(to_string(mix));
}

std::vector<double> axis_values(const SweepSpec& spec) {
    if (!spec.values.empty()) return spec.values;
    switch (spec.axis) {
        case SweepAxis::RewardAblation: return {0, 1, 2, 3};
        case SweepAxis::WCo2: return {1, 3, 5, 10};
        case SweepAxis::Penetration: return {0, 0.25, 0.5, 0.75};
        case SweepAxis::Demand: return {0, 1, 2};
    }
    return {};
}

std::string arm_label(const SweepSpec& spec, double v) {
    switch (spec.axis) {
        case SweepAxis::RewardAblation: {
            const int i = static_cast<int>(v);
            if (i < 0 || i > 3 || i != v) throw ConfigError("reward_ablation values must be variant indices 0-3");
            return std::string(to_string(static_cast<RewardVariant>(i)));
        }
        case SweepAxis::WCo2:
            if (!(v >= 0.0)) throw ConfigError("w_co2 values must be >= 0");
            return "W_CO2=" + format_number(v);
        case SweepAxis::Penetration:
            if (!(v >= 0.0)) throw ConfigError("penetration values must be >= 0");
            return penetration_label(v, spec.penetration_mix);
        case SweepAxis::Demand: {
            const int i = static_cast<int>(v);
            if (i < 0 || i > 2 || i != v) throw ConfigError("demand values must be level indices 0-2");
            return std::string(to_string(static_cast<DemandLevel>(i)));
        }
    }
    return "?";
}

double baseline_value(const SweepSpec& spec, const std::vector<double>& values) {
    double want = 0.0;
    switch (spec.axis) {
        case SweepAxis::RewardAblation: want = 0; break;
        case SweepAxis::WCo2: want = 5; break;
        case SweepAxis::Penetration: want = 0.5; break;
        case SweepAxis::Demand: want = 1; break;
    }
    for (double v : values)
        if (v == want) return want;
    return values.front();
}

}  // namespace

std::pair<std::vector<std::string>, std::string> sweep_arms(const SweepSpec& spec) {
    const auto values = axis_values(spec);
    if (values.empty()) throw ConfigError("sweep needs at least one axis value");
    std::vector<std::string> labels;
    for (double v : values) labels.push_back(arm_label(spec, v));
    return {labels, arm_label(spec, baseline_value(spec, values))};
}

SweepResult sweep(const MatrixSpec& matrix, const SweepSpec& spec) {
    const auto values = axis_values(spec);
    auto [labels, baseline] = sweep_arms(spec);
    SweepResult result;
    result.axis = spec.axis;
    result.baseline = baseline;

    bool has_rl = false;
    for (const auto& s : matrix.strategies) has_rl = has_rl || canonical_strategy(s) == std::optional<std::string>("SAC");

    for (std::size_t i = 0; i < values.size(); ++i) {
        MatrixSpec m = matrix;
        const double v = values[i];
        switch (spec.axis) {
            case SweepAxis::RewardAblation:
                m.episode.reward = apply_variant(matrix.episode.reward, static_cast<RewardVariant>(static_cast<int>(v)));
                break;
            case SweepAxis::WCo2: m.episode.reward.w_co2 = v; break;
            case SweepAxis::Penetration:
                m.scenarios = {ScenarioSpec{labels[i], PenetrationSpec{v, spec.penetration_mix, 0.5}}};
                break;
            case SweepAxis::Demand: m.base.demand_level = static_cast<DemandLevel>(static_cast<int>(v)); break;
        }
        if (has_rl && spec.retrain) {
            EnvConfig env;
            env.scenario = m.base;
            env.profiles = std::make_shared<const SiteProfiles>(
                build_site_profiles(m.base, m.scenarios.front().penetration, m.sources));
            env.reward = m.episode.reward;
            env.emissions = m.episode.emissions;
            env.horizon = spec.rl_horizon;
            m.strategy_options.policy =
                std::make_shared<const PolicyArtifact>(sac::train_agent(env, *spec.retrain).best);
        }
        result.arms.push_back({labels[i], run_matrix(m)});
    }

    // Deltas against the baseline arm, matched by strategy (and scenario
    // unless the axis replaces the scenarios).
    const auto base_it = std::find_if(result.arms.begin(), result.arms.end(),
                                      [&](const SweepArm& a) { return a.label == baseline; });
    const auto base_agg = aggregate_runs(base_it->rows);
    const bool match_scenario = spec.axis != SweepAxis::Penetration;
    for (const auto& arm : result.arms) {
        for (const auto& a : aggregate_runs(arm.rows)) {
            const auto b = std::find_if(base_agg.begin(), base_agg.end(), [&](const AggregateRow& r) {
                return r.strategy == a.strategy && (!match_scenario || r.scenario == a.scenario);
            });
            if (b == base_agg.end()) continue;
            DeltaRow d;
            d.arm = arm.label;
            d.scenario = a.scenario;
            d.strategy = a.strategy;
            d.co2_kg = a.co2_kg.mean - b->co2_kg.mean;
            d.ci_g_per_kwh = a.ci_g_per_kwh.mean - b->ci_g_per_kwh.mean;
            d.satisfaction_pct = a.satisfaction_pct.mean - b->satisfaction_pct.mean;
            d.overload_kwh = a.overload_kwh.mean - b->overload_kwh.mean;
            d.charged_kwh = a.charged_kwh.mean - b->charged_kwh.mean;
            d.discharged_kwh = a.discharged_kwh.mean - b->discharged_kwh.mean;
            d.re_ratio = a.re_ratio.mean - b->re_ratio.mean;
            d.reward = a.reward.mean - b->reward.mean;
            result.deltas.push_back(d);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", std::abs(v) < 5e-7 ? 0.0 : v);
    return buf;
}

std::string fixed(const std::optional<double>& v) { return v ? fixed(*v) : std::string(); }

nlohmann::ordered_json stat_json(const Stat& s) { return {{"mean", s.mean}, {"std", s.std}, {"n", s.n}}; }

}  // namespace

void write_report_csv(const std::filesystem::path& path, const std::vector<MetricsReport>& rows) {
    std::ofstream os(path);
    if (!os) throw RuntimeFailure("cannot write " + path.string());
    os << "scenario,strategy,seed,co2_kg,ci_g_per_kwh,satisfaction_pct,overload_kwh,charged_kwh,discharged_kwh,"
          "re_ratio,dropped_arrivals,wall_time_s\n";
    for (const auto& r : rows) {
        os << csv_field(r.scenario) << ',' << csv_field(r.strategy) << ',' << r.seed << ',';
        if (!r.error.empty()) {
            os << ",,,,,,,,\n";
            continue;
        }
        os << fixed(r.co2_kg) << ',' << fixed(r.ci_g_per_kwh) << ',' << fixed(r.satisfaction_pct) << ','
           << fixed(r.overload_kwh) << ',' << fixed(r.charged_kwh) << ',' << fixed(r.discharged_kwh) << ','
           << fixed(r.re_ratio) << ',' << r.dropped_arrivals << ',' << fixed(r.wall_time_s) << '\n';
    }
}

void write_report_json(const std::filesystem::path& path, const std::vector<MetricsReport>& rows) {
    nlohmann::ordered_json root = nlohmann::ordered_json::object();
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
    for (const auto& r : rows) {
        auto& runs = root[r.scenario][r.strategy]["runs"];
        nlohmann::ordered_json j;
        j["seed"] = r.seed;
        if (!r.error.empty()) {
            j["error"] = r.error;
        } else {
            j["co2_kg"] = r.co2_kg;
            j["ci_g_per_kwh"] = opt(r.ci_g_per_kwh);
            j["satisfaction_pct"] = opt(r.satisfaction_pct);
            j["overload_kwh"] = r.overload_kwh;
            j["charged_kwh"] = r.charged_kwh;
            j["discharged_kwh"] = r.discharged_kwh;
            j["re_ratio"] = r.re_ratio;
            j["dropped_arrivals"] = r.dropped_arrivals;
            j["wall_time_s"] = opt(r.wall_time_s);
            j["reward"] = r.reward;
        }
        runs.push_back(j);
    }
    for (const auto& a : aggregate_runs(rows)) {
        auto& node = root[a.scenario][a.strategy];
        node["summary"] = {{"runs", a.runs},
                           {"co2_kg", stat_json(a.co2_kg)},
                           {"ci_g_per_kwh", stat_json(a.ci_g_per_kwh)},
                           {"satisfaction_pct", stat_json(a.satisfaction_pct)},
                           {"overload_kwh", stat_json(a.overload_kwh)},
                           {"charged_kwh", stat_json(a.charged_kwh)},
                           {"discharged_kwh", stat_json(a.discharged_kwh)},
                           {"re_ratio", stat_json(a.re_ratio)},
                           {"dropped_arrivals", stat_json(a.dropped_arrivals)},
                           {"reward", stat_json(a.reward)}};
    }
    std::ofstream os(path);
    if (!os) throw RuntimeFailure("cannot write " + path.string());
    os << root.dump(2) << '\n';
}

void write_plot_csv(const std::filesystem::path& path, const std::vector<AggregateRow>& rows) {
    std::ofstream os(path);
    if (!os) throw RuntimeFailure("cannot write " + path.string());
    os << "scenario,strategy,metric,mean,std\n";
    for (const auto& a : rows) {
        const std::pair<const char*, const Stat*> metrics[] = {
            {"co2_kg", &a.co2_kg},           {"ci_g_per_kwh", &a.ci_g_per_kwh}, {"satisfaction_pct", &a.satisfaction_pct},
            {"overload_kwh", &a.overload_kwh}, {"charged_kwh", &a.charged_kwh}, {"discharged_kwh", &a.discharged_kwh},
            {"re_ratio", &a.re_ratio},       {"reward", &a.reward}};
        for (const auto& [name, s] : metrics) {
            if (s->n == 0) continue;
            os << csv_field(a.scenario) << ',' << csv_field(a.strategy) << ',' << name << ',' << fixed(s->mean) << ','
               << fixed(s->std) << '\n';
        }
    }
}

void write_delta_csv(const std::filesystem::path& path, const std::vector<DeltaRow>& rows) {
    std::ofstream os(path);
    if (!os) throw RuntimeFailure("cannot write " + path.string());
    os << "arm,scenario,strategy,d_co2_kg,d_ci_g_per_kwh,d_satisfaction_pct,d_overload_kwh,d_charged_kwh,"
          "d_discharged_kwh,d_re_ratio,d_reward\n";
    for (const auto& d : rows) {
        os << csv_field(d.arm) << ',' << csv_field(d.scenario) << ',' << csv_field(d.strategy) << ',' << fixed(d.co2_kg)
           << ',' << fixed(d.ci_g_per_kwh) << ',' << fixed(d.satisfaction_pct) << ',' << fixed(d.overload_kwh) << ','
           << fixed(d.charged_kwh) << ',' << fixed(d.discharged_kwh) << ',' << fixed(d.re_ratio) << ','
           << fixed(d.reward) << '\n';
    }
}

}  // namespace evcharge
