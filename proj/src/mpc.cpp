#include "evcharge/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace evcharge {

using Term = lp::Problem<double>::Term;

std::string_view to_string(MpcMode mode) { return mode == MpcMode::G2V ? "G2V" : "V2G"; }

void validate(const MpcParams& p) {
    if (p.horizon < 1) throw ConfigError("mpc.horizon must be >= 1");
    if (!(p.lambda_emission >= 0.0)) throw ConfigError("mpc.lambda_emission must be >= 0");
    if (!(p.slack_penalty >= 0.0) || !(p.overload_penalty >= 0.0)) throw ConfigError("mpc penalties must be >= 0");
    if (p.max_cut_rounds < 1) throw ConfigError("mpc.max_cut_rounds must be >= 1");
}

MpcInputs mpc_inputs(const Simulator& sim, const MpcParams& params) {
    const auto& c = sim.config();
    const auto& prof = sim.profiles();
    const int t = sim.step_index();
    MpcInputs in;
    in.horizon = std::max(1, std::min(params.horizon, c.episode_steps - t));
    in.dt_hours = c.step_hours;
    in.max_charge_kwh = c.evse_max_charge_kw * c.step_hours;
    in.max_discharge_kwh = c.evse_max_discharge_kw * c.step_hours;
    in.station_charge_kwh =
        evse_power({c.station_current_max_a()}, c.voltage, c.phases, c.charge_efficiency) * c.step_hours;
    in.station_discharge_kwh =
        -evse_power({c.station_current_min_a()}, c.voltage, c.phases, c.discharge_efficiency) * c.step_hours;
    in.transformer_kw = c.transformer_capacity_kw;

    const int H = in.horizon;
    in.carbon_intensity = forecast_window(prof.carbon_intensity, t, H).values;
    in.inflexible_kw = forecast_window(prof.inflexible_kw, t, H).values;
    in.renewables_kw = forecast_window(prof.pv_kw, t, H).values + forecast_window(prof.wind_kw, t, H).values;
    in.dr_reduction_kw = forecast_window(prof.dr_reduction_kw, t, H).values;
    in.price_charge = forecast_window(prof.price_charge, t, H).values;
    in.price_discharge = forecast_window(prof.price_discharge, t, H).values;
    in.setpoint_kw = params.setpoint_kw ? forecast_window(*params.setpoint_kw, t, H).values : Vector::Zero(H);

    const auto& ports = sim.state().ports;
    for (std::size_t p = 0; p < ports.size(); ++p) {
        if (!ports[p]) continue;
        const auto& ev = *ports[p];
        in.evs.push_back({static_cast<int>(p), ev.soc, ev.session.battery_capacity_kwh, ev.session.target_soc,
                          ev.session.departure_step - t});
    }
    return in;
}

HorizonProblem build_horizon_problem(MpcMode mode, const MpcInputs& in, const MpcParams& params) {
    if (in.horizon < 1) throw std::invalid_argument("mpc: horizon shorter than 1");
    const int H = in.horizon;
    const bool v2g = mode == MpcMode::V2G;
    const double inf = std::numeric_limits<double>::infinity();
    const double lambda = params.lambda_emission;

    HorizonProblem hp;
    auto& lp = hp.lp;
    const std::size_t n = in.evs.size();
    hp.charge.assign(n, std::vector<int>(static_cast<std::size_t>(H), -1));
    hp.discharge.assign(v2g ? n : 0, std::vector<int>(static_cast<std::size_t>(H), -1));
    hp.shortfall.assign(n, -1);
    hp.required_kwh.assign(n, 0.0);
    if (n == 0) return hp;

    for (std::size_t k = 0; k < n; ++k) {
        const auto& ev = in.evs[k];
        const int present = std::min(H, ev.steps_left);
        if (!v2g && ev.need_kwh() <= 0.0) continue;
        for (int h = 0; h < present; ++h) {
            const double ci = in.carbon_intensity[h];
            const double ch_cost = v2g ? in.price_charge[h] + lambda * ci : lambda * ci;
            hp.charge[k][static_cast<std::size_t>(h)] = lp.add_variable(0.0, in.max_charge_kwh, ch_cost);
            if (v2g) {
                hp.discharge[k][static_cast<std::size_t>(h)] =
                    lp.add_variable(0.0, in.max_discharge_kwh, -in.price_discharge[h] - lambda * ci);
            }
        }
    }

    auto net_terms = [&](std::size_t k, int upto) {
        std::vector<Term> terms;
        for (int h = 0; h < upto; ++h) {
            const int x = hp.charge[k][static_cast<std::size_t>(h)];
            if (x >= 0) terms.push_back({x, 1.0});
            if (v2g) {
                const int y = hp.discharge[k][static_cast<std::size_t>(h)];
                if (y >= 0) terms.push_back({y, -1.0});
            }
        }
        return terms;
    };
    auto step_terms = [&](int h) {
        std::vector<Term> terms;
        for (std::size_t k = 0; k < n; ++k) {
            const int x = hp.charge[k][static_cast<std::size_t>(h)];
            if (x >= 0) terms.push_back({x, 1.0});
            if (v2g) {
                const int y = hp.discharge[k][static_cast<std::size_t>(h)];
                if (y >= 0) terms.push_back({y, -1.0});
            }
        }
        return terms;
    };

    // Departure energy with a penalised shortfall, and the battery ceiling.
    for (std::size_t k = 0; k < n; ++k) {
        const auto& ev = in.evs[k];
        auto terms = net_terms(k, H);
        if (terms.empty()) continue;
        // Vehicles leaving inside the horizon must reach target (V2G may draw
        // a surplus down to it). Later departures only owe what the remaining
        // steps beyond the horizon cannot supply, and may not end the horizon
        // below their current level.
        const int beyond = ev.steps_left - H;
        const double req = beyond <= 0 ? (v2g ? (ev.target_soc - ev.soc) * ev.capacity_kwh : ev.need_kwh())
                                        : std::max(0.0, ev.need_kwh() - beyond * in.max_charge_kwh);
        hp.required_kwh[k] = req;
        hp.shortfall[k] = lp.add_variable(0.0, inf, params.slack_penalty);
        auto with_slack = terms;
        with_slack.push_back({hp.shortfall[k], 1.0});
        lp.add_row(with_slack, lp::RowType::GreaterEqual, req);
        lp.add_row(terms, lp::RowType::LessEqual, (1.0 - ev.soc) * ev.capacity_kwh);
        if (v2g) lp.add_row(terms, lp::RowType::GreaterEqual, -ev.soc * ev.capacity_kwh);
    }

    const double fleet_charge = static_cast<double>(n) * in.max_charge_kwh;
    const double fleet_discharge = static_cast<double>(n) * in.max_discharge_kwh;
    for (int h = 0; h < H; ++h) {
        auto terms = step_terms(h);

        // Transformer as a soft limit on the site balance.
        const double usable = in.transformer_kw - in.dr_reduction_kw[h];
        const double base = in.inflexible_kw[h] - in.renewables_kw[h];
        const int o = lp.add_variable(0.0, inf, params.overload_penalty);
        hp.overload.push_back(o);
        auto tr = terms;
        tr.push_back({o, -1.0});
        lp.add_row(tr, lp::RowType::LessEqual, (usable - base) * in.dt_hours);

        if (terms.empty()) continue;
        if (in.station_charge_kwh < fleet_charge)
            lp.add_row(terms, lp::RowType::LessEqual, in.station_charge_kwh);
        if (v2g && in.station_discharge_kwh < fleet_discharge)
            lp.add_row(terms, lp::RowType::GreaterEqual, -in.station_discharge_kwh);

        if (!v2g) {
            const int u = lp.add_variable(0.0, inf, 1.0);
            hp.tracking.push_back(u);
            const double target = in.setpoint_kw[h] * in.dt_hours;
            auto above = terms;
            above.push_back({u, -1.0});
            lp.add_row(above, lp::RowType::LessEqual, target);
            auto below = terms;
            below.push_back({u, 1.0});
            lp.add_row(below, lp::RowType::GreaterEqual, target);
        }
    }
    return hp;
}

namespace {

double value(const Vector& x, int idx) { return idx >= 0 ? x[idx] : 0.0; }

Matrix net_schedule(const HorizonProblem& hp, const Vector& x, int H) {
    const auto n = static_cast<Eigen::Index>(hp.charge.size());
    Matrix net = Matrix::Zero(n, H);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (int h = 0; h < H; ++h) {
            net(k, h) = value(x, hp.charge[static_cast<std::size_t>(k)][static_cast<std::size_t>(h)]);
            if (!hp.discharge.empty())
                net(k, h) -= value(x, hp.discharge[static_cast<std::size_t>(k)][static_cast<std::size_t>(h)]);
        }
    }
    return net;
}

}  // namespace

MpcPlan solve_horizon(const MpcInputs& in, const MpcParams& params) {
    validate(params);
    const int H = in.horizon;
    HorizonProblem hp = build_horizon_problem(params.mode, in, params);
    MpcPlan plan;
    plan.net_kwh = Matrix::Zero(static_cast<Eigen::Index>(in.evs.size()), H);
    plan.overload_kwh = Vector::Zero(H);
    if (hp.lp.num_vars() == 0) return plan;

    std::vector<std::vector<char>> added(in.evs.size(), std::vector<char>(static_cast<std::size_t>(H), 0));
    lp::Solution<double> sol;
    for (int round = 0; round < params.max_cut_rounds; ++round) {
        sol = lp::solve(hp.lp);
        plan.lp_iterations += sol.iterations;
        if (sol.status != lp::Status::Optimal || params.mode == MpcMode::G2V) break;

        // Add the intermediate SoC rows this optimum violates.
        const Matrix net = net_schedule(hp, sol.x, H);
        int cuts = 0;
        for (std::size_t k = 0; k < in.evs.size(); ++k) {
            const auto& ev = in.evs[k];
            double cum = 0.0;
            for (int h = 0; h < H; ++h) {
                cum += net(static_cast<Eigen::Index>(k), h);
                const double level = ev.soc * ev.capacity_kwh + cum;
                if (added[k][static_cast<std::size_t>(h)]) continue;
                if (level < -1e-9 || level > ev.capacity_kwh + 1e-9) {
                    std::vector<Term> terms;
                    for (int g = 0; g <= h; ++g) {
                        const int x = hp.charge[k][static_cast<std::size_t>(g)];
                        const int y = hp.discharge[k][static_cast<std::size_t>(g)];
                        if (x >= 0) terms.push_back({x, 1.0});
                        if (y >= 0) terms.push_back({y, -1.0});
                    }
                    hp.lp.add_row(terms, lp::RowType::LessEqual, (1.0 - ev.soc) * ev.capacity_kwh);
                    hp.lp.add_row(terms, lp::RowType::GreaterEqual, -ev.soc * ev.capacity_kwh);
                    added[k][static_cast<std::size_t>(h)] = 1;
                    ++cuts;
                }
            }
        }
        if (cuts == 0) break;
        if (round + 1 == params.max_cut_rounds) sol.status = lp::Status::IterationLimit;
    }

    plan.status = sol.status;
    if (sol.status != lp::Status::Optimal) return plan;
    plan.objective = sol.objective;
    plan.net_kwh = net_schedule(hp, sol.x, H);
    for (int h = 0; h < H; ++h) {
        plan.overload_kwh[h] = sol.x[hp.overload[static_cast<std::size_t>(h)]];
        plan.emission_term += in.carbon_intensity[h] * plan.net_kwh.col(h).sum();
    }
    return plan;
}

ActionVector plan_to_action(const MpcPlan& plan, const MpcInputs& in, int n_ports) {
    ActionVector a = ActionVector::Zero(n_ports);
    if (plan.net_kwh.cols() == 0) return a;
    for (std::size_t k = 0; k < in.evs.size(); ++k) {
        const double e = plan.net_kwh(static_cast<Eigen::Index>(k), 0);
        double action = 0.0;
        if (e > 1e-9) action = e / in.max_charge_kwh;
        if (e < -1e-9 && in.max_discharge_kwh > 0.0) action = e / in.max_discharge_kwh;
        a[in.evs[k].port] = std::clamp(action, -1.0, 1.0);
    }
    return a;
}

ActionVector mpc_act(const MpcInputs& in, const MpcParams& params, int n_ports, lp::Status* status) {
    const MpcPlan plan = solve_horizon(in, params);
    if (status) *status = plan.status;
    if (plan.status != lp::Status::Optimal) return ActionVector::Zero(n_ports);
    return plan_to_action(plan, in, n_ports);
}

MpcController::MpcController(MpcParams params) : params_(std::move(params)) { validate(params_); }

ActionVector MpcController::act(const Simulator& sim) {
    lp::Status status = lp::Status::Optimal;
    ActionVector a = mpc_act(mpc_inputs(sim, params_), params_, sim.config().n_ports, &status);
    if (status != lp::Status::Optimal) {
        ++failures_;
        std::cerr << "warning: " << name() << " solve at step " << sim.step_index() << " returned "
                  << lp::to_string(status) << "; applying zero action\n";
    }
    return a;
}

}  // namespace evcharge
