#pragma once

// Exhaustive-search reference for small horizon problems. It scores every
// schedule of per-vehicle net energies on a fixed grid with the MPC objective
// written out directly, without going through the LP formulation.

#include "evcharge/mpc.hpp"
#include "evcharge/random.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace evcharge::oracle {

struct OracleResult {
    double best = std::numeric_limits<double>::infinity();
    /// Step-0 net energy per vehicle of every schedule within `tie_tol` of best.
    std::vector<std::vector<double>> optimal_first_steps;
    long long evaluated = 0;
};

inline double oracle_required(const MpcEv& ev, int H, double max_charge, bool v2g) {
    const double need = std::max(0.0, ev.target_soc - ev.soc) * ev.capacity_kwh;
    if (ev.steps_left <= H) return v2g ? (ev.target_soc - ev.soc) * ev.capacity_kwh : need;
    return std::max(0.0, need - (ev.steps_left - H) * max_charge);
}

inline double oracle_objective(const MpcInputs& in, const MpcParams& p, const std::vector<std::vector<double>>& e) {
    const bool v2g = p.mode == MpcMode::V2G;
    const int H = in.horizon;
    double obj = 0.0;
    for (int h = 0; h < H; ++h) {
        double total = 0.0;
        for (std::size_t k = 0; k < e.size(); ++k) {
            const double x = e[k][static_cast<std::size_t>(h)];
            total += x;
            if (v2g) obj += in.price_charge[h] * std::max(x, 0.0) - in.price_discharge[h] * std::max(-x, 0.0);
        }
        obj += p.lambda_emission * in.carbon_intensity[h] * total;
        if (!v2g) obj += std::abs(total - in.setpoint_kw[h] * in.dt_hours);
        const double room = (in.transformer_kw - in.dr_reduction_kw[h] - in.inflexible_kw[h] + in.renewables_kw[h]) *
                            in.dt_hours;
        obj += p.overload_penalty * std::max(0.0, total - room);
    }
    for (std::size_t k = 0; k < e.size(); ++k) {
        double sum = 0.0;
        for (double x : e[k]) sum += x;
        obj += p.slack_penalty * std::max(0.0, oracle_required(in.evs[k], H, in.max_charge_kwh, v2g) - sum);
    }
    return obj;
}

inline OracleResult exhaustive_search(const MpcInputs& in, const MpcParams& p, double cell = 0.1,
                                      double tie_tol = 1e-7) {
    const bool v2g = p.mode == MpcMode::V2G;
    const int H = in.horizon;
    const std::size_t n = in.evs.size();
    std::vector<std::vector<double>> e(n, std::vector<double>(static_cast<std::size_t>(H), 0.0));
    std::vector<std::pair<std::size_t, int>> dims;
    for (std::size_t k = 0; k < n; ++k) {
        const bool needs = in.evs[k].target_soc > in.evs[k].soc;
        if (!v2g && !needs) continue;
        for (int h = 0; h < std::min(H, in.evs[k].steps_left); ++h) dims.push_back({k, h});
    }
    const int up = static_cast<int>(std::lround(in.max_charge_kwh / cell));
    const int down = v2g ? static_cast<int>(std::lround(in.max_discharge_kwh / cell)) : 0;

    struct Scored {
        double obj;
        std::vector<double> first;
    };
    std::vector<Scored> scored;
    OracleResult r;
    std::function<void(std::size_t)> rec = [&](std::size_t d) {
        if (d == dims.size()) {
            // Battery limits at every intermediate step.
            for (std::size_t k = 0; k < n; ++k) {
                double level = in.evs[k].soc * in.evs[k].capacity_kwh;
                for (double x : e[k]) {
                    level += x;
                    if (level < -1e-9 || level > in.evs[k].capacity_kwh + 1e-9) return;
                }
            }
            ++r.evaluated;
            const double obj = oracle_objective(in, p, e);
            if (obj > r.best + tie_tol) return;
            r.best = std::min(r.best, obj);
            std::vector<double> first(n);
            for (std::size_t k = 0; k < n; ++k) first[k] = e[k][0];
            scored.push_back({obj, std::move(first)});
            return;
        }
        auto [k, h] = dims[d];
        for (int i = -down; i <= up; ++i) {
            e[k][static_cast<std::size_t>(h)] = i * cell;
            rec(d + 1);
        }
        e[k][static_cast<std::size_t>(h)] = 0.0;
    };
    rec(0);
    for (auto& s : scored) {
        if (s.obj <= r.best + tie_tol) r.optimal_first_steps.push_back(std::move(s.first));
    }
    return r;
}

/// Random toy instance with every quantity on the energy grid.
inline MpcInputs random_toy(Rng& rng, MpcMode mode, double cell = 0.1) {
    const bool v2g = mode == MpcMode::V2G;
    MpcInputs in;
    const int n_ev = 1 + static_cast<int>(rng.below(2));
    const double ratings[] = {0.5, 0.8, 1.0};
    in.max_charge_kwh = ratings[rng.below(3)];
    in.max_discharge_kwh = v2g ? ratings[rng.below(2)] : 0.0;
    const int values = v2g ? static_cast<int>(std::lround((in.max_charge_kwh + in.max_discharge_kwh) / cell)) + 1
                           : static_cast<int>(std::lround(in.max_charge_kwh / cell)) + 1;
    // Keep the search space below ~2.5M schedules.
    int H = 1 + static_cast<int>(rng.below(4));
    while (std::pow(static_cast<double>(values), n_ev * H) > 2.5e6) --H;
    in.horizon = H;
    in.dt_hours = 0.25;
    in.transformer_kw = 100.0;
    in.carbon_intensity.resize(H);
    in.inflexible_kw.resize(H);
    in.renewables_kw = Vector::Zero(H);
    in.dr_reduction_kw = Vector::Zero(H);
    in.price_charge = Vector::Constant(H, 0.25);
    in.price_discharge = Vector::Constant(H, 0.15);
    in.setpoint_kw = Vector::Zero(H);
    for (int h = 0; h < H; ++h) {
        in.carbon_intensity[h] = std::round(rng.uniform(0.05, 0.6) * 100.0) / 100.0;
        // Usable transformer room of 0.1 k kWh per step, sometimes binding.
        const int room_cells = static_cast<int>(rng.below(25));
        in.inflexible_kw[h] = in.transformer_kw - room_cells * cell / in.dt_hours;
    }
    for (int k = 0; k < n_ev; ++k) {
        MpcEv ev;
        ev.port = k;
        ev.capacity_kwh = static_cast<double>(2 + rng.below(5));
        const int level_cells = static_cast<int>(rng.below(static_cast<std::uint64_t>(ev.capacity_kwh / cell * 0.6)));
        ev.soc = level_cells * cell / ev.capacity_kwh;
        const int need_cells = static_cast<int>(rng.below(static_cast<std::uint64_t>(H * in.max_charge_kwh / cell + 8)));
        const int target_cells = std::min(level_cells + need_cells,
                                          static_cast<int>(std::lround(ev.capacity_kwh / cell)));
        ev.target_soc = target_cells * cell / ev.capacity_kwh;
        ev.steps_left = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(H + 2)));
        in.evs.push_back(ev);
    }
    return in;
}

}  // namespace evcharge::oracle
