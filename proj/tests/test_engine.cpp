#include "evcharge/engine.hpp"
#include "evcharge/site.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace evcharge;

namespace {

EvState ev_at(double soc, double capacity, double tau = 1.0) {
    EvSession s;
    s.battery_capacity_kwh = capacity;
    s.initial_soc = std::min(soc, 0.85);
    s.target_soc = 0.85;
    s.cv_threshold = tau;
    EvState ev = make_ev_state(s);
    ev.soc = soc;
    return ev;
}

EvSession session(int id, int port, int arrive, int depart, double cap, double soc0) {
    EvSession s;
    s.id = id;
    s.port = port;
    s.arrival_step = arrive;
    s.departure_step = depart;
    s.battery_capacity_kwh = cap;
    s.initial_soc = soc0;
    return s;
}

std::shared_ptr<const SiteProfiles> profiles_for(const ScenarioConfig& c, PenetrationSpec pen = {}) {
    return std::make_shared<const SiteProfiles>(build_site_profiles(c, pen));
}

}  // namespace

TEST(EvsePower, ReferenceValues) {
    EXPECT_NEAR(evse_power({32.0}, 400.0, 3, 1.0), 22.17, 0.005);
    EXPECT_EQ(evse_power({0.0}, 400.0, 3, 1.0), 0.0);
    EXPECT_NEAR(evse_power({-16.0}, 400.0, 3, 1.0), -11.09, 0.005);
    // Independent oracle: 32 * 400 * sqrt(3) W.
    EXPECT_DOUBLE_EQ(evse_power({32.0}, 400.0, 3, 1.0), 32.0 * 400.0 * 1.7320508075688772 / 1000.0);
    EXPECT_DOUBLE_EQ(evse_current(evse_power({13.0}, 230.0, 1, 0.9), 230.0, 1, 0.9), 13.0);
}

TEST(StationLimit, ProportionalScaling) {
    Vector req(2);
    req << 20, 20;
    EXPECT_TRUE(normalize_station_currents(req, 32, -32).isApprox((Vector(2) << 16, 16).finished()));
    req << 10, 10;
    EXPECT_EQ(normalize_station_currents(req, 32, -32), req);
    req << -30, -20;
    EXPECT_TRUE(normalize_station_currents(req, 32, -32).isApprox((Vector(2) << -19.2, -12.8).finished()));
}

TEST(StationLimit, IdempotentAndNonIncreasingProperty) {
    Rng rng(5);
    for (int trial = 0; trial < 2000; ++trial) {
        Vector req(5);
        for (Eigen::Index i = 0; i < 5; ++i) req[i] = rng.uniform(-40.0, 40.0);
        const double hi = rng.uniform(0.0, 100.0);
        const double lo = -rng.uniform(0.0, 100.0);
        Vector once = normalize_station_currents(req, hi, lo);
        Vector twice = normalize_station_currents(once, hi, lo);
        EXPECT_TRUE(twice.isApprox(once, 1e-12) || (twice - once).norm() < 1e-12);
        EXPECT_LE(std::abs(once.sum()), std::abs(req.sum()) + 1e-12);
        EXPECT_LE(once.sum(), hi + 1e-9);
        EXPECT_GE(once.sum(), lo - 1e-9);
    }
}

TEST(SocStep, WorkedExamples) {
    EXPECT_NEAR(soc_step(ev_at(0.5, 50), 22, 0.25).soc, 0.61, 1e-12);
    EXPECT_NEAR(soc_step(ev_at(0.5, 50), -22, 0.25).soc, 0.39, 1e-12);
    // Exponential branch oracle: 1 + (0.9 - 1) * exp(5.5 / (50 * (0.8 - 1))).
    const double oracle = 1.0 - 0.1 * std::exp(-0.55);
    EXPECT_NEAR(soc_step(ev_at(0.9, 50, 0.8), 22, 0.25).soc, oracle, 1e-12);
    EXPECT_NEAR(oracle, 0.9423, 1e-4);
}

TEST(SocStep, LinearWhenTauIsOneProperty) {
    Rng rng(9);
    for (int i = 0; i < 5000; ++i) {
        const double soc = rng.uniform();
        const double cap = rng.uniform(10, 50);
        const double p = rng.uniform(-22, 22);
        const double expect = std::clamp(soc + p * 0.25 / cap, 0.0, 1.0);
        EXPECT_NEAR(soc_step(ev_at(soc, cap, 1.0), p, 0.25).soc, expect, 1e-12);
    }
}

TEST(SocStep, ExponentialBranchMonotoneAndBoundedProperty) {
    Rng rng(11);
    for (int i = 0; i < 2000; ++i) {
        const double tau = rng.uniform(0.5, 0.95);
        EvState ev = ev_at(rng.uniform(tau, 1.0), rng.uniform(10, 50), tau);
        for (int k = 0; k < 50; ++k) {
            EvState next = soc_step(ev, rng.uniform(0, 22), 0.25);
            ASSERT_GE(next.soc, ev.soc);
            ASSERT_LE(next.soc, 1.0);
            ASSERT_GE(next.energy_charged_kwh, ev.energy_charged_kwh);
            ev = next;
        }
    }
}

TEST(SocStep, ClippedEnergyIsNotServed) {
    EvState ev = ev_at(0.95, 20);
    EvState next = soc_step(ev, 22, 0.25);
    EXPECT_EQ(next.soc, 1.0);
    EXPECT_NEAR(next.energy_charged_kwh, 1.0, 1e-12);
    EvState empty = soc_step(ev_at(0.05, 20), -22, 0.25);
    EXPECT_EQ(empty.soc, 0.0);
    EXPECT_NEAR(empty.energy_discharged_kwh, 1.0, 1e-12);
}

TEST(SiteBalance, ReferenceValues) {
    Vector ev(1);
    ev << 50;
    EXPECT_EQ(site_balance(ev, 0, 30, 10), 10.0);
    EXPECT_EQ(site_balance(Vector::Zero(3), 0, 0, 0), 0.0);
    EXPECT_EQ(site_balance(Vector::Zero(1), 0, 20, 0), -20.0);
}

TEST(Overload, ReferenceValues) {
    EXPECT_EQ(transformer_overload(120, 100, 0), 20.0);
    EXPECT_EQ(transformer_overload(90, 100, 20), 10.0);
    EXPECT_EQ(transformer_overload(50, 100, 0), 0.0);
}

TEST(GridImport, ReferenceValues) {
    auto a = ev_grid_import(50, 30, 10);
    EXPECT_EQ(a.import_kw, 10.0);
    EXPECT_EQ(a.curtailed_kw, 0.0);
    auto b = ev_grid_import(20, 30, 10);
    EXPECT_EQ(b.import_kw, 0.0);
    EXPECT_EQ(b.curtailed_kw, 20.0);
    auto c = ev_grid_import(0, 10, 0);
    EXPECT_EQ(c.import_kw, 0.0);
    EXPECT_EQ(c.curtailed_kw, 10.0);
}

TEST(MapAction, Linear) {
    EXPECT_EQ(map_action(1.0, 22, 22), 22.0);
    EXPECT_EQ(map_action(0.0, 22, 22), 0.0);
    EXPECT_EQ(map_action(-0.5, 22, 22), -11.0);
    EXPECT_EQ(map_action(3.0, 22, 11), 22.0);
    EXPECT_EQ(map_action(-3.0, 22, 11), -11.0);
}

TEST(Simulator, IdleSiteOnlySeesInflexibleLoad) {
    auto c = default_scenario_config(4);
    auto prof = profiles_for(c);
    Simulator sim(c, prof, SessionPlan{});
    auto r = sim.step(ActionVector::Zero(4));
    EXPECT_EQ(r.served_kwh, 0.0);
    EXPECT_EQ(r.discharged_kwh, 0.0);
    EXPECT_EQ(r.grid_import_ev_kw, 0.0);
    EXPECT_EQ(r.site_kw, prof->inflexible_kw[0]);
    EXPECT_THROW(sim.step(ActionVector::Zero(3)), std::invalid_argument);
}

TEST(Simulator, SingleEvFullRate) {
    auto c = default_scenario_config(2);
    SessionPlan plan{{session(0, 0, 0, 10, 50, 0.2)}, 0};
    Simulator sim(c, profiles_for(c), plan);
    auto r = sim.step((ActionVector(2) << 1.0, 1.0).finished());
    EXPECT_NEAR(r.served_kwh, 5.5, 1e-12);
    EXPECT_NEAR(r.ev_power_kw[0], 22.0, 1e-12);
    EXPECT_EQ(r.ev_power_kw[1], 0.0);  // empty port forced idle
    EXPECT_NEAR(sim.state().ports[0]->soc, 0.31, 1e-12);

    SessionPlan nearly_full{{session(0, 0, 0, 10, 10, 0.8)}, 0};
    Simulator sim2(c, profiles_for(c), nearly_full);
    auto r2 = sim2.step((ActionVector(2) << 1.0, 0.0).finished());
    EXPECT_NEAR(r2.served_kwh, 2.0, 1e-12);
    EXPECT_NEAR(r2.clipped_kwh, 3.5, 1e-12);
}

TEST(Simulator, DeparturesAndArrivals) {
    auto c = default_scenario_config(1);
    SessionPlan plan{{session(0, 0, 0, 2, 40, 0.5), session(1, 0, 2, 4, 40, 0.3)}, 0};
    Simulator sim(c, profiles_for(c), plan);
    ActionVector one = ActionVector::Ones(1);
    EXPECT_TRUE(sim.step(one).departures.empty());
    auto r = sim.step(one);
    ASSERT_EQ(r.departures.size(), 1u);
    EXPECT_NEAR(r.departures[0].final_soc, 0.5 + 11.0 / 40.0, 1e-12);
    ASSERT_TRUE(sim.state().ports[0]);
    EXPECT_EQ(sim.state().ports[0]->session.id, 1);
}

TEST(Simulator, StationLimitScalesCommands) {
    auto c = default_scenario_config(2);
    c.station_max_current_a = 32.0;
    SessionPlan plan{{session(0, 0, 0, 10, 50, 0.2), session(1, 1, 0, 10, 50, 0.2)}, 0};
    Simulator sim(c, profiles_for(c), plan);
    auto r = sim.step(ActionVector::Ones(2));
    EXPECT_NEAR(r.commanded_kw.sum(), evse_power({32.0}, 400, 3, 1.0), 1e-9);
    EXPECT_NEAR(r.commanded_kw[0], r.commanded_kw[1], 1e-12);
    EXPECT_NEAR(sim.state().last_total_power_kw, r.commanded_kw.sum(), 1e-12);
}

TEST(Simulator, EpisodeEndsAfterLastStep) {
    auto c = default_scenario_config(3);
    Simulator sim(c, profiles_for(c), generate_sessions(c, 1));
    int steps = 0;
    while (!sim.done()) {
        sim.step(ActionVector::Ones(3));
        ++steps;
    }
    EXPECT_EQ(steps, 96);
    EXPECT_THROW(sim.step(ActionVector::Ones(3)), RuntimeFailure);
}

TEST(Simulator, ReplayIsDeterministicAndConservesProperty) {
    auto c = default_scenario_config(6);
    auto prof = profiles_for(c, {0.5, SourceMix::Hybrid, 0.5});
    auto plan = generate_sessions(c, 77);
    Rng actions(123);
    std::vector<ActionVector> log;
    for (int t = 0; t < c.episode_steps; ++t) {
        ActionVector a(6);
        for (Eigen::Index i = 0; i < 6; ++i) a[i] = actions.uniform(-1.2, 1.2);
        log.push_back(a);
    }
    auto run = [&] {
        Simulator sim(c, prof, plan);
        std::vector<StepResult> out;
        for (const auto& a : log) out.push_back(sim.step(a));
        return out;
    };
    auto first = run();
    auto second = run();
    for (std::size_t t = 0; t < first.size(); ++t) {
        const auto& r = first[t];
        EXPECT_EQ(r.ev_power_kw, second[t].ev_power_kw);
        EXPECT_EQ(r.site_kw, second[t].site_kw);
        EXPECT_NEAR(r.served_kwh, r.ev_power_kw.cwiseMax(0.0).sum() * r.dt_hours, 1e-9);
        EXPECT_NEAR(r.discharged_kwh, -r.ev_power_kw.cwiseMin(0.0).sum() * r.dt_hours, 1e-9);
        EXPECT_GE(r.overload_kw, 0.0);
        EXPECT_GE(r.curtailed_kw, 0.0);
        EXPECT_GE(r.grid_import_ev_kw, 0.0);
        const double scale = std::max(1.0, r.renewables_available_kw + r.ev_charge_kw);
        EXPECT_NEAR(r.renewables_used_kw + r.curtailed_kw, r.renewables_available_kw, 1e-9 * scale);
        EXPECT_NEAR(r.grid_import_ev_kw + r.renewables_used_kw, r.ev_charge_kw, 1e-9 * scale);
    }
}
