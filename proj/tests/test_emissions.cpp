#include "evcharge/emissions.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace evcharge;

TEST(StepEmission, WorkedValues) {
    EXPECT_EQ(step_emission(10.0, 0.5), 5.0);
    EXPECT_EQ(step_emission(1.0, 0.7), 0.7);
    EXPECT_EQ(step_emission(0.0, 0.4), 0.0);
    EXPECT_THROW(step_emission(1.0, -0.1), std::invalid_argument);
    EXPECT_DOUBLE_EQ(grams_to_kg(350.0), 0.35);
}

TEST(CarbonIntensity, TablePairs) {
    struct Row {
        double kg, kwh, ci;
    };
    const Row rows[] = {{67.62, 340.58, 198.54},
                        {8.52, 355.53, 23.96},
                        {48.41, 314.21, 154.07},
                        {25.47, 363.54, 70.06},
                        {10.02, 267.53, 37.45}};
    for (const auto& r : rows) EXPECT_NEAR(*carbon_intensity_metric(r.kg, r.kwh), r.ci, 0.01);
    EXPECT_EQ(*carbon_intensity_metric(0.0, 100.0), 0.0);
    EXPECT_FALSE(carbon_intensity_metric(1.0, 0.0).has_value());
}

TEST(SelfConsumption, Ratio) {
    EXPECT_EQ(*re_self_consumption(40, 80), 0.5);
    EXPECT_FALSE(re_self_consumption(0, 0).has_value());
    EXPECT_EQ(*re_self_consumption(12.5, 12.5), 1.0);
}

TEST(Ledger, TotalsAreSumsProperty) {
    Rng rng(4);
    EmissionLedger ledger;
    double sum = 0.0;
    double charged = 0.0;
    for (int t = 0; t < 96; ++t) {
        StepResult r;
        r.dt_hours = 0.25;
        r.grid_import_ev_kw = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0, 200);
        r.carbon_intensity = rng.uniform(0.1, 0.4);
        r.served_kwh = rng.uniform(0, 50);
        const double kg = ledger.record(r);
        EXPECT_GE(kg, 0.0);
        sum += kg;
        charged += r.served_kwh;
    }
    ASSERT_EQ(ledger.per_step_kg().size(), 96u);
    EXPECT_NEAR(ledger.total_kg(), sum, 1e-9 * sum);
    EXPECT_NEAR(ledger.total_charged_kwh(), charged, 1e-9 * charged);
    EXPECT_NEAR(*ledger.carbon_intensity(), 1000.0 * ledger.total_kg() / ledger.total_charged_kwh(), 1e-9);
}

TEST(Ledger, ZeroImportMeansZeroEmission) {
    EmissionLedger ledger;
    for (int t = 0; t < 10; ++t) {
        StepResult r;
        r.served_kwh = 3.0;
        r.carbon_intensity = 0.3;
        ledger.record(r);
    }
    EXPECT_EQ(ledger.total_kg(), 0.0);
}

TEST(Ledger, NetExportCredit) {
    StepResult r;
    r.dt_hours = 0.25;
    r.grid_import_ev_kw = 40.0;
    r.net_grid_import_ev_kw = 10.0;
    r.carbon_intensity = 0.5;
    EmissionLedger import_only;
    EmissionLedger netted({true});
    EXPECT_EQ(import_only.record(r), 5.0);
    EXPECT_EQ(netted.record(r), 1.25);
}
