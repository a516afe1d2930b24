// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "acs/abb/sim.hpp"
#include "acs/common/error.hpp"

using namespace acs;
using namespace acs::abb;

TEST_CASE("delay and power anchors are exact") {
    const auto m = default_model();
    CHECK(m.delay.fmax(0.8) == doctest::Approx(420e6).epsilon(1e-12));
    CHECK(m.delay.fmax(0.5) == doctest::Approx(100e6).epsilon(1e-12));
    CHECK(m.power.total_mw(0.8, 420e6) == doctest::Approx(123.0).epsilon(1e-12));
    CHECK(m.power.dynamic_mw(0.8, 420e6) / m.power.total_mw(0.8, 420e6) == doctest::Approx(0.946).epsilon(1e-12));
    CHECK(m.power.dynamic_mw(0.8, 420e6) / m.power.dynamic_mw(0.5, 100e6) == doctest::Approx(10.7).epsilon(1e-12));
    CHECK(m.power.leakage_mw(0.8) / m.power.leakage_mw(0.5) == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(m.power.total_mw(0.8, 0.0) == doctest::Approx(m.power.leakage_mw(0.8)));
}

TEST_CASE("delay is decreasing in supply and forward bias") {
    const auto m = default_model();
    double prev = 1e9;
    for (double v = 0.45; v <= 1.0; v += 0.01) {
        const double d = m.delay.delay_scale(v, 0.0);
        CHECK(d < prev);
        CHECK(m.delay.delay_scale(v, 0.2) < d);
        prev = d;
    }
    CHECK_THROWS_AS(m.delay.speed(0.3, 0.0), DomainError);
}

TEST_CASE("population: sorted, normalized, 1% monitored") {
    const PathPopulation pop(PopulationConfig{});
    CHECK(pop.delays().back() == 1.0);
    CHECK(std::is_sorted(pop.delays().begin(), pop.delays().end()));
    CHECK(pop.monitored_count() == 100);
    CHECK(pop.monitored(pop.delays().size() - 1));
    CHECK_FALSE(pop.monitored(pop.delays().size() - 101));
}

TEST_CASE("detection examples and fast path against exhaustive scan") {
    std::vector<double> d{0.2, 0.5, 0.9};
    std::vector<bool> mon{false, false, true}, all{true, true, true};
    CHECK_FALSE(detect(d, mon, all, 10.0, 1.0).pre_error);
    CHECK_FALSE(detect(d, mon, all, 10.0, 1.0).error);
    d[2] = 1.0 - 0.05;  // period - margin / 2
    auto r = detect(d, mon, all, 1.0, 0.1);
    CHECK(r.pre_error);
    CHECK_FALSE(r.error);
    d[1] = 1.2;
    CHECK(detect(d, mon, all, 1.0, 0.1).error);

    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        PopulationConfig pc;
        pc.paths = 500 + static_cast<int>(rng() % 2000);
        pc.seed = rng();
        const PathPopulation pop(pc);
        std::uniform_real_distribution<double> u(0.8, 1.2), mg(0.0, 0.2), re(0.5, 1.0);
        const double scale = u(rng), period = u(rng), margin = mg(rng) * period, reach = re(rng);
        std::vector<double> scaled;
        std::vector<bool> monitored, active;
        for (std::size_t i = 0; i < pop.delays().size(); ++i) {
            scaled.push_back(pop.delays()[i] * scale);
            monitored.push_back(pop.monitored(i));
            active.push_back(pop.delays()[i] <= reach);
        }
        const auto slow = detect(scaled, monitored, active, period, margin);
        const auto fast = detect_exercised(pop, scale, period, margin, reach);
        CHECK(slow.pre_errors == fast.pre_errors);
        CHECK(slow.errors == fast.errors);
    }
}

TEST_CASE("controller: one step lands exactly after the settle latency") {
    ControllerConfig cfg;
    AbbController c(cfg);
    std::vector<double> v;
    v.push_back(c.step(true));
    for (int i = 1; i < 400; ++i) v.push_back(c.step(false));
    // v[k] is the bias in effect at cycle k + 1
    CHECK(v[308] < cfg.step);
    CHECK(v[309] == doctest::Approx(cfg.step));
    for (std::size_t i = 1; i < 310; ++i) CHECK(v[i] >= v[i - 1]);
}

TEST_CASE("controller: decays to zero when quiet and stays in bounds") {
    ControllerConfig cfg;
    AbbController c(cfg);
    for (int i = 0; i < 5000; ++i) c.step(i % 50 == 0);
    CHECK(c.vbb() > 0);
    for (int i = 0; i < 100000; ++i) c.step(false);
    CHECK(c.vbb() == 0.0);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200000; ++i) {
        const double v = c.step(rng() % 7 == 0);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= cfg.vbb_max + 1e-12);
    }
}

TEST_CASE("400 MHz probe: errors below the unbiased minimum, none above") {
    const auto m = default_model();
    AbbScenario s;
    s.freq = 400e6;
    s.duration = 20000;
    s.abb_on = false;
    s.vdd = 0.745;
    CHECK(simulate(m, s).total_errors == 0);
    s.vdd = 0.70;
    CHECK(simulate(m, s).total_errors > 0);
    s.vdd = 0.65;
    s.vdd_start = 0.8;
    s.ramp_cycles = 20000;
    s.duration = 30000;
    s.abb_on = true;
    const auto t = simulate(m, s);
    CHECK(t.total_errors == 0);
    CHECK(t.total_pre_errors > 0);
    s.abb_on = false;
    const auto off = simulate(m, s);
    CHECK(off.total_errors > 0);
    for (float v : off.vbb) CHECK(v == 0.0f);
}

TEST_CASE("overclocked three-phase run: pre-errors only in the intense phase, no errors") {
    const auto m = default_model();
    AbbScenario s;
    s.vdd = 0.8;
    s.freq = 470e6;
    s.duration = 470000;
    s.phases = {{"rbe", 100000, 0.9, 0.05, 0.8, 5000},
                {"marshal", 40000, 0.6, 0.02, 0.3, 5000},
                {"riscv", 80000, 1.0, 0.05, 1.0, 5000}};
    const auto t = simulate(m, s);
    CHECK(t.total_errors == 0);
    CHECK(t.total_pre_errors > 0);
    for (std::uint64_t c = 0; c < t.cycles(); ++c)
        if (t.pre_errors[c]) REQUIRE(t.phase[c] == 2);
    CHECK(t.up_ramps >= 2);
    s.abb_on = false;
    CHECK(simulate(m, s).total_errors > 0);
    const auto again = simulate(m, s);
    CHECK(again.csv(1000) == simulate(m, s).csv(1000));
}

TEST_CASE("safety under supply ripple") {
    const auto m = default_model();
    int checked = 0;
    for (double vdd : {0.66, 0.70, 0.74})
        for (double amp : {0.005, 0.01}) {
            AbbScenario s;
            s.freq = 400e6;
            s.duration = 60000;
            s.droop_amplitude = amp;
            s.droop_period = 20000;
            s.vdd = vdd + 0.1;
            s.abb_on = false;
            if (simulate(m, s).total_errors > 0) continue;
            ++checked;
            s.vdd = vdd;
            s.vdd_start = 0.8;
            s.ramp_cycles = 20000;
            s.abb_on = true;
            CHECK(simulate(m, s).total_errors == 0);
        }
    CHECK(checked == 6);
}

TEST_CASE("minimum supply search") {
    const auto m = default_model();
    const auto off = find_min_vdd(m, 400e6, false);
    const auto on = find_min_vdd(m, 400e6, true);
    CHECK(off.vdd == doctest::Approx(0.74).epsilon(0.01 / 0.74));
    CHECK(on.vdd == doctest::Approx(0.65).epsilon(0.01 / 0.65));
    CHECK(on.power_mw / m.power.total_mw(0.8, 400e6) == doctest::Approx(0.70).epsilon(0.05 / 0.70));
    CHECK_THROWS_AS(find_min_vdd(m, 900e6, false), DomainError);
}
