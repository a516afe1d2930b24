// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "acs/config/calibration.hpp"

using namespace acs;
using namespace acs::config;

namespace {
std::filesystem::path shipped() { return std::filesystem::path(ACS_SOURCE_DIR) / "config" / "calibration.json"; }
}  // namespace

TEST_CASE("shipped calibration equals the built-in defaults") {
    const auto c = load_calibration(shipped());
    CHECK(to_json(c) == to_json(Calibration{}));
    const auto m = c.abb_model();
    const auto d = abb::default_model();
    CHECK(m.delay.vth0 == doctest::Approx(d.delay.vth0).epsilon(1e-12));
    CHECK(m.delay.k_bb == doctest::Approx(d.delay.k_bb).epsilon(1e-12));
    CHECK(m.workload_ceiling == doctest::Approx(d.workload_ceiling).epsilon(1e-12));
    CHECK(c.power_model().total_mw(0.8, 420e6) == doctest::Approx(123.0).epsilon(1e-9));
}

TEST_CASE("overrides reach the models") {
    auto j = nlohmann::json::parse(R"({"rbe":{"compute_overhead":0},"tiler":{"l3_bytes_per_cycle":4}})");
    const auto c = calibration_from_json(j);
    CHECK(c.rbe.compute_overhead == 0);
    CHECK(c.tiler.rbe.compute_overhead == 0);
    CHECK(c.tiler.l3_bytes_per_cycle == 4.0);
    const auto job = rbe::make_dense_job(quant::ConvMode::Conv3x3, 2, 4, 4, 64, 64, 3, 3);
    CHECK(rbe::estimate_cycles(job, c.rbe).total_cycles < rbe::estimate_cycles(job).total_cycles);
    CHECK(c.dma.setup_cycles == 10);
}

TEST_CASE("bad calibration files are rejected") {
    CHECK_THROWS_AS(calibration_from_json(nlohmann::json::parse(R"({"rbe":{"compute_overhed":3}})")), ValidationError);
    CHECK_THROWS_AS(calibration_from_json(nlohmann::json::parse(R"({"version":2})")), ValidationError);
    CHECK_THROWS_AS(calibration_from_json(nlohmann::json::parse(R"({"dma":{"bytes_per_cycle":0}})")), ValidationError);
    CHECK_THROWS_AS(calibration_from_json(nlohmann::json::parse(R"({"tiler":{"cores":"x"}})")), ValidationError);
    CHECK_THROWS_AS(load_calibration("/nonexistent/calibration.json"), ValidationError);
    CHECK_THROWS_AS(Calibration{}.operating_point("1.2V"), ValidationError);
    CHECK(Calibration{}.operating_point("0.65V-abb").vbb == 0.45);
}
