// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "acs/abb/sim.hpp"
#include "acs/cluster/dma.hpp"
#include "acs/rbe/engine.hpp"
#include "acs/tiler/tiler.hpp"

namespace acs::config {

struct DelayAnchors {
    double alpha = 1.3;
    double v_hi = 0.8, f_hi = 420e6;
    double v_lo = 0.5, f_lo = 100e6;
};

/// All tunable constants in one place; defaults equal config/calibration.json.
struct Calibration {
    int version = 1;
    rbe::RbeTiming rbe;
    cluster::DmaTiming dma;
    abb::PowerModel::Anchors power;
    DelayAnchors delay;
    abb::AbbTargets abb_targets;
    abb::ControllerConfig controller;
    abb::PopulationConfig population;
    double margin = 0.05;
    tiler::TilerConfig tiler;
    std::vector<tiler::OperatingPoint> operating_points;

    Calibration();

    abb::PowerModel power_model() const { return abb::PowerModel::calibrate(power); }
    abb::AbbModel abb_model() const;
    /// Throws ValidationError listing the known names.
    tiler::OperatingPoint operating_point(const std::string& name) const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
Calibration calibration_from_json(const nlohmann::json& j);
Calibration load_calibration(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const Calibration& c);

}  // namespace acs::config
