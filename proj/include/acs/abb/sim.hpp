// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "acs/abb/model.hpp"

namespace acs::abb {

struct ControllerConfig {
    double step = 0.05;                 ///< V per bias step
    double vbb_max = 0.45;
    std::uint64_t settle_cycles = 310;  ///< ramp length of one step
    std::uint64_t relax_window = 2000;  ///< quiet cycles before stepping down
};

struct PopulationConfig {
    int paths = 10000;
    double sigma = 0.25;  ///< log-normal shape of nominal delays
    double monitored_fraction = 0.01;
    std::uint64_t seed = 1;
};

/// Everything the closed-loop simulation needs. `workload_ceiling` is the longest
/// path (relative to the critical path) exercised by the reference matmul workload.
struct AbbModel {
    DelayModel delay;
    PowerModel power;
    ControllerConfig controller;
    PopulationConfig population;
    double margin = 0.05;  ///< pre-error window as a fraction of the clock period
    double workload_ceiling = 1.0;
};

/// Calibration targets that pin the workload ceiling and the bias coefficient: the
/// reference workload fails below `vmin_off` at `f_probe` without bias, and runs down
/// to `vmin_on` with the bias at its upper bound.
struct AbbTargets {
    double f_probe = 400e6;
    double vmin_off = 0.74;
    double vmin_on = 0.65;
};

AbbModel calibrate_model(const DelayModel& delay_anchors, const PowerModel& power, const ControllerConfig& ctl,
                         const PopulationConfig& pop, double margin, const AbbTargets& targets);
/// Model from the built-in anchors (same values as config/calibration.json).
AbbModel default_model();

/// Nominal path delays relative to the critical path (largest = 1), sorted ascending.
class PathPopulation {
public:
    explicit PathPopulation(const PopulationConfig& cfg);

    const std::vector<double>& delays() const { return delays_; }
    bool monitored(std::size_t i) const { return i >= first_monitored_; }
    std::size_t monitored_count() const { return delays_.size() - first_monitored_; }
    /// Index range [lo, hi) of paths with nominal delay in (lo_delay, hi_delay].
    std::pair<std::size_t, std::size_t> range(double lo_delay, double hi_delay) const;

private:
    std::vector<double> delays_;
    std::size_t first_monitored_ = 0;
};

struct Detection {
    bool pre_error = false;
    bool error = false;
    int pre_errors = 0;  ///< monitored endpoints in the pre-error window
    int errors = 0;      ///< endpoints violating the period
};

/// Reference scan: pre-error iff a monitored active path has delay in (period - margin, period];
/// error iff an active path exceeds the period.
Detection detect(const std::vector<double>& delays, const std::vector<bool>& monitored,
                 const std::vector<bool>& active, double period, double margin);

/// Fast path over a sorted population where every path with nominal delay <= reach is active.
Detection detect_exercised(const PathPopulation& pop, double scale, double period, double margin, double reach);

class AbbController {
public:
    explicit AbbController(ControllerConfig cfg) : cfg_(cfg) {}
    /// Consumes this cycle's pre-error flag and returns the bias for the next cycle.
    double step(bool pre_error);
    double vbb() const { return vbb_; }
    bool ramping() const { return left_ > 0; }
    std::uint64_t up_ramps() const { return up_ramps_; }

private:
    void start(double target, bool up);

    ControllerConfig cfg_;
    double vbb_ = 0.0, from_ = 0.0, to_ = 0.0;
    std::uint64_t left_ = 0, quiet_ = 0, up_ramps_ = 0;
    bool up_ = false, again_ = false;
};

struct WorkloadPhase {
    std::string name = "matmul";
    std::uint64_t cycles = 1000;
    double intensity = 1.0;  ///< longest exercised path as a fraction of the workload ceiling
    double toggle = 0.05;    ///< per-cycle activation probability of an exercised path
    double activity = 1.0;   ///< switching activity for dynamic power
    std::uint64_t ramp_in = 0;  ///< cycles to move from the previous phase's intensity to this one
};

struct VddStep {
    std::uint64_t at = 0;
    double dv = 0.0;
};

struct AbbScenario {
    double vdd = 0.8;
    double freq = 400e6;
    bool abb_on = true;
    std::vector<WorkloadPhase> phases{WorkloadPhase{}};  ///< repeated until `duration`
    std::uint64_t duration = 10000;
    double vdd_start = 0.0;          ///< if > 0: linear supply ramp from here to `vdd`
    std::uint64_t ramp_cycles = 0;
    double droop_amplitude = 0.0;    ///< sinusoidal supply ripple, V
    std::uint64_t droop_period = 0;
    std::vector<VddStep> steps;
    std::uint64_t seed = 0;
    std::uint64_t decimate = 100;    ///< CSV sample spacing
};

AbbScenario abb_scenario_from_json(const nlohmann::json& j);

struct AbbTrace {
    std::vector<std::uint16_t> pre_errors, errors;
    std::vector<float> vbb, vdd, power_mw;
    std::vector<std::uint8_t> phase;
    std::uint64_t total_pre_errors = 0, total_errors = 0, up_ramps = 0;

    std::uint64_t cycles() const { return vbb.size(); }
    double mean_power_mw(std::uint64_t from = 0) const;
    double mean_vbb(std::uint64_t from = 0) const;
    std::string csv(std::uint64_t decimate) const;
};

AbbTrace simulate(const AbbModel& m, const AbbScenario& s);

struct ProbeConfig {
    std::uint64_t ramp_cycles = 20000;  ///< supply ramps down from v_start to the candidate
    std::uint64_t hold_cycles = 10000;
    double v_start = 0.8;
    double v_lo = 0.45, v_hi = 0.9;
    double tolerance = 1e-4;
    std::uint64_t seed = 0;
};

struct MinVddResult {
    double vdd = 0.0;
    double vbb = 0.0;       ///< mean bias over the hold window
    double power_mw = 0.0;  ///< at (vdd, f, vbb), activity 1
};

/// Lowest supply with zero real errors on the reference workload probe (bisection).
/// Throws DomainError when even v_hi fails.
MinVddResult find_min_vdd(const AbbModel& m, double f, bool abb_on, const ProbeConfig& probe = {});

}  // namespace acs::abb
