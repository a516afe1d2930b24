// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/config/calibration.hpp"

#include <fstream>
#include <set>

namespace acs::config {

namespace {

using nlohmann::json;

// Reads `key` into `out` when present.
template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void known(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ValidationError("calibration: '" + where + "' must be an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!ok.count(k)) throw ValidationError("calibration: unknown key '" + where + "." + k + "'");
}

}  // namespace

Calibration::Calibration() {
    for (const char* n : {"0.8V", "0.65V-abb", "0.5V"}) operating_points.push_back(tiler::operating_point(n));
    tiler.rbe = rbe;
    tiler.dma = dma;
}

abb::AbbModel Calibration::abb_model() const {
    return abb::calibrate_model(abb::DelayModel::calibrate(delay.alpha, delay.v_hi, delay.f_hi, delay.v_lo, delay.f_lo),
                                power_model(), controller, population, margin, abb_targets);
}

tiler::OperatingPoint Calibration::operating_point(const std::string& name) const {
    std::string names;
    for (const auto& op : operating_points) {
        if (op.name == name) return op;
        names += (names.empty() ? "" : ", ") + op.name;
    }
    throw ValidationError("unknown operating point '" + name + "' (known: " + names + ")");
}

Calibration calibration_from_json(const json& j) {
    Calibration c;
    try {
        known(j, "", {"version", "rbe", "dma", "power", "delay", "abb", "tiler", "operating_points", "provenance"});
        read(j, "version", c.version);
        if (c.version != 1) throw ValidationError("calibration: unsupported version " + std::to_string(c.version));
        if (j.contains("rbe")) {
            const auto& r = j.at("rbe");
            known(r, "rbe", {"clock_hz", "load_words_per_cycle", "streamout_words_per_cycle", "compute_overhead",
                             "normquant_cycles"});
            read(r, "clock_hz", c.rbe.clock_hz);
            read(r, "load_words_per_cycle", c.rbe.load_words_per_cycle);
            read(r, "streamout_words_per_cycle", c.rbe.streamout_words_per_cycle);
            read(r, "compute_overhead", c.rbe.compute_overhead);
            read(r, "normquant_cycles", c.rbe.normquant_cycles);
            if (c.rbe.load_words_per_cycle < 1 || c.rbe.streamout_words_per_cycle < 1 || c.rbe.compute_overhead < 0 ||
                c.rbe.normquant_cycles < 0 || !(c.rbe.clock_hz > 0))
                throw ValidationError("calibration: rbe constants out of range");
        }
        if (j.contains("dma")) {
            const auto& d = j.at("dma");
            known(d, "dma", {"bytes_per_cycle", "setup_cycles"});
            read(d, "bytes_per_cycle", c.dma.bytes_per_cycle);
            read(d, "setup_cycles", c.dma.setup_cycles);
            if (c.dma.bytes_per_cycle < 1 || c.dma.setup_cycles < 0)
                throw ValidationError("calibration: dma constants out of range");
        }
        if (j.contains("power")) {
            const auto& p = j.at("power");
            known(p, "power", {"total_mw", "dynamic_fraction", "v_hi", "f_hi", "v_lo", "f_lo", "dynamic_ratio",
                               "leakage_ratio", "leak_bb_slope"});
            read(p, "total_mw", c.power.total_mw);
            read(p, "dynamic_fraction", c.power.dynamic_fraction);
            read(p, "v_hi", c.power.v_hi);
            read(p, "f_hi", c.power.f_hi);
            read(p, "v_lo", c.power.v_lo);
            read(p, "f_lo", c.power.f_lo);
            read(p, "dynamic_ratio", c.power.dynamic_ratio);
            read(p, "leakage_ratio", c.power.leakage_ratio);
            read(p, "leak_bb_slope", c.power.leak_bb_slope);
        }
        if (j.contains("delay")) {
            const auto& d = j.at("delay");
            known(d, "delay", {"alpha", "v_hi", "f_hi", "v_lo", "f_lo"});
            read(d, "alpha", c.delay.alpha);
            read(d, "v_hi", c.delay.v_hi);
            read(d, "f_hi", c.delay.f_hi);
            read(d, "v_lo", c.delay.v_lo);
            read(d, "f_lo", c.delay.f_lo);
        }
        if (j.contains("abb")) {
            const auto& a = j.at("abb");
            known(a, "abb", {"targets", "controller", "population", "margin"});
            read(a, "margin", c.margin);
            if (a.contains("targets")) {
                const auto& t = a.at("targets");
                known(t, "abb.targets", {"f_probe", "vmin_off", "vmin_on"});
                read(t, "f_probe", c.abb_targets.f_probe);
                read(t, "vmin_off", c.abb_targets.vmin_off);
                read(t, "vmin_on", c.abb_targets.vmin_on);
            }
            if (a.contains("controller")) {
                const auto& t = a.at("controller");
                known(t, "abb.controller", {"step", "vbb_max", "settle_cycles", "relax_window"});
                read(t, "step", c.controller.step);
                read(t, "vbb_max", c.controller.vbb_max);
                read(t, "settle_cycles", c.controller.settle_cycles);
                read(t, "relax_window", c.controller.relax_window);
            }
            if (a.contains("population")) {
                const auto& t = a.at("population");
                known(t, "abb.population", {"paths", "sigma", "monitored_fraction", "seed"});
                read(t, "paths", c.population.paths);
                read(t, "sigma", c.population.sigma);
                read(t, "monitored_fraction", c.population.monitored_fraction);
                read(t, "seed", c.population.seed);
            }
        }
        if (j.contains("tiler")) {
            const auto& t = j.at("tiler");
            known(t, "tiler", {"l1_budget", "l3_bytes_per_cycle", "l3_latency_cycles", "job_overhead_cycles",
                               "busy_activity", "idle_activity", "cores"});
            read(t, "l1_budget", c.tiler.budget);
            read(t, "l3_bytes_per_cycle", c.tiler.l3_bytes_per_cycle);
            read(t, "l3_latency_cycles", c.tiler.l3_latency_cycles);
            read(t, "job_overhead_cycles", c.tiler.job_overhead_cycles);
            read(t, "busy_activity", c.tiler.busy_activity);
            read(t, "idle_activity", c.tiler.idle_activity);
            read(t, "cores", c.tiler.cores);
            if (!(c.tiler.l3_bytes_per_cycle > 0) || c.tiler.cores < 1)
                throw ValidationError("calibration: tiler constants out of range");
        }
        if (j.contains("operating_points")) {
            c.operating_points.clear();
            for (const auto& o : j.at("operating_points")) {
                known(o, "operating_points[]", {"name", "vdd", "freq_hz", "vbb"});
                tiler::OperatingPoint op;
                op.name = o.at("name").get<std::string>();
                op.vdd = o.at("vdd").get<double>();
                op.freq = o.at("freq_hz").get<double>();
                op.vbb = o.value("vbb", 0.0);
                if (!(op.vdd > 0 && op.freq > 0)) throw ValidationError("calibration: operating point '" + op.name + "' out of range");
                c.operating_points.push_back(op);
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("calibration: ") + e.what());
    }
    c.tiler.rbe = c.rbe;
    c.tiler.dma = c.dma;
    return c;
}

Calibration load_calibration(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open calibration file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return calibration_from_json(j);
}

nlohmann::ordered_json to_json(const Calibration& c) {
    nlohmann::ordered_json j;
    j["version"] = c.version;
    j["rbe"] = {{"clock_hz", c.rbe.clock_hz},
                {"load_words_per_cycle", c.rbe.load_words_per_cycle},
                {"streamout_words_per_cycle", c.rbe.streamout_words_per_cycle},
                {"compute_overhead", c.rbe.compute_overhead},
                {"normquant_cycles", c.rbe.normquant_cycles}};
    j["dma"] = {{"bytes_per_cycle", c.dma.bytes_per_cycle}, {"setup_cycles", c.dma.setup_cycles}};
    j["power"] = {{"total_mw", c.power.total_mw},       {"dynamic_fraction", c.power.dynamic_fraction},
                  {"v_hi", c.power.v_hi},               {"f_hi", c.power.f_hi},
                  {"v_lo", c.power.v_lo},               {"f_lo", c.power.f_lo},
                  {"dynamic_ratio", c.power.dynamic_ratio}, {"leakage_ratio", c.power.leakage_ratio},
                  {"leak_bb_slope", c.power.leak_bb_slope}};
    j["delay"] = {{"alpha", c.delay.alpha}, {"v_hi", c.delay.v_hi}, {"f_hi", c.delay.f_hi},
                  {"v_lo", c.delay.v_lo},   {"f_lo", c.delay.f_lo}};
    j["abb"] = {{"targets",
                 {{"f_probe", c.abb_targets.f_probe}, {"vmin_off", c.abb_targets.vmin_off}, {"vmin_on", c.abb_targets.vmin_on}}},
                {"controller",
                 {{"step", c.controller.step},
                  {"vbb_max", c.controller.vbb_max},
                  {"settle_cycles", c.controller.settle_cycles},
                  {"relax_window", c.controller.relax_window}}},
                {"population",
                 {{"paths", c.population.paths},
                  {"sigma", c.population.sigma},
                  {"monitored_fraction", c.population.monitored_fraction},
                  {"seed", c.population.seed}}},
                {"margin", c.margin}};
    j["tiler"] = {{"l1_budget", c.tiler.budget},
                  {"l3_bytes_per_cycle", c.tiler.l3_bytes_per_cycle},
                  {"l3_latency_cycles", c.tiler.l3_latency_cycles},
                  {"job_overhead_cycles", c.tiler.job_overhead_cycles},
                  {"busy_activity", c.tiler.busy_activity},
                  {"idle_activity", c.tiler.idle_activity},
                  {"cores", c.tiler.cores}};
    auto ops = nlohmann::ordered_json::array();
    for (const auto& op : c.operating_points)
        ops.push_back({{"name", op.name}, {"vdd", op.vdd}, {"freq_hz", op.freq}, {"vbb", op.vbb}});
    j["operating_points"] = ops;
    return j;
}

}  // namespace acs::config
