// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/abb/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "acs/common/error.hpp"

namespace acs::abb {

AbbModel calibrate_model(const DelayModel& delay_anchors, const PowerModel& power, const ControllerConfig& ctl,
                         const PopulationConfig& pop, double margin, const AbbTargets& t) {
    AbbModel m;
    m.delay = delay_anchors;
    m.power = power;
    m.controller = ctl;
    m.population = pop;
    m.margin = margin;
    m.delay.k_bb = 0.0;
    m.workload_ceiling = m.delay.fmax(t.vmin_off) / t.f_probe;
    if (!(m.workload_ceiling > 0 && m.workload_ceiling <= 1.0))
        throw DomainError("ABB targets put the workload ceiling outside (0, 1]");
    // with the bias at its bound, the speed at vmin_on equals the unbiased speed at vmin_off
    const double a = m.delay.alpha, vth = m.delay.vth0;
    const double overdrive = (t.vmin_off - vth) * std::pow(t.vmin_on / t.vmin_off, 1.0 / a);
    m.delay.k_bb = (overdrive - (t.vmin_on - vth)) / ctl.vbb_max;
    if (!(m.delay.k_bb > 0)) throw DomainError("ABB targets imply a non-positive bias coefficient");
    return m;
}

AbbModel default_model() {
    return calibrate_model(DelayModel::calibrate(1.3, 0.8, 420e6, 0.5, 100e6), PowerModel::calibrate({}), {}, {}, 0.05,
                           {});
}

PathPopulation::PathPopulation(const PopulationConfig& cfg) {
    if (cfg.paths < 1) throw DomainError("path population must be non-empty");
    if (!(cfg.monitored_fraction > 0 && cfg.monitored_fraction <= 1)) throw DomainError("monitored fraction outside (0, 1]");
    std::mt19937_64 rng(cfg.seed);
    std::lognormal_distribution<double> dist(0.0, cfg.sigma);
    delays_.resize(static_cast<std::size_t>(cfg.paths));
    for (auto& d : delays_) d = dist(rng);
    std::sort(delays_.begin(), delays_.end());
    const double top = delays_.back();
    for (auto& d : delays_) d /= top;
    const auto n = delays_.size();
    const auto mon = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(static_cast<double>(n) * cfg.monitored_fraction)));
    first_monitored_ = n - std::min(n, mon);
}

std::pair<std::size_t, std::size_t> PathPopulation::range(double lo_delay, double hi_delay) const {
    const auto lo = std::upper_bound(delays_.begin(), delays_.end(), lo_delay) - delays_.begin();
    const auto hi = std::upper_bound(delays_.begin(), delays_.end(), hi_delay) - delays_.begin();
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(std::max(lo, hi))};
}

Detection detect(const std::vector<double>& delays, const std::vector<bool>& monitored, const std::vector<bool>& active,
                 double period, double margin) {
    Detection d;
    for (std::size_t i = 0; i < delays.size(); ++i) {
        if (!active[i]) continue;
        if (delays[i] > period) {
            ++d.errors;
        } else if (monitored[i] && delays[i] > period - margin) {
            ++d.pre_errors;
        }
    }
    d.error = d.errors > 0;
    d.pre_error = d.pre_errors > 0;
    return d;
}

namespace {

// nominal-delay threshold above which a path can raise a flag
double flag_threshold(double scale, double period, double margin) { return (period - margin) / scale; }

void classify(const PathPopulation& pop, std::size_t i, double scale, double period, Detection& d) {
    if (pop.delays()[i] * scale > period) ++d.errors;
    else if (pop.monitored(i)) ++d.pre_errors;
}

}  // namespace

Detection detect_exercised(const PathPopulation& pop, double scale, double period, double margin, double reach) {
    Detection d;
    const auto [lo, hi] = pop.range(flag_threshold(scale, period, margin), reach);
    for (std::size_t i = lo; i < hi; ++i) classify(pop, i, scale, period, d);
    d.error = d.errors > 0;
    d.pre_error = d.pre_errors > 0;
    return d;
}

void AbbController::start(double target, bool up) {
    from_ = vbb_;
    to_ = target;
    up_ = up;
    left_ = cfg_.settle_cycles;
    if (up) ++up_ramps_;
    if (left_ == 0) vbb_ = to_;
}

double AbbController::step(bool pre_error) {
    if (pre_error) {
        quiet_ = 0;
        if (left_ > 0 && up_) {
            again_ = true;
        } else if (vbb_ < cfg_.vbb_max) {
            start(std::min(vbb_ + cfg_.step, cfg_.vbb_max), true);  // also aborts a downward ramp
        }
    } else {
        ++quiet_;
    }
    if (left_ > 0) {
        --left_;
        vbb_ = to_ - (to_ - from_) * static_cast<double>(left_) / static_cast<double>(cfg_.settle_cycles);
        if (left_ == 0) {
            vbb_ = to_;
            if (up_ && again_) {
                again_ = false;
                if (vbb_ < cfg_.vbb_max) start(std::min(vbb_ + cfg_.step, cfg_.vbb_max), true);
            }
        }
    } else if (quiet_ >= cfg_.relax_window && vbb_ > 0.0) {
        quiet_ = 0;
        start(std::max(vbb_ - cfg_.step, 0.0), false);
    }
    return vbb_;
}

AbbScenario abb_scenario_from_json(const nlohmann::json& j) {
    try {
        AbbScenario s;
        s.vdd = j.at("vdd").get<double>();
        s.freq = j.at("freq_mhz").get<double>() * 1e6;
        s.abb_on = j.value("abb_on", true);
        s.duration = j.at("duration_cycles").get<std::uint64_t>();
        if (j.contains("phases")) {
            s.phases.clear();
            for (const auto& p : j.at("phases")) {
                WorkloadPhase w;
                w.name = p.value("name", std::string("phase"));
                w.cycles = p.at("cycles").get<std::uint64_t>();
                w.intensity = p.value("intensity", 1.0);
                w.toggle = p.value("toggle", 0.05);
                w.activity = p.value("activity", 1.0);
                w.ramp_in = p.value("ramp_in", std::uint64_t{0});
                if (w.cycles == 0) throw ValidationError("phase '" + w.name + "' has zero cycles");
                if (w.toggle < 0 || w.toggle > 1 || w.intensity < 0 || w.intensity > 1)
                    throw ValidationError("phase '" + w.name + "': intensity and toggle must lie in [0, 1]");
                s.phases.push_back(w);
            }
            if (s.phases.empty()) throw ValidationError("scenario needs at least one phase");
        }
        s.vdd_start = j.value("vdd_start", 0.0);
        s.ramp_cycles = j.value("ramp_cycles", std::uint64_t{0});
        if (j.contains("droop")) {
            s.droop_amplitude = j.at("droop").value("amplitude", 0.0);
            s.droop_period = j.at("droop").value("period_cycles", std::uint64_t{0});
        }
        for (const auto& st : j.value("steps", nlohmann::json::array()))
            s.steps.push_back({st.at("at").get<std::uint64_t>(), st.at("dv").get<double>()});
        s.decimate = j.value("decimate", std::uint64_t{100});
        if (s.decimate == 0) throw ValidationError("decimate must be positive");
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed ABB scenario: ") + e.what());
    }
}

double AbbTrace::mean_power_mw(std::uint64_t from) const {
    if (from >= power_mw.size()) return 0.0;
    double s = 0;
    for (auto i = from; i < power_mw.size(); ++i) s += power_mw[i];
    return s / static_cast<double>(power_mw.size() - from);
}

double AbbTrace::mean_vbb(std::uint64_t from) const {
    if (from >= vbb.size()) return 0.0;
    double s = 0;
    for (auto i = from; i < vbb.size(); ++i) s += vbb[i];
    return s / static_cast<double>(vbb.size() - from);
}

std::string AbbTrace::csv(std::uint64_t decimate) const {
    std::string out = "cycle,vdd,vbb,pre_errors,errors,power_mw,phase\n";
    char buf[160];
    for (std::uint64_t t0 = 0; t0 < cycles(); t0 += decimate) {
        const auto t1 = std::min(cycles(), t0 + decimate);
        std::uint64_t pe = 0, er = 0;
        double p = 0;
        for (auto t = t0; t < t1; ++t) {
            pe += pre_errors[t];
            er += errors[t];
            p += power_mw[t];
        }
        std::snprintf(buf, sizeof buf, "%llu,%.4f,%.4f,%llu,%llu,%.3f,%u\n", static_cast<unsigned long long>(t0),
                      static_cast<double>(vdd[t0]), static_cast<double>(vbb[t0]), static_cast<unsigned long long>(pe),
                      static_cast<unsigned long long>(er), p / static_cast<double>(t1 - t0), unsigned{phase[t0]});
        out += buf;
    }
    return out;
}

AbbTrace simulate(const AbbModel& m, const AbbScenario& s) {
    if (!(s.freq > 0)) throw ValidationError("ABB scenario frequency must be positive");
    if (s.phases.empty()) throw ValidationError("ABB scenario needs at least one phase");
    const PathPopulation pop(m.population);
    AbbController ctl(m.controller);
    std::mt19937_64 rng(s.seed);
    const double period = m.delay.f_ref / s.freq;  // in units of the critical path at the reference point
    const double margin = m.margin * period;

    AbbTrace tr;
    const auto n = s.duration;
    tr.pre_errors.resize(n);
    tr.errors.resize(n);
    tr.vbb.resize(n);
    tr.vdd.resize(n);
    tr.power_mw.resize(n);
    tr.phase.resize(n);

    std::uint64_t cycle_len = 0;
    for (const auto& p : s.phases) cycle_len += p.cycles;
    std::vector<std::geometric_distribution<std::uint64_t>> skip;
    for (const auto& p : s.phases) skip.emplace_back(std::clamp(p.toggle, 1e-12, 1.0));

    double vbb = 0.0, step_dv = 0.0;
    std::size_t next_step = 0;
    auto steps = s.steps;
    std::sort(steps.begin(), steps.end(), [](const VddStep& a, const VddStep& b) { return a.at < b.at; });
    for (std::uint64_t t = 0; t < n; ++t) {
        std::uint64_t in_cycle = t % cycle_len;
        std::size_t ph = 0;
        while (in_cycle >= s.phases[ph].cycles) in_cycle -= s.phases[ph++].cycles;
        const auto& phase = s.phases[ph];

        double v = s.vdd;
        if (s.vdd_start > 0 && s.ramp_cycles > 0 && t < s.ramp_cycles)
            v = s.vdd_start + (s.vdd - s.vdd_start) * static_cast<double>(t) / static_cast<double>(s.ramp_cycles);
        while (next_step < steps.size() && steps[next_step].at <= t) step_dv += steps[next_step++].dv;
        v += step_dv;
        if (s.droop_amplitude != 0.0 && s.droop_period > 0)
            v += s.droop_amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(s.droop_period));

        const double scale = m.delay.delay_scale(v, vbb);
        double intensity = phase.intensity;
        const bool very_first = ph == 0 && t < cycle_len;  // nothing to ramp from
        if (phase.ramp_in > 0 && in_cycle < phase.ramp_in && !very_first) {
            const double prev = s.phases[(ph + s.phases.size() - 1) % s.phases.size()].intensity;
            intensity = prev + (phase.intensity - prev) * static_cast<double>(in_cycle) / static_cast<double>(phase.ramp_in);
        }
        const double reach = intensity * m.workload_ceiling;
        Detection d;
        if (phase.toggle > 0) {
            const auto [lo, hi] = pop.range(flag_threshold(scale, period, margin), reach);
            for (std::size_t i = lo;;) {
                if (phase.toggle < 1.0) i += skip[ph](rng);
                if (i >= hi) break;
                classify(pop, i, scale, period, d);
                ++i;
            }
        }
        tr.pre_errors[t] = static_cast<std::uint16_t>(std::min(d.pre_errors, 65535));
        tr.errors[t] = static_cast<std::uint16_t>(std::min(d.errors, 65535));
        tr.total_pre_errors += static_cast<std::uint64_t>(d.pre_errors);
        tr.total_errors += static_cast<std::uint64_t>(d.errors);
        tr.vbb[t] = static_cast<float>(vbb);
        tr.vdd[t] = static_cast<float>(v);
        tr.power_mw[t] = static_cast<float>(m.power.total_mw(v, s.freq, vbb, phase.activity));
        tr.phase[t] = static_cast<std::uint8_t>(ph);
        if (s.abb_on) vbb = ctl.step(d.pre_errors > 0);
    }
    tr.up_ramps = ctl.up_ramps();
    return tr;
}

MinVddResult find_min_vdd(const AbbModel& m, double f, bool abb_on, const ProbeConfig& probe) {
    auto run = [&](double v) {
        AbbScenario s;
        s.vdd = v;
        s.freq = f;
        s.abb_on = abb_on;
        s.phases = {WorkloadPhase{}};
        s.phases[0].cycles = probe.ramp_cycles + probe.hold_cycles;
        s.duration = probe.ramp_cycles + probe.hold_cycles;
        if (v < probe.v_start) {
            s.vdd_start = probe.v_start;
            s.ramp_cycles = probe.ramp_cycles;
        }
        s.seed = probe.seed;
        return simulate(m, s);
    };
    auto speed_ok = [&](double v) { return v - m.delay.vth0 > 1e-3; };
    double lo = std::max(probe.v_lo, m.delay.vth0 + 2e-3), hi = probe.v_hi;
    auto hi_trace = run(hi);
    if (hi_trace.total_errors > 0)
        throw DomainError("no error-free supply up to " + std::to_string(hi) + " V at " + std::to_string(f / 1e6) + " MHz");
    if (speed_ok(lo)) {
        auto t = run(lo);
        if (t.total_errors == 0) {
            hi = lo;
            hi_trace = std::move(t);
        }
    }
    while (hi - lo > probe.tolerance) {
        const double mid = 0.5 * (lo + hi);
        auto t = run(mid);
        if (t.total_errors == 0) {
            hi = mid;
            hi_trace = std::move(t);
        } else {
            lo = mid;
        }
    }
    MinVddResult r;
    r.vdd = hi;
    r.vbb = hi_trace.mean_vbb(probe.ramp_cycles);
    r.power_mw = m.power.total_mw(hi, f, r.vbb, 1.0);
    return r;
}

}  // namespace acs::abb
