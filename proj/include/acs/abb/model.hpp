// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace acs::abb {

/// Alpha-power delay law: delay ~ V / (V - vth0 + k_bb * Vbb)^alpha, normalized so the
/// critical path at (v_ref, Vbb = 0) runs at f_ref.
struct DelayModel {
    double alpha = 1.3;
    double vth0 = 0.0;
    double k_bb = 0.0;
    double v_ref = 0.8;
    double f_ref = 420e6;

    /// Solves vth0 from two (voltage, max frequency) points at zero bias.
    static DelayModel calibrate(double alpha, double v_hi, double f_hi, double v_lo, double f_lo);

    /// Inverse delay up to a constant. Throws DomainError when the gate overdrive is not positive.
    double speed(double vdd, double vbb) const;
    double fmax(double vdd, double vbb = 0.0) const { return f_ref * speed(vdd, vbb) / speed(v_ref, 0.0); }
    /// Path delay multiplier relative to (v_ref, 0).
    double delay_scale(double vdd, double vbb) const { return speed(v_ref, 0.0) / speed(vdd, vbb); }
};

/// P = c_eff * activity * f * V^beta + leak_ref * exp((V - v_ref) / leak_v_slope) * exp(Vbb / leak_bb_slope), in mW.
struct PowerModel {
    double c_eff = 0.0;  ///< mW per Hz per V^beta at activity 1
    double beta = 2.0;
    double leak_ref_mw = 0.0;
    double leak_v_slope = 0.25;
    double leak_bb_slope = 0.41;
    double v_ref = 0.8;

    struct Anchors {
        double total_mw = 123.0;
        double dynamic_fraction = 0.946;
        double v_hi = 0.8, f_hi = 420e6;
        double v_lo = 0.5, f_lo = 100e6;
        double dynamic_ratio = 10.7;  ///< dynamic(hi) / dynamic(lo)
        double leakage_ratio = 3.5;   ///< leakage(hi) / leakage(lo)
        double leak_bb_slope = 0.41;
    };
    static PowerModel calibrate(const Anchors& a);

    double dynamic_mw(double vdd, double f, double activity = 1.0) const;
    double leakage_mw(double vdd, double vbb = 0.0) const;
    double total_mw(double vdd, double f, double vbb = 0.0, double activity = 1.0) const {
        return dynamic_mw(vdd, f, activity) + leakage_mw(vdd, vbb);
    }
};

}  // namespace acs::abb
