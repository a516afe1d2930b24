// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/abb/model.hpp"

#include <cmath>
#include <string>

#include "acs/common/error.hpp"

namespace acs::abb {

DelayModel DelayModel::calibrate(double alpha, double v_hi, double f_hi, double v_lo, double f_lo) {
    if (!(v_hi > v_lo && f_hi > f_lo && f_lo > 0 && alpha > 0)) throw DomainError("delay calibration needs v_hi > v_lo, f_hi > f_lo > 0");
    // ((v_hi - vth) / (v_lo - vth))^alpha = (f_hi / f_lo) * (v_hi / v_lo)
    const double r = std::pow(f_hi / f_lo * v_hi / v_lo, 1.0 / alpha);
    DelayModel m;
    m.alpha = alpha;
    m.vth0 = (v_hi - r * v_lo) / (1.0 - r);
    m.v_ref = v_hi;
    m.f_ref = f_hi;
    if (!(m.vth0 < v_lo)) throw DomainError("delay calibration gives a threshold above the low anchor");
    return m;
}

double DelayModel::speed(double vdd, double vbb) const {
    const double ov = vdd - vth0 + k_bb * vbb;
    if (!(ov > 0) || !(vdd > 0)) throw DomainError("supply " + std::to_string(vdd) + " V is below the effective threshold");
    return std::pow(ov, alpha) / vdd;
}

PowerModel PowerModel::calibrate(const Anchors& a) {
    PowerModel p;
    p.v_ref = a.v_hi;
    // dynamic(hi)/dynamic(lo) = (f_hi/f_lo) * (v_hi/v_lo)^beta
    p.beta = std::log(a.dynamic_ratio * a.f_lo / a.f_hi) / std::log(a.v_hi / a.v_lo);
    const double dyn = a.total_mw * a.dynamic_fraction;
    p.c_eff = dyn / (a.f_hi * std::pow(a.v_hi, p.beta));
    p.leak_ref_mw = a.total_mw - dyn;
    p.leak_v_slope = (a.v_hi - a.v_lo) / std::log(a.leakage_ratio);
    p.leak_bb_slope = a.leak_bb_slope;
    return p;
}

double PowerModel::dynamic_mw(double vdd, double f, double activity) const {
    return c_eff * activity * f * std::pow(vdd, beta);
}

double PowerModel::leakage_mw(double vdd, double vbb) const {
    return leak_ref_mw * std::exp((vdd - v_ref) / leak_v_slope) * std::exp(vbb / leak_bb_slope);
}

}  // namespace acs::abb
