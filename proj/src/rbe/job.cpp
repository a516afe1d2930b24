// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/rbe/job.hpp"

#include <sstream>

namespace acs::rbe {

using quant::ConvMode;
using quant::Padding;

int RbeJob::hin() const { return quant::input_extent(hout, mode, padding); }
int RbeJob::win() const { return quant::input_extent(wout, mode, padding); }

std::uint32_t RbeJob::act_bytes() const {
    if (hin() <= 0 || win() <= 0) return 0;
    return static_cast<std::uint32_t>(hin() - 1) * act_stride_y + static_cast<std::uint32_t>(win() - 1) * act_stride_x +
           dense_act_stride_x();
}

std::uint32_t RbeJob::wgt_bytes() const {
    return static_cast<std::uint32_t>(kout * kin_slices() * w_bits * quant::filter_taps(mode) * 4);
}

std::uint32_t RbeJob::out_bytes() const {
    if (hout <= 0 || wout <= 0) return 0;
    return static_cast<std::uint32_t>(hout - 1) * out_stride_y + static_cast<std::uint32_t>(wout - 1) * out_stride_x +
           dense_out_stride_x();
}

std::uint64_t RbeJob::macs() const {
    return static_cast<std::uint64_t>(hout) * wout * kout * kin * quant::filter_taps(mode);
}

std::vector<std::string> validate(const RbeJob& job) {
    std::vector<std::string> errs;
    auto prec = [&](const char* name, int b) {
        if (b < 2 || b > 8) errs.push_back(std::string(name) + " precision " + std::to_string(b) + " outside [2, 8]");
    };
    prec("W", job.w_bits);
    prec("I", job.i_bits);
    prec("O", job.o_bits);
    if (job.kin <= 0) errs.push_back("Kin must be positive");
    if (job.kout <= 0) errs.push_back("Kout must be positive");
    if (job.hout <= 0 || job.wout <= 0) errs.push_back("output extents must be positive");
    if (!errs.empty()) return errs;

    try {
        job.norm.validate(job.kout);
    } catch (const Error& e) {
        errs.push_back(e.what());
    }
    if ((job.act_addr | job.wgt_addr | job.out_addr) % 4)
        errs.push_back("base addresses must be word aligned");
    if (job.act_stride_x % 4 || job.act_stride_y % 4 || job.out_stride_x % 4 || job.out_stride_y % 4)
        errs.push_back("strides must be whole words");
    if (job.act_stride_x < job.dense_act_stride_x())
        errs.push_back("activation pixel stride " + std::to_string(job.act_stride_x) + " smaller than one pixel (" +
                       std::to_string(job.dense_act_stride_x()) + " bytes)");
    if (job.act_stride_y < static_cast<std::uint32_t>(job.win()) * job.act_stride_x)
        errs.push_back("activation row stride overlaps the previous row");
    if (job.out_stride_x < job.dense_out_stride_x())
        errs.push_back("output pixel stride " + std::to_string(job.out_stride_x) + " smaller than one pixel (" +
                       std::to_string(job.dense_out_stride_x()) + " bytes)");
    if (job.out_stride_y < static_cast<std::uint32_t>(job.wout) * job.out_stride_x)
        errs.push_back("output row stride overlaps the previous row");
    return errs;
}

void require_valid(const RbeJob& job) {
    const auto errs = validate(job);
    if (errs.empty()) return;
    std::ostringstream os;
    os << "invalid RBE job:";
    for (const auto& e : errs) os << "\n  - " << e;
    throw ValidationError(os.str());
}

nlohmann::json to_json(const RbeJob& job) {
    nlohmann::ordered_json j;
    j["mode"] = quant::to_string(job.mode);
    j["w_bits"] = job.w_bits;
    j["i_bits"] = job.i_bits;
    j["o_bits"] = job.o_bits;
    j["kin"] = job.kin;
    j["kout"] = job.kout;
    j["hout"] = job.hout;
    j["wout"] = job.wout;
    j["padding"] = job.padding == Padding::Same ? "same" : "valid";
    j["norm"] = {{"scale", job.norm.scale}, {"bias", job.norm.bias}, {"shift", job.norm.shift}, {"relu", job.norm.relu}};
    j["act_addr"] = job.act_addr;
    j["act_stride_x"] = job.act_stride_x;
    j["act_stride_y"] = job.act_stride_y;
    j["wgt_addr"] = job.wgt_addr;
    j["out_addr"] = job.out_addr;
    j["out_stride_x"] = job.out_stride_x;
    j["out_stride_y"] = job.out_stride_y;
    return j;
}

RbeJob job_from_json(const nlohmann::json& j) {
    try {
        RbeJob job;
        job.mode = quant::conv_mode_from_string(j.at("mode").get<std::string>());
        job.w_bits = j.at("w_bits").get<int>();
        job.i_bits = j.at("i_bits").get<int>();
        job.o_bits = j.at("o_bits").get<int>();
        job.kin = j.at("kin").get<int>();
        job.kout = j.at("kout").get<int>();
        job.hout = j.at("hout").get<int>();
        job.wout = j.at("wout").get<int>();
        const auto pad = j.value("padding", std::string("same"));
        if (pad != "same" && pad != "valid") throw ValidationError("padding must be 'same' or 'valid'");
        job.padding = pad == "same" ? Padding::Same : Padding::Valid;
        if (j.contains("norm")) {
            const auto& n = j.at("norm");
            job.norm.scale = n.at("scale").get<std::vector<std::int32_t>>();
            job.norm.bias = n.at("bias").get<std::vector<std::int32_t>>();
            job.norm.shift = n.value("shift", 0);
            job.norm.relu = n.value("relu", true);
        } else {
            job.norm = quant::NormParams::identity(job.kout);
        }
        job.act_addr = j.value("act_addr", 0u);
        job.wgt_addr = j.value("wgt_addr", 0u);
        job.out_addr = j.value("out_addr", 0u);
        job.act_stride_x = j.value("act_stride_x", job.dense_act_stride_x());
        job.act_stride_y = j.value("act_stride_y", job.act_stride_x * static_cast<std::uint32_t>(job.win()));
        job.out_stride_x = j.value("out_stride_x", job.dense_out_stride_x());
        job.out_stride_y = j.value("out_stride_y", job.out_stride_x * static_cast<std::uint32_t>(job.wout));
        return job;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed RBE job: ") + e.what());
    }
}

}  // namespace acs::rbe
