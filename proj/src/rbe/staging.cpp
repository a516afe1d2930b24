// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/rbe/staging.hpp"

#include "acs/rbe/engine.hpp"

namespace acs::rbe {

StagedJob stage_job(const quant::QTensor& acts, const quant::QTensor& wgts, const quant::NormParams& norm,
                    quant::ConvMode mode, int w_bits, int i_bits, int o_bits, quant::Padding padding,
                    std::uint32_t base) {
    if (acts.rank() != 3 || wgts.rank() != 4) throw DomainError("stage_job: expected {H, W, K} and {Kout, Kin, f, f}");
    const int pad_extra = mode == quant::ConvMode::Conv3x3 && padding == quant::Padding::Valid ? 2 : 0;
    const int hout = acts.dim(0) - pad_extra, wout = acts.dim(1) - pad_extra;
    auto job = make_dense_job(mode, w_bits, i_bits, o_bits, acts.dim(2), wgts.dim(0), hout, wout, base, padding);
    if (wgts.dim(1) != job.kin) throw DomainError("stage_job: Kin mismatch between activations and weights");
    job.norm = norm;
    require_valid(job);
    const std::size_t size = (job.out_addr - base) + job.out_bytes() + 64;
    StagedJob s{job, FlatMemory(base, size)};
    write_activations(s.mem, job, quant::pack_activations(acts, quant::BitWidth(i_bits)));
    s.mem.write_words(job.wgt_addr, quant::pack_weights(wgts, quant::BitWidth(w_bits), mode).words);
    return s;
}

void write_activations(Memory& mem, const RbeJob& job, const quant::PackedActivations& p) {
    const int per_px = p.slices() * p.bits.bits();
    for (int y = 0; y < p.h; ++y)
        for (int x = 0; x < p.w; ++x)
            for (int k = 0; k < per_px; ++k)
                mem.store32(job.act_addr + static_cast<std::uint32_t>(y) * job.act_stride_y +
                                static_cast<std::uint32_t>(x) * job.act_stride_x + static_cast<std::uint32_t>(k) * 4,
                            p.words[p.index(y, x, 0, 0) + static_cast<std::size_t>(k)]);
}

quant::QTensor read_outputs(const Memory& mem, const RbeJob& job) {
    quant::PackedActivations p;
    p.h = job.hout;
    p.w = job.wout;
    p.k = job.kout;
    p.bits = quant::BitWidth(job.o_bits);
    const int per_px = p.slices() * job.o_bits;
    p.words.resize(quant::PackedActivations::word_count(p.h, p.w, p.k, job.o_bits));
    for (int y = 0; y < p.h; ++y)
        for (int x = 0; x < p.w; ++x)
            for (int k = 0; k < per_px; ++k)
                p.words[p.index(y, x, 0, 0) + static_cast<std::size_t>(k)] =
                    mem.load32(job.out_addr + static_cast<std::uint32_t>(y) * job.out_stride_y +
                               static_cast<std::uint32_t>(x) * job.out_stride_x + static_cast<std::uint32_t>(k) * 4);
    return quant::unpack_activations(p);
}

}  // namespace acs::rbe
