// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/rbe/uloop.hpp"

#include <algorithm>

namespace acs::rbe {

UloopProgram UloopProgram::from_strides(std::vector<std::string> names, std::vector<int> extents,
                                        const std::vector<std::vector<std::int64_t>>& strides,
                                        std::vector<std::int64_t> base) {
    const std::size_t n = names.size();
    if (extents.size() != n || strides.size() != n) throw DomainError("uloop: level descriptions disagree in length");
    UloopProgram p;
    p.base = std::move(base);
    const std::size_t regs = p.base.size();
    for (std::size_t l = 0; l < n; ++l) {
        if (strides[l].size() != regs) throw DomainError("uloop: stride count differs from register count");
        UloopLevel lv;
        lv.name = names[l];
        lv.extent = extents[l];
        lv.increment.assign(regs, 0);
        for (std::size_t r = 0; r < regs; ++r) {
            std::int64_t inc = strides[l][r];
            for (std::size_t inner = l + 1; inner < n; ++inner)
                inc -= static_cast<std::int64_t>(extents[inner] - 1) * strides[inner][r];
            lv.increment[r] = inc;
        }
        p.levels.push_back(std::move(lv));
    }
    return p;
}

std::uint64_t UloopProgram::iterations() const {
    std::uint64_t n = 1;
    for (const auto& l : levels) n *= static_cast<std::uint64_t>(std::max(l.extent, 0));
    return n;
}

UloopProgram job_uloop(const RbeJob& job) {
    constexpr int side = EngineGeometry::output_side;
    const int taps = quant::filter_taps(job.mode);
    const std::int64_t sx = job.act_stride_x, sy = job.act_stride_y;
    const std::int64_t ox = job.out_stride_x, oy = job.out_stride_y;
    const std::int64_t wgt_channel = static_cast<std::int64_t>(job.kin_slices()) * job.w_bits * taps * 4;
    const std::int64_t act_base = static_cast<std::int64_t>(job.act_addr) - job.pad() * (sx + sy);
    return UloopProgram::from_strides(
        {"tile_y", "tile_x", "kout_tile", "kin_slice", "i_pass"},
        {quant::ceil_div(job.hout, side), quant::ceil_div(job.wout, side), job.kout_slices(), job.kin_slices(),
         job.i_passes()},
        {
            {side * sy, 0, side * oy},
            {side * sx, 0, side * ox},
            {0, 32 * wgt_channel, static_cast<std::int64_t>(job.o_bits) * 4},
            {static_cast<std::int64_t>(job.i_bits) * 4, static_cast<std::int64_t>(job.w_bits) * taps * 4, 0},
            {EngineGeometry::planes_per_pass * 4, 0, 0},
        },
        {act_base, job.wgt_addr, job.out_addr});
}

}  // namespace acs::rbe
