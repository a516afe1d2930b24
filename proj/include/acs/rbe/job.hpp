// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "acs/quant/qtensor.hpp"

namespace acs::rbe {

/// Fixed datapath geometry.
struct EngineGeometry {
    static constexpr int cores = 9;
    static constexpr int blocks_per_core = 9;
    static constexpr int binconvs_per_block = 4;
    static constexpr int lanes = 32;
    static constexpr int accumulators_per_core = 32;
    static constexpr int patch_side = 5;  ///< input buffer holds a 5x5 pixel patch
    static constexpr int planes_per_pass = binconvs_per_block;
    static constexpr int output_side = 3;  ///< cores cover a 3x3 output pixel group
    static constexpr int multipliers = cores * blocks_per_core * binconvs_per_block * lanes;
};
static_assert(EngineGeometry::multipliers == 10368);

/// One convolution job as programmed into a register-file context. Addresses are
/// byte addresses; strides are in bytes. Activations and outputs use the
/// (H, W, K/32, bits, 32) word layout, weights the dense per-mode layout.
struct RbeJob {
    quant::ConvMode mode = quant::ConvMode::Conv3x3;
    int w_bits = 8, i_bits = 8, o_bits = 8;
    int kin = 32, kout = 32;
    int hout = 3, wout = 3;
    quant::Padding padding = quant::Padding::Same;
    quant::NormParams norm;

    std::uint32_t act_addr = 0;
    std::uint32_t act_stride_x = 0;  ///< between horizontally adjacent input pixels
    std::uint32_t act_stride_y = 0;  ///< between input rows
    std::uint32_t wgt_addr = 0;
    std::uint32_t out_addr = 0;
    std::uint32_t out_stride_x = 0;
    std::uint32_t out_stride_y = 0;

    int hin() const;
    int win() const;
    int kin_slices() const { return quant::ceil_div(kin, 32); }
    int kout_slices() const { return quant::ceil_div(kout, 32); }
    int pad() const { return mode == quant::ConvMode::Conv3x3 && padding == quant::Padding::Same ? 1 : 0; }
    int i_passes() const { return quant::ceil_div(i_bits, EngineGeometry::planes_per_pass); }

    /// Dense strides for the given extents.
    std::uint32_t dense_act_stride_x() const { return static_cast<std::uint32_t>(kin_slices() * i_bits * 4); }
    std::uint32_t dense_out_stride_x() const { return static_cast<std::uint32_t>(kout_slices() * o_bits * 4); }
    std::uint32_t act_bytes() const;
    std::uint32_t wgt_bytes() const;
    std::uint32_t out_bytes() const;

    std::uint64_t macs() const;
};

/// Every violated constraint, one message each; empty means valid.
std::vector<std::string> validate(const RbeJob& job);
/// Throws ValidationError listing all problems.
void require_valid(const RbeJob& job);

nlohmann::json to_json(const RbeJob& job);
RbeJob job_from_json(const nlohmann::json& j);

}  // namespace acs::rbe
