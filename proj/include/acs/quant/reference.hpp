// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "acs/quant/qtensor.hpp"

namespace acs::quant {

/// Golden integer convolution: multiply-accumulate into a checked 32-bit
/// accumulator, then out = clamp_O(relu((scale * acc + bias) >> shift)).
///
/// `acts` is {H, W, Kin} unsigned, `wgts` is {Kout, Kin, f, f} unsigned with f
/// given by `mode`. Shift is arithmetic (floor). Output is unsigned `out_bits`
/// with shape {Hout, Wout, Kout}. Throws OverflowError if any accumulator leaves
/// the signed 32-bit range.
QTensor reference_conv(const QTensor& acts, const QTensor& wgts, const NormParams& norm, ConvMode mode,
                       BitWidth out_bits, Padding padding = Padding::Same);

/// Raw accumulators of the same convolution, shape {Hout, Wout, Kout}, row-major.
std::vector<std::int32_t> reference_accumulators(const QTensor& acts, const QTensor& wgts, ConvMode mode,
                                                 Padding padding = Padding::Same);

/// Normalization and requantization of one accumulator.
std::int32_t reference_normquant(std::int64_t acc, std::int32_t scale, std::int32_t bias, int shift, bool relu,
                                 BitWidth out_bits);

}  // namespace acs::quant
