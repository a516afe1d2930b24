// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "acs/quant/qtensor.hpp"

namespace acs::quant {

// Bit-plane memory layouts of the binary engine.
//
// Activations: (H, W, ceil(K/32), I, 32). One 32-bit word holds bit `i` of 32
// consecutive channels; channel k sits in bit-lane k mod 32.
// Weights 3x3: (Kout, ceil(Kin/32), W, 9, 32), taps in row-major (fy, fx) order.
// Weights 1x1: (Kout, ceil(Kin/32), W, 32).
// Channel tails past K (or Kin) are zero.

/// LSB-first binary expansion of `value` into `bits` digits.
std::vector<int> bit_decompose(std::uint64_t value, BitWidth bits);

struct PackedActivations {
    std::vector<std::uint32_t> words;
    int h = 0;
    int w = 0;
    int k = 0;
    BitWidth bits{8};

    int slices() const { return ceil_div(k, 32); }
    static std::size_t word_count(int h, int w, int k, int bits) {
        return static_cast<std::size_t>(h) * w * ceil_div(k, 32) * bits;
    }
    std::size_t index(int y, int x, int slice, int plane) const {
        return ((static_cast<std::size_t>(y) * w + x) * slices() + slice) * bits.bits() + plane;
    }
};

struct PackedWeights {
    std::vector<std::uint32_t> words;
    ConvMode mode = ConvMode::Conv3x3;
    int kout = 0;
    int kin = 0;
    BitWidth bits{8};

    int slices() const { return ceil_div(kin, 32); }
    static std::size_t word_count(ConvMode mode, int kout, int kin, int bits) {
        return static_cast<std::size_t>(kout) * ceil_div(kin, 32) * bits * filter_taps(mode);
    }
    std::size_t index(int ko, int slice, int plane, int tap) const {
        return ((static_cast<std::size_t>(ko) * slices() + slice) * bits.bits() + plane) * filter_taps(mode) + tap;
    }
};

PackedActivations pack_activations(const QTensor& t, BitWidth bits);
QTensor unpack_activations(const PackedActivations& p);

PackedWeights pack_weights(const QTensor& t, BitWidth bits, ConvMode mode);
QTensor unpack_weights(const PackedWeights& p);

}  // namespace acs::quant
