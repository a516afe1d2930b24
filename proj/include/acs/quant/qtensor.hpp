// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "acs/common/error.hpp"

namespace acs::quant {

/// Number of bits per element of an integer tensor or SIMD lane.
class BitWidth {
public:
    constexpr explicit BitWidth(int bits) : bits_(bits) {
        if (bits < 1 || bits > 32) throw DomainError("bitwidth must lie in [1, 32], got " + std::to_string(bits));
    }

    constexpr int bits() const { return bits_; }
    constexpr std::int64_t unsigned_max() const { return (std::int64_t{1} << bits_) - 1; }
    constexpr std::int64_t signed_min() const { return -(std::int64_t{1} << (bits_ - 1)); }
    constexpr std::int64_t signed_max() const { return (std::int64_t{1} << (bits_ - 1)) - 1; }

    /// Precisions accepted by the binary engine: 2..8 bits, any value in between.
    constexpr bool is_engine_precision() const { return bits_ >= 2 && bits_ <= 8; }
    /// Lane widths of the packed-SIMD ISA.
    constexpr bool is_simd_width() const {
        return bits_ == 2 || bits_ == 4 || bits_ == 8 || bits_ == 16 || bits_ == 32;
    }

    friend constexpr bool operator==(BitWidth, BitWidth) = default;

private:
    int bits_;
};

/// Integer tensor with per-tensor precision metadata.
///
/// Activations use shape {H, W, K}; weights use {Kout, Kin, Fh, Fw}. Elements are
/// stored row-major in that order.
class QTensor {
public:
    QTensor(std::vector<int> shape, std::vector<std::int32_t> data, BitWidth bitwidth, bool is_signed);

    /// Zero-filled tensor of the given shape.
    static QTensor zeros(std::vector<int> shape, BitWidth bitwidth, bool is_signed = false);

    const std::vector<int>& shape() const { return shape_; }
    int dim(std::size_t i) const { return shape_.at(i); }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    BitWidth bitwidth() const { return bitwidth_; }
    bool is_signed() const { return signed_; }

    std::span<const std::int32_t> data() const { return data_; }

    std::int32_t at(std::initializer_list<int> idx) const { return data_[flat_index(idx)]; }
    /// Writes one element, checking that it stays representable.
    void set(std::initializer_list<int> idx, std::int32_t value);

    std::size_t flat_index(std::initializer_list<int> idx) const;
    bool representable(std::int64_t v) const;

    friend bool operator==(const QTensor&, const QTensor&) = default;

private:
    std::vector<int> shape_;
    std::vector<std::int32_t> data_;
    BitWidth bitwidth_;
    bool signed_;
};

/// Per-output-channel affine normalization followed by a right shift.
struct NormParams {
    std::vector<std::int32_t> scale;
    std::vector<std::int32_t> bias;
    int shift = 0;
    bool relu = true;

    /// Identity normalization (scale 1, bias 0, no shift) for `kout` channels.
    static NormParams identity(int kout, bool relu = true);
    void validate(int kout) const;
};

enum class ConvMode { Conv3x3, Conv1x1 };
enum class Padding { Same, Valid };

constexpr int filter_taps(ConvMode m) { return m == ConvMode::Conv3x3 ? 9 : 1; }
constexpr int filter_size(ConvMode m) { return m == ConvMode::Conv3x3 ? 3 : 1; }
const char* to_string(ConvMode m);
ConvMode conv_mode_from_string(const std::string& s);

/// Input spatial extent needed to produce `out` pixels along one axis.
constexpr int input_extent(int out, ConvMode m, Padding p) {
    return (m == ConvMode::Conv3x3 && p == Padding::Valid) ? out + 2 : out;
}

constexpr int ceil_div(int a, int b) { return (a + b - 1) / b; }

}  // namespace acs::quant
