// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/quant/reference.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace acs::quant {

namespace {

void check_operands(const QTensor& acts, const QTensor& wgts, ConvMode mode) {
    if (acts.rank() != 3 || wgts.rank() != 4) throw DomainError("reference_conv expects {H,W,K} and {Ko,Ki,f,f}");
    if (acts.is_signed() || wgts.is_signed()) throw DomainError("reference_conv operands must be unsigned");
    const int f = filter_size(mode);
    if (wgts.dim(2) != f || wgts.dim(3) != f) throw DomainError("filter geometry does not match mode");
    if (wgts.dim(1) != acts.dim(2)) throw DomainError("Kin mismatch between activations and weights");
}

}  // namespace

std::vector<std::int32_t> reference_accumulators(const QTensor& acts, const QTensor& wgts, ConvMode mode,
                                                 Padding padding) {
    check_operands(acts, wgts, mode);
    const int hin = acts.dim(0), win = acts.dim(1), kin = acts.dim(2);
    const int kout = wgts.dim(0);
    const int f = filter_size(mode);
    const int halo = (mode == ConvMode::Conv3x3 && padding == Padding::Same) ? 1 : 0;
    const int hout = (mode == ConvMode::Conv3x3 && padding == Padding::Valid) ? hin - 2 : hin;
    const int wout = (mode == ConvMode::Conv3x3 && padding == Padding::Valid) ? win - 2 : win;
    if (hout <= 0 || wout <= 0) throw DomainError("input too small for valid 3x3 convolution");

    auto a = acts.data();
    auto w = wgts.data();
    std::vector<std::int32_t> out(static_cast<std::size_t>(hout) * wout * kout);
    for (int y = 0; y < hout; ++y)
        for (int x = 0; x < wout; ++x)
            for (int ko = 0; ko < kout; ++ko) {
                std::int64_t acc = 0;
                for (int fy = 0; fy < f; ++fy)
                    for (int fx = 0; fx < f; ++fx) {
                        const int iy = y + fy - halo, ix = x + fx - halo;
                        if (iy < 0 || iy >= hin || ix < 0 || ix >= win) continue;
                        const std::size_t abase = (static_cast<std::size_t>(iy) * win + ix) * kin;
                        for (int ki = 0; ki < kin; ++ki)
                            acc += static_cast<std::int64_t>(a[abase + ki]) *
                                   w[((static_cast<std::size_t>(ko) * kin + ki) * f + fy) * f + fx];
                    }
                if (acc > std::numeric_limits<std::int32_t>::max())
                    throw OverflowError("accumulator overflow at (" + std::to_string(y) + "," + std::to_string(x) +
                                        "," + std::to_string(ko) + "): " + std::to_string(acc));
                out[(static_cast<std::size_t>(y) * wout + x) * kout + ko] = static_cast<std::int32_t>(acc);
            }
    return out;
}

std::int32_t reference_normquant(std::int64_t acc, std::int32_t scale, std::int32_t bias, int shift, bool relu,
                                 BitWidth out_bits) {
    std::int64_t v = static_cast<std::int64_t>(scale) * acc + bias;
    v >>= shift;  // arithmetic on signed operands: floor
    if (relu) v = std::max<std::int64_t>(v, 0);
    v = std::clamp<std::int64_t>(v, 0, out_bits.unsigned_max());
    return static_cast<std::int32_t>(v);
}

QTensor reference_conv(const QTensor& acts, const QTensor& wgts, const NormParams& norm, ConvMode mode,
                       BitWidth out_bits, Padding padding) {
    const int kout = wgts.dim(0);
    norm.validate(kout);
    auto acc = reference_accumulators(acts, wgts, mode, padding);
    const int hout = (mode == ConvMode::Conv3x3 && padding == Padding::Valid) ? acts.dim(0) - 2 : acts.dim(0);
    const int wout = (mode == ConvMode::Conv3x3 && padding == Padding::Valid) ? acts.dim(1) - 2 : acts.dim(1);
    std::vector<std::int32_t> out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        const auto ko = i % static_cast<std::size_t>(kout);
        out[i] = reference_normquant(acc[i], norm.scale[ko], norm.bias[ko], norm.shift, norm.relu, out_bits);
    }
    return QTensor({hout, wout, kout}, std::move(out), out_bits, false);
}

}  // namespace acs::quant
