// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/quant/packing.hpp"

#include <string>

namespace acs::quant {

std::vector<int> bit_decompose(std::uint64_t value, BitWidth bits) {
    if (bits.bits() < 64 && value >> bits.bits())
        throw DomainError(std::to_string(value) + " does not fit in " + std::to_string(bits.bits()) + " bits");
    std::vector<int> out(static_cast<std::size_t>(bits.bits()));
    for (int i = 0; i < bits.bits(); ++i) out[i] = static_cast<int>((value >> i) & 1u);
    return out;
}

namespace {

void require_unsigned_range(const QTensor& t, BitWidth bits, const char* what) {
    if (t.is_signed()) throw DomainError(std::string(what) + " must be unsigned for bit-plane packing");
    for (std::int32_t v : t.data())
        if (v < 0 || v > bits.unsigned_max())
            throw DomainError(std::string(what) + " element " + std::to_string(v) + " exceeds " +
                              std::to_string(bits.bits()) + "-bit range");
}

}  // namespace

PackedActivations pack_activations(const QTensor& t, BitWidth bits) {
    if (t.rank() != 3) throw DomainError("activations must have shape {H, W, K}");
    require_unsigned_range(t, bits, "activation");
    PackedActivations p;
    p.h = t.dim(0);
    p.w = t.dim(1);
    p.k = t.dim(2);
    p.bits = bits;
    p.words.assign(PackedActivations::word_count(p.h, p.w, p.k, bits.bits()), 0);
    auto data = t.data();
    for (int y = 0; y < p.h; ++y)
        for (int x = 0; x < p.w; ++x)
            for (int k = 0; k < p.k; ++k) {
                auto v = static_cast<std::uint32_t>(data[(static_cast<std::size_t>(y) * p.w + x) * p.k + k]);
                for (int i = 0; i < bits.bits(); ++i)
                    if ((v >> i) & 1u) p.words[p.index(y, x, k / 32, i)] |= 1u << (k % 32);
            }
    return p;
}

QTensor unpack_activations(const PackedActivations& p) {
    if (p.words.size() != PackedActivations::word_count(p.h, p.w, p.k, p.bits.bits()))
        throw FormatError("packed activation buffer length does not match its dims");
    std::vector<std::int32_t> data(static_cast<std::size_t>(p.h) * p.w * p.k, 0);
    for (int y = 0; y < p.h; ++y)
        for (int x = 0; x < p.w; ++x)
            for (int k = 0; k < p.k; ++k) {
                std::int32_t v = 0;
                for (int i = 0; i < p.bits.bits(); ++i)
                    v |= static_cast<std::int32_t>((p.words[p.index(y, x, k / 32, i)] >> (k % 32)) & 1u) << i;
                data[(static_cast<std::size_t>(y) * p.w + x) * p.k + k] = v;
            }
    return QTensor({p.h, p.w, p.k}, std::move(data), p.bits, false);
}

PackedWeights pack_weights(const QTensor& t, BitWidth bits, ConvMode mode) {
    if (t.rank() != 4) throw DomainError("weights must have shape {Kout, Kin, Fh, Fw}");
    const int f = filter_size(mode);
    if (t.dim(2) != f || t.dim(3) != f)
        throw DomainError(std::string("weight filter geometry does not match ") + to_string(mode) + " mode");
    require_unsigned_range(t, bits, "weight");
    PackedWeights p;
    p.mode = mode;
    p.kout = t.dim(0);
    p.kin = t.dim(1);
    p.bits = bits;
    p.words.assign(PackedWeights::word_count(mode, p.kout, p.kin, bits.bits()), 0);
    auto data = t.data();
    for (int ko = 0; ko < p.kout; ++ko)
        for (int ki = 0; ki < p.kin; ++ki)
            for (int tap = 0; tap < f * f; ++tap) {
                auto v = static_cast<std::uint32_t>(data[(static_cast<std::size_t>(ko) * p.kin + ki) * f * f + tap]);
                for (int b = 0; b < bits.bits(); ++b)
                    if ((v >> b) & 1u) p.words[p.index(ko, ki / 32, b, tap)] |= 1u << (ki % 32);
            }
    return p;
}

QTensor unpack_weights(const PackedWeights& p) {
    if (p.words.size() != PackedWeights::word_count(p.mode, p.kout, p.kin, p.bits.bits()))
        throw FormatError("packed weight buffer length does not match its dims");
    const int f = filter_size(p.mode);
    std::vector<std::int32_t> data(static_cast<std::size_t>(p.kout) * p.kin * f * f, 0);
    for (int ko = 0; ko < p.kout; ++ko)
        for (int ki = 0; ki < p.kin; ++ki)
            for (int tap = 0; tap < f * f; ++tap) {
                std::int32_t v = 0;
                for (int b = 0; b < p.bits.bits(); ++b)
                    v |= static_cast<std::int32_t>((p.words[p.index(ko, ki / 32, b, tap)] >> (ki % 32)) & 1u) << b;
                data[(static_cast<std::size_t>(ko) * p.kin + ki) * f * f + tap] = v;
            }
    return QTensor({p.kout, p.kin, f, f}, std::move(data), p.bits, false);
}

}  // namespace acs::quant
