// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "acs/quant/qtensor.hpp"

namespace acs::test {

inline quant::QTensor random_tensor(std::mt19937_64& rng, std::vector<int> shape, int bits) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    std::uniform_int_distribution<std::int32_t> dist(0, (1 << bits) - 1);
    std::vector<std::int32_t> data(n);
    for (auto& v : data) v = dist(rng);
    return quant::QTensor(std::move(shape), std::move(data), quant::BitWidth(bits), false);
}

inline quant::NormParams random_norm(std::mt19937_64& rng, int kout) {
    std::uniform_int_distribution<std::int32_t> sc(-4, 16), bi(-2000, 2000);
    std::uniform_int_distribution<int> sh(0, 12);
    quant::NormParams n;
    for (int k = 0; k < kout; ++k) {
        n.scale.push_back(sc(rng));
        n.bias.push_back(bi(rng));
    }
    n.shift = sh(rng);
    n.relu = std::bernoulli_distribution(0.5)(rng);
    return n;
}

// Naive convolution written independently of the library: explicit zero-padded
// copy of the input followed by a direct sliding-window sum per output.
inline std::vector<std::int64_t> naive_conv_acc(const quant::QTensor& a, const quant::QTensor& w, bool same) {
    const int H = a.dim(0), W = a.dim(1), K = a.dim(2), KO = w.dim(0), F = w.dim(2);
    const int pad = (F == 3 && same) ? 1 : 0;
    const int PH = H + 2 * pad, PW = W + 2 * pad;
    std::vector<std::int64_t> padded(static_cast<std::size_t>(PH) * PW * K, 0);
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x)
            for (int k = 0; k < K; ++k) padded[((y + pad) * PW + (x + pad)) * K + k] = a.at({y, x, k});
    const int OH = PH - F + 1, OW = PW - F + 1;
    std::vector<std::int64_t> out(static_cast<std::size_t>(OH) * OW * KO, 0);
    for (int ko = 0; ko < KO; ++ko)
        for (int k = 0; k < K; ++k)
            for (int fy = 0; fy < F; ++fy)
                for (int fx = 0; fx < F; ++fx) {
                    const std::int64_t wv = w.at({ko, k, fy, fx});
                    if (wv == 0) continue;
                    for (int y = 0; y < OH; ++y)
                        for (int x = 0; x < OW; ++x)
                            out[(y * OW + x) * KO + ko] += wv * padded[((y + fy) * PW + (x + fx)) * K + k];
                }
    return out;
}

inline std::vector<std::int32_t> naive_conv(const quant::QTensor& a, const quant::QTensor& w,
                                            const quant::NormParams& n, int obits, bool same) {
    auto acc = naive_conv_acc(a, w, same);
    const int KO = w.dim(0);
    std::vector<std::int32_t> out(acc.size());
    const std::int64_t hi = (std::int64_t{1} << obits) - 1;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        const std::size_t ko = i % KO;
        std::int64_t v = n.scale[ko] * acc[i] + n.bias[ko];
        // floor division by 2^shift
        const std::int64_t d = std::int64_t{1} << n.shift;
        v = (v >= 0) ? v / d : -((-v + d - 1) / d);
        if (v < 0) v = 0;
        if (v > hi) v = hi;
        out[i] = static_cast<std::int32_t>(v);
    }
    return out;
}

}  // namespace acs::test
