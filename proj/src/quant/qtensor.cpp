// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/quant/qtensor.hpp"

#include <functional>
#include <numeric>

namespace acs::quant {

QTensor::QTensor(std::vector<int> shape, std::vector<std::int32_t> data, BitWidth bitwidth, bool is_signed)
    : shape_(std::move(shape)), data_(std::move(data)), bitwidth_(bitwidth), signed_(is_signed) {
    std::size_t n = 1;
    for (int d : shape_) {
        if (d < 0) throw DomainError("negative tensor extent");
        n *= static_cast<std::size_t>(d);
    }
    if (n != data_.size())
        throw FormatError("shape product " + std::to_string(n) + " != data length " + std::to_string(data_.size()));
    for (std::int32_t v : data_)
        if (!representable(v))
            throw DomainError("element " + std::to_string(v) + " not representable in " +
                              std::to_string(bitwidth_.bits()) + (signed_ ? "-bit signed" : "-bit unsigned"));
}

QTensor QTensor::zeros(std::vector<int> shape, BitWidth bitwidth, bool is_signed) {
    std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                    [](std::size_t a, int d) { return a * static_cast<std::size_t>(d); });
    return QTensor(std::move(shape), std::vector<std::int32_t>(n, 0), bitwidth, is_signed);
}

bool QTensor::representable(std::int64_t v) const {
    if (signed_) return v >= bitwidth_.signed_min() && v <= bitwidth_.signed_max();
    return v >= 0 && v <= bitwidth_.unsigned_max();
}

std::size_t QTensor::flat_index(std::initializer_list<int> idx) const {
    if (idx.size() != shape_.size()) throw DomainError("index rank mismatch");
    std::size_t flat = 0;
    std::size_t d = 0;
    for (int i : idx) {
        if (i < 0 || i >= shape_[d]) throw DomainError("index out of range");
        flat = flat * static_cast<std::size_t>(shape_[d]) + static_cast<std::size_t>(i);
        ++d;
    }
    return flat;
}

void QTensor::set(std::initializer_list<int> idx, std::int32_t value) {
    if (!representable(value)) throw DomainError("value not representable: " + std::to_string(value));
    data_[flat_index(idx)] = value;
}

NormParams NormParams::identity(int kout, bool relu) {
    return NormParams{std::vector<std::int32_t>(static_cast<std::size_t>(kout), 1),
                      std::vector<std::int32_t>(static_cast<std::size_t>(kout), 0), 0, relu};
}

void NormParams::validate(int kout) const {
    if (scale.size() != static_cast<std::size_t>(kout) || bias.size() != static_cast<std::size_t>(kout))
        throw ValidationError("scale/bias length must equal Kout=" + std::to_string(kout));
    if (shift < 0 || shift > 31) throw ValidationError("shift must lie in [0, 31]");
}

const char* to_string(ConvMode m) { return m == ConvMode::Conv3x3 ? "3x3" : "1x1"; }

ConvMode conv_mode_from_string(const std::string& s) {
    if (s == "3x3" || s == "conv3x3") return ConvMode::Conv3x3;
    if (s == "1x1" || s == "conv1x1") return ConvMode::Conv1x1;
    throw ValidationError("unknown convolution mode '" + s + "'");
}

}  // namespace acs::quant
