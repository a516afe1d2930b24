// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/isa/simd.hpp"

namespace acs::isa {

std::int32_t extract_lane(std::uint32_t v, int width, int k, bool is_signed) {
    const std::uint32_t mask = width == 32 ? 0xFFFFFFFFu : ((1u << width) - 1u);
    const std::uint32_t raw = (v >> (k * width)) & mask;
    if (is_signed && width < 32 && (raw >> (width - 1)) & 1u) return static_cast<std::int32_t>(raw | ~mask);
    return static_cast<std::int32_t>(raw);
}

std::uint32_t sdotp(std::uint32_t a, std::uint32_t b, std::uint32_t acc, const SimdFormat& fmt) {
    const bool a_signed = fmt.sign == Signedness::SS || fmt.sign == Signedness::SU;
    const bool b_signed = fmt.sign == Signedness::SS || fmt.sign == Signedness::US;
    const int lanes = fmt.lanes();
    const std::int32_t scalar = extract_lane(b, fmt.width, 0, b_signed);
    std::uint32_t sum = acc;
    for (int k = 0; k < lanes; ++k) {
        const std::int32_t x = extract_lane(a, fmt.width, k, a_signed);
        const std::int32_t y = fmt.scalar ? scalar : extract_lane(b, fmt.width, k, b_signed);
        sum += static_cast<std::uint32_t>(x) * static_cast<std::uint32_t>(y);
    }
    return sum;
}

std::uint32_t simd_add(std::uint32_t a, std::uint32_t b, int width) {
    const std::uint32_t mask = (1u << width) - 1u;
    std::uint32_t out = 0;
    for (int k = 0; k < 32 / width; ++k) {
        const std::uint32_t s = ((a >> (k * width)) + (b >> (k * width))) & mask;
        out |= s << (k * width);
    }
    return out;
}

}  // namespace acs::isa
