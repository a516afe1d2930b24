// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "acs/isa/instruction.hpp"

namespace acs::isa {

/// Lane `k` of a packed vector, sign- or zero-extended.
std::int32_t extract_lane(std::uint32_t v, int width, int k, bool is_signed);

/// acc + sum over lanes of a_k * b_k with 32-bit wrapping arithmetic. In the
/// scalar ("vs") form every a_k is multiplied by lane 0 of b.
std::uint32_t sdotp(std::uint32_t a, std::uint32_t b, std::uint32_t acc, const SimdFormat& fmt);

/// Lane-wise wrapping addition.
std::uint32_t simd_add(std::uint32_t a, std::uint32_t b, int width);

}  // namespace acs::isa
