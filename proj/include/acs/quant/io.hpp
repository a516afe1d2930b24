// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "acs/quant/qtensor.hpp"

namespace acs::quant {

// QTensor on disk: a JSON header {shape, bitwidth, signed, data} where `data`
// names a sidecar file (relative to the header) holding little-endian int32
// elements in row-major order.

void save_qtensor(const QTensor& t, const std::filesystem::path& header_path);
QTensor load_qtensor(const std::filesystem::path& header_path);

/// Raw little-endian 32-bit word dumps used for golden packed buffers.
void save_words(const std::vector<std::uint32_t>& words, const std::filesystem::path& path);
std::vector<std::uint32_t> load_words(const std::filesystem::path& path);

}  // namespace acs::quant
