// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace acs::cluster {

struct TcdmGeometry {
    static constexpr std::uint32_t base = 0x10000000;
    static constexpr std::uint32_t size = 128 * 1024;
    static constexpr int banks = 32;
    static constexpr bool contains(std::uint32_t addr) { return addr >= base && addr - base < size; }
    static constexpr int bank_of(std::uint32_t addr) { return static_cast<int>((addr / 4) % banks); }
};

struct L2Geometry {
    static constexpr std::uint32_t base = 0x1C000000;
    static constexpr std::uint32_t size = 1024 * 1024;
    static constexpr bool contains(std::uint32_t addr) { return addr >= base && addr - base < size; }
};

/// Masters on the logarithmic interconnect: 16 cores, then the two DMA channels.
inline constexpr int kNumCores = 16;
inline constexpr int kMasterDmaIn = kNumCores;       ///< L2 -> L1 channel (TCDM writes)
inline constexpr int kMasterDmaOut = kNumCores + 1;  ///< L1 -> L2 channel (TCDM reads)
inline constexpr int kNumLicMasters = kNumCores + 2;

struct LicRequest {
    int master = 0;
    std::uint32_t addr = 0;
};

struct ArbitrationResult {
    std::vector<bool> lic_granted;  ///< parallel to the request list
    bool rbe_granted = false;
    int grants = 0;                 ///< words granted this cycle over both branches
};

/// Per-bank single-port arbitration. LIC requests compete round-robin per bank; the
/// RBE branch issues one contiguous multi-word access that never conflicts with itself
/// and is granted only as a whole. Where both branches want a bank, a per-bank pointer
/// alternates between them.
class TcdmArbiter {
public:
    TcdmArbiter();

    ArbitrationResult arbitrate(const std::vector<LicRequest>& lic, std::optional<std::uint32_t> rbe_addr,
                                int rbe_words);

    const std::array<std::uint64_t, TcdmGeometry::banks>& bank_conflicts() const { return conflicts_; }

private:
    std::array<int, TcdmGeometry::banks> rr_{};          ///< next LIC master with priority
    std::array<bool, TcdmGeometry::banks> rbe_turn_{};   ///< branch priority on contention
    std::array<std::uint64_t, TcdmGeometry::banks> conflicts_{};
};

}  // namespace acs::cluster
