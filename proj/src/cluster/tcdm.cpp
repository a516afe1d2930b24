// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/cluster/tcdm.hpp"

#include "acs/common/error.hpp"

namespace acs::cluster {

TcdmArbiter::TcdmArbiter() { rbe_turn_.fill(true); }

ArbitrationResult TcdmArbiter::arbitrate(const std::vector<LicRequest>& lic, std::optional<std::uint32_t> rbe_addr,
                                         int rbe_words) {
    constexpr int B = TcdmGeometry::banks;
    ArbitrationResult res;
    res.lic_granted.assign(lic.size(), false);

    // LIC: per bank, the requester closest to the round-robin pointer wins.
    std::array<int, B> winner;
    winner.fill(-1);
    std::array<int, B> requesters{};
    for (std::size_t i = 0; i < lic.size(); ++i) {
        const int b = TcdmGeometry::bank_of(lic[i].addr);
        ++requesters[b];
        const int cur = winner[b];
        auto dist = [&](int m) { return (m - rr_[b] + kNumLicMasters) % kNumLicMasters; };
        if (cur < 0 || dist(lic[i].master) < dist(lic[static_cast<std::size_t>(cur)].master))
            winner[b] = static_cast<int>(i);
    }

    std::array<bool, B> rbe_bank{};
    if (rbe_addr) {
        if (rbe_words < 1 || rbe_words > B) throw DomainError("RBE access width outside [1, 32] words");
        for (int w = 0; w < rbe_words; ++w) rbe_bank[TcdmGeometry::bank_of(*rbe_addr + 4u * w)] = true;
        bool ok = true;
        for (int b = 0; b < B; ++b)
            if (rbe_bank[b] && winner[b] >= 0 && !rbe_turn_[b]) ok = false;
        res.rbe_granted = ok;
        for (int b = 0; b < B; ++b) {
            if (!rbe_bank[b] || winner[b] < 0) continue;
            if (ok) {
                rbe_turn_[b] = false;
                conflicts_[b] += static_cast<std::uint64_t>(requesters[b]);
                winner[b] = -1;
            } else if (!rbe_turn_[b]) {
                rbe_turn_[b] = true;
            }
        }
        if (ok) res.grants += rbe_words;
    }

    for (int b = 0; b < B; ++b) {
        if (winner[b] < 0) continue;
        const auto w = static_cast<std::size_t>(winner[b]);
        res.lic_granted[w] = true;
        ++res.grants;
        conflicts_[b] += static_cast<std::uint64_t>(requesters[b] - 1);
        rr_[b] = (lic[w].master + 1) % kNumLicMasters;
    }
    return res;
}

}  // namespace acs::cluster
