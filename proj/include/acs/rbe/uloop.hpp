// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acs/rbe/job.hpp"

namespace acs::rbe {

/// Tiny nested-loop address generator. Levels run outermost first; when a level
/// advances (all inner levels wrapping to zero) every address register is bumped by
/// that level's precomputed increment, so no multiplications are needed at run time.
struct UloopLevel {
    std::string name;
    int extent = 1;
    std::vector<std::int64_t> increment;  ///< one per address register
};

struct UloopProgram {
    std::vector<UloopLevel> levels;
    std::vector<std::int64_t> base;

    /// Builds increments from per-level strides (strides[level][register]).
    static UloopProgram from_strides(std::vector<std::string> names, std::vector<int> extents,
                                     const std::vector<std::vector<std::int64_t>>& strides,
                                     std::vector<std::int64_t> base);

    std::uint64_t iterations() const;

    /// Calls f(indices, addresses) for every iteration in loop order.
    template <typename F>
    void walk(F&& f) const {
        const std::size_t n = levels.size();
        for (const auto& l : levels)
            if (l.extent <= 0) return;
        std::vector<int> idx(n, 0);
        std::vector<std::int64_t> addr = base;
        while (true) {
            f(static_cast<const std::vector<int>&>(idx), static_cast<const std::vector<std::int64_t>&>(addr));
            std::size_t lv = n;
            while (lv > 0) {
                --lv;
                if (idx[lv] + 1 < levels[lv].extent) break;
                idx[lv] = 0;
                if (lv == 0) return;
            }
            if (n == 0) return;
            ++idx[lv];
            for (std::size_t r = 0; r < addr.size(); ++r) addr[r] += levels[lv].increment[r];
        }
    }
};

/// Address registers of the job loop nest.
enum UloopReg : int { kRegAct = 0, kRegWgt = 1, kRegOut = 2, kNumUloopRegs = 3 };

/// Tile loops of a job: spatial tile row, spatial tile column, Kout tile, Kin slice,
/// input bit-plane pass. The activation register points at the top-left pixel of the
/// input patch (it may lie outside the tensor when padding applies).
UloopProgram job_uloop(const RbeJob& job);

}  // namespace acs::rbe
