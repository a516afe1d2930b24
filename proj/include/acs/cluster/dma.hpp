// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include <json.hpp>

#include "acs/common/memory.hpp"
#include "acs/cluster/tcdm.hpp"

namespace acs::cluster {

enum class DmaDirection { L2ToL1, L1ToL2 };

/// Outer repetition of a DMA transfer: `count` rows advancing both sides by their strides.
struct DmaDim {
    std::uint32_t count = 1;
    std::uint32_t src_stride = 0;
    std::uint32_t dst_stride = 0;
};

/// Up to 3D transfer: contiguous rows of `length` bytes, repeated over `outer` (innermost first, at most 2).
struct DmaDescriptor {
    DmaDirection direction = DmaDirection::L2ToL1;
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint32_t length = 0;
    std::vector<DmaDim> outer;

    std::uint64_t bytes() const;
    /// (src, dst) byte address of the n-th byte in transfer order.
    std::pair<std::uint32_t, std::uint32_t> byte_addr(std::uint64_t n) const;
};

struct DmaTiming {
    int bytes_per_cycle = 8;
    int setup_cycles = 10;
};

/// Throws ValidationError for empty transfers, too many dimensions or regions outside L1/L2.
void validate(const DmaDescriptor& d);
std::uint64_t dma_cycles(const DmaDescriptor& d, const DmaTiming& t = {});
/// Same cost for a transfer of `bytes` without address checks.
std::uint64_t dma_cycles(std::uint64_t bytes, const DmaTiming& t = {});

nlohmann::json to_json(const DmaDescriptor& d);
DmaDescriptor dma_from_json(const nlohmann::json& j);

/// One DMA direction channel: FIFO of descriptors, setup phase, then one beat of up to
/// `bytes_per_cycle` bytes per cycle once all TCDM words of the beat have been granted.
class DmaChannel {
public:
    DmaChannel(int master, DmaTiming timing = {}) : master_(master), timing_(timing) {}

    void push(int id, const DmaDescriptor& d);
    bool idle() const { return !active_ && queue_.empty(); }
    std::optional<int> active_id() const { return active_ ? std::optional<int>(active_->id) : std::nullopt; }

    /// TCDM words the channel needs this cycle (may be empty during setup).
    std::vector<LicRequest> requests();
    /// Advances one cycle given per-request grants (parallel to requests()). Returns
    /// the id of a descriptor completing this cycle.
    std::optional<int> tick(const std::vector<bool>& granted, Memory& mem);

    std::uint64_t busy_cycles() const { return busy_; }
    std::uint64_t stall_cycles() const { return stalls_; }
    std::uint64_t words_granted() const { return words_granted_; }
    std::uint64_t words_requested() const { return words_requested_; }

private:
    struct Active {
        int id;
        DmaDescriptor desc;
        std::uint64_t setup_left;
        std::uint64_t offset = 0;               ///< bytes already moved
        std::vector<std::uint32_t> beat_words;  ///< TCDM words of the current beat
        std::vector<bool> beat_done;
    };
    void start_beat();

    int master_;
    DmaTiming timing_;
    std::deque<std::pair<int, DmaDescriptor>> queue_;
    std::optional<Active> active_;
    std::vector<std::size_t> req_map_;
    std::uint64_t busy_ = 0, stalls_ = 0, words_granted_ = 0, words_requested_ = 0;
};

}  // namespace acs::cluster
