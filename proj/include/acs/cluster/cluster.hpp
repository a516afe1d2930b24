// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "acs/cluster/dma.hpp"
#include "acs/cluster/tcdm.hpp"
#include "acs/common/memory.hpp"
#include "acs/isa/core.hpp"
#include "acs/rbe/engine.hpp"

namespace acs::cluster {

/// L1 TCDM plus L2, routed by address.
class ClusterMemory : public Memory {
public:
    ClusterMemory() : l1_(TcdmGeometry::base, TcdmGeometry::size), l2_(L2Geometry::base, L2Geometry::size) {}

    std::uint8_t load8(std::uint32_t addr) const override { return region(addr).load8(addr); }
    void store8(std::uint32_t addr, std::uint8_t v) override { region(addr).store8(addr, v); }
    std::uint32_t load32(std::uint32_t addr) const override { return region(addr).load32(addr); }
    void store32(std::uint32_t addr, std::uint32_t v) override { region(addr).store32(addr, v); }

    FlatMemory& l1() { return l1_; }
    FlatMemory& l2() { return l2_; }

private:
    const FlatMemory& region(std::uint32_t addr) const { return L2Geometry::contains(addr) ? l2_ : l1_; }
    FlatMemory& region(std::uint32_t addr) { return L2Geometry::contains(addr) ? l2_ : l1_; }

    FlatMemory l1_, l2_;
};

/// Barrier over the live cores (halted cores leave the group) and per-core pending
/// flags for done events.
class EventUnit {
public:
    void arrive(int core) { arrived_[core] = true; }
    /// Releases the barrier when `live` cores have arrived; returns true on release.
    bool try_release(std::size_t live);
    std::size_t arrived() const { return arrived_.size(); }
    std::uint64_t barriers_released() const { return released_; }

    /// Consumes a pending event for `core` if one is set.
    bool consume(int core, isa::EventId e);
    void set_pending(int core, isa::EventId e) { pending_[core][static_cast<std::size_t>(e)] = true; }

private:
    std::map<int, bool> arrived_;
    std::map<int, std::array<bool, 2>> pending_;
    std::uint64_t released_ = 0;
};

struct CoreSetup {
    int id = 0;
    isa::Program program;
    std::map<int, std::uint32_t> regs;  ///< initial GPR values; x10 (a0) defaults to the core id
};

struct MemoryInit {
    std::uint32_t addr = 0;
    std::vector<std::uint32_t> words;
};

struct ClusterConfig {
    DmaTiming dma;
    rbe::RbeTiming rbe;
    std::uint64_t max_cycles = 100'000'000;
    std::uint64_t deadlock_window = 100'000;  ///< cycles without progress before giving up
    bool timing = true;                       ///< false: functional mode, no arbitration or latencies
    bool cycle_csv = false;
};

struct Scenario {
    std::vector<CoreSetup> cores;
    std::vector<MemoryInit> memory;
    std::vector<rbe::RbeJob> rbe_jobs;     ///< started by `rbe.start <index>`
    std::vector<DmaDescriptor> dma;        ///< started by `dma.start <index>`
    ClusterConfig config;
};

struct Interval {
    int index = 0;  ///< job or descriptor index in the scenario
    std::uint64_t issue = 0, start = 0, end = 0;
};

struct RbeRun {
    Interval when;
    rbe::CycleReport report;
};

struct ClusterTrace {
    std::uint64_t total_cycles = 0;
    std::vector<int> core_ids;
    std::vector<isa::Trace> cores;
    std::array<std::uint64_t, kNumLicMasters> lic_stalls{};
    std::array<std::uint64_t, kNumLicMasters> lic_grants{};
    std::array<std::uint64_t, TcdmGeometry::banks> bank_conflicts{};
    std::uint64_t rbe_grants = 0;        ///< granted RBE accesses
    std::uint64_t rbe_words = 0;
    std::uint64_t rbe_stalls = 0;
    std::uint64_t rbe_busy_cycles = 0;
    std::uint64_t lic_words = 0;
    std::uint64_t l2_core_accesses = 0;  ///< core accesses outside TCDM, not arbitrated
    std::uint64_t max_grants_per_cycle = 0;
    std::array<std::uint64_t, 2> dma_busy_cycles{};
    std::vector<Interval> dma_transfers;
    std::vector<RbeRun> rbe_jobs;
    std::uint64_t barriers = 0;
    std::string cycle_csv;

    nlohmann::ordered_json to_json() const;
};

class DeadlockError : public Error {
public:
    using Error::Error;
};

/// Lockstep simulation of the cores, RBE and DMA against the shared TCDM.
ClusterTrace run_cluster(const Scenario& s, ClusterMemory* mem_out = nullptr);

/// Loads a scenario; program paths resolve relative to `base_dir`.
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir, std::uint64_t seed = 0);
Scenario load_scenario(const std::filesystem::path& path, std::uint64_t seed = 0);

}  // namespace acs::cluster
