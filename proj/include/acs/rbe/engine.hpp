// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "acs/common/memory.hpp"
#include "acs/rbe/job.hpp"

namespace acs::rbe {

/// Popcount of a 32-lane 1-bit dot product.
inline int binconv(std::uint32_t act, std::uint32_t wgt) { return __builtin_popcount(act & wgt); }

enum class OverflowPolicy { Trap, Wrap };

/// Cycle-model constants. Defaults are the calibrated values; see config/calibration.json.
struct RbeTiming {
    double clock_hz = 420e6;
    int load_words_per_cycle = 9;       ///< 288-bit streamer
    int streamout_words_per_cycle = 9;
    int compute_overhead = 39;          ///< fixed cycles per COMPUTE phase (pipeline fill, accumulator handoff)
    int normquant_cycles = 10;          ///< per Kout tile and spatial tile
};

enum class Phase : std::uint8_t { Load, Compute, NormQuant, StreamOut };
inline constexpr std::size_t kNumPhases = 4;
const char* to_string(Phase p);

struct PhaseSegment {
    Phase phase = Phase::Load;
    std::uint64_t cycles = 0;
    std::uint32_t addr = 0;   ///< first streamer address (LOAD / STREAMOUT)
    std::uint32_t words = 0;  ///< words moved over the streamer
};

struct CycleReport {
    std::array<std::uint64_t, kNumPhases> phase_cycles{};
    std::uint64_t total_cycles = 0;
    std::vector<PhaseSegment> timeline;
    std::uint64_t macs = 0;
    std::uint64_t ops = 0;         ///< 2 per MAC at W x I precision
    std::uint64_t binary_ops = 0;  ///< ops x W x I
    double clock_hz = 0.0;

    std::uint64_t cycles(Phase p) const { return phase_cycles[static_cast<std::size_t>(p)]; }
    double ops_per_cycle() const { return total_cycles ? double(ops) / double(total_cycles) : 0.0; }
    double compute_ops_per_cycle() const {
        return cycles(Phase::Compute) ? double(ops) / double(cycles(Phase::Compute)) : 0.0;
    }
    double binary_ops_per_cycle() const { return total_cycles ? double(binary_ops) / double(total_cycles) : 0.0; }
    double gops() const { return ops_per_cycle() * clock_hz * 1e-9; }
    double binary_gops() const { return binary_ops_per_cycle() * clock_hz * 1e-9; }
    double seconds() const { return clock_hz > 0 ? double(total_cycles) / clock_hz : 0.0; }
};

struct FunctionalStats {
    std::uint64_t binconv_evaluations = 0;
    std::uint64_t output_words_written = 0;
    std::uint64_t overflow_events = 0;
    int max_and_gates_per_step = 0;  ///< busiest single COMPUTE step
};

/// Bit-exact execution of the job's loop nest against `mem`.
FunctionalStats execute_functional(const RbeJob& job, Memory& mem, OverflowPolicy policy = OverflowPolicy::Trap);

/// Cycle model of a job without touching memory.
CycleReport estimate_cycles(const RbeJob& job, const RbeTiming& timing = {});

/// Functional execution plus the cycle report.
CycleReport execute_timed(const RbeJob& job, Memory& mem, const RbeTiming& timing = {},
                          OverflowPolicy policy = OverflowPolicy::Trap, FunctionalStats* stats = nullptr);

class QueueFullError : public Error {
public:
    using Error::Error;
};

/// Engine with two register-file contexts. A job holds its context from enqueue until
/// its done event, so at most two jobs are in flight. Jobs run in FIFO order; the
/// functional effect is applied when a job starts, the done event after its timeline.
class RbeEngine {
public:
    static constexpr std::size_t kContexts = 2;

    explicit RbeEngine(Memory& mem, RbeTiming timing = {}, OverflowPolicy policy = OverflowPolicy::Trap);

    /// Returns the job id; throws QueueFullError when both contexts are taken.
    int enqueue(const RbeJob& job);
    std::size_t occupancy() const { return queue_.size() + (running_ ? 1 : 0); }
    bool idle() const { return !running_ && queue_.empty(); }
    std::optional<int> running_id() const { return running_ ? std::optional<int>(running_->id) : std::nullopt; }

    struct Request {
        std::uint32_t addr = 0;
        int words = 0;
    };
    /// Starts the next queued job if the engine is free, then returns the streamer
    /// access wanted in the coming cycle, if any. Call once per cycle before tick().
    std::optional<Request> request();
    /// Advances one cycle; `granted` is false when the streamer access was stalled.
    /// Returns ids of jobs completing in this cycle.
    std::vector<int> tick(bool granted = true);
    /// Standalone drive until idle; returns elapsed cycles.
    std::uint64_t run_to_idle();

    std::uint64_t busy_cycles() const { return busy_cycles_; }
    std::uint64_t stall_cycles() const { return stall_cycles_; }
    const std::vector<std::pair<int, CycleReport>>& completed() const { return completed_; }
    const std::vector<FunctionalStats>& functional_stats() const { return fstats_; }

private:
    struct Running {
        int id;
        CycleReport report;
        std::size_t segment = 0;
        std::uint64_t left = 0;
        std::uint64_t done_words = 0;
    };
    void start_next();

    Memory* mem_;
    RbeTiming timing_;
    OverflowPolicy policy_;
    std::deque<std::pair<int, RbeJob>> queue_;
    std::optional<Running> running_;
    std::vector<std::pair<int, CycleReport>> completed_;
    std::vector<FunctionalStats> fstats_;
    int next_id_ = 0;
    std::uint64_t busy_cycles_ = 0;
    std::uint64_t stall_cycles_ = 0;
};

struct SweepRow {
    quant::ConvMode mode;
    int w_bits, i_bits, o_bits;
    CycleReport report;
};

/// Throughput over (mode, W, I) for a Kin x Kout layer with a square output.
std::vector<SweepRow> throughput_sweep(const RbeTiming& timing = {}, int kin = 64, int kout = 64, int out_side = 3,
                                       std::vector<int> w_values = {2, 4, 8}, std::vector<int> i_values = {2, 4, 8},
                                       int o_bits = 4);
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Dense job descriptor for the given geometry with all buffers packed back to back from `base`.
RbeJob make_dense_job(quant::ConvMode mode, int w_bits, int i_bits, int o_bits, int kin, int kout, int hout, int wout,
                      std::uint32_t base = 0, quant::Padding padding = quant::Padding::Same);

}  // namespace acs::rbe
