// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "acs/common/memory.hpp"
#include "acs/isa/instruction.hpp"

namespace acs::isa {

inline constexpr std::size_t kNumClasses = static_cast<std::size_t>(OpClass::Count_);

struct HwLoop {
    std::int32_t start = 0;
    std::int32_t end = 0;  ///< first instruction after the body
    std::uint32_t count = 0;
};

struct CoreState {
    std::int32_t pc = 0;
    std::array<std::uint32_t, kNumGpr> gpr{};
    std::array<std::uint32_t, kNumNnRegs> nn{};
    std::array<HwLoop, kNumHwLoops> loops{};
    bool halted = false;

    /// x0 always reads as zero; writes to it are dropped.
    std::uint32_t x(int r) const { return r == 0 ? 0u : gpr[r]; }
    void set_x(int r, std::uint32_t v) {
        if (r != 0) gpr[r] = v;
    }

    friend bool operator==(const CoreState&, const CoreState&) = default;
};

struct Trap {
    std::int32_t pc = 0;
    std::string reason;

    friend bool operator==(const Trap&, const Trap&) = default;
};

struct Trace {
    std::uint64_t cycles = 0;
    std::uint64_t retired = 0;
    std::array<std::uint64_t, kNumClasses> histogram{};
    std::uint64_t dotp_cycles = 0;  ///< cycles in which a dotp/sdotp/mlsdot issued
    std::uint64_t loads = 0;        ///< load instructions retired (nn.lw and refreshing mlsdot included)
    std::uint64_t stores = 0;
    std::uint64_t stall_cycles = 0;  ///< memory arbitration stalls
    std::uint64_t wait_cycles = 0;   ///< cycles asleep on barriers or events
    std::uint64_t branch_penalty_cycles = 0;
    // Counters restricted to instructions inside the body of an active innermost hardware loop.
    std::uint64_t loop_cycles = 0;
    std::uint64_t loop_dotp_cycles = 0;
    std::optional<Trap> trap;

    std::uint64_t count(OpClass c) const { return histogram[static_cast<std::size_t>(c)]; }
    double utilization() const { return cycles ? double(dotp_cycles) / double(cycles) : 0.0; }
    double steady_state_utilization() const {
        return loop_cycles ? double(loop_dotp_cycles) / double(loop_cycles) : 0.0;
    }
    std::string to_json() const;

    friend bool operator==(const Trace&, const Trace&) = default;
};

class TimeoutError : public Error {
public:
    TimeoutError(const std::string& what, Trace partial) : Error(what), trace_(std::move(partial)) {}
    const Trace& trace() const { return trace_; }

private:
    Trace trace_;
};

struct MemRequest {
    std::uint32_t addr = 0;
    bool write = false;
};

/// Side effect of one retired instruction that the surrounding cluster must act on.
enum class Effect : std::uint8_t { None, Barrier, WaitEvent, RbeStart, DmaStart, Halt, Trap };

struct StepResult {
    Effect effect = Effect::None;
    std::int32_t arg = 0;
};

/// One in-order core bound to a program. The cluster drives it cycle by cycle through
/// pending_request()/step()/stall(); run() drives it standalone with an ideal memory.
class Core {
public:
    explicit Core(const Program& prog);

    const CoreState& state() const { return state_; }
    CoreState& state() { return state_; }
    const Trace& trace() const { return trace_; }
    const Program& program() const { return *prog_; }

    bool done() const { return state_.halted; }
    const Instruction* next() const;
    /// Memory access the next instruction will make, if any.
    std::optional<MemRequest> pending_request() const;

    /// Executes the next instruction; adds 1 cycle plus the taken-branch penalty.
    StepResult step(Memory& mem);
    void stall(std::uint64_t n = 1);
    void sleep(std::uint64_t n = 1);

private:
    void retire(const Instruction& insn, std::uint64_t cycles, bool dotp, bool in_loop);
    bool in_leaf_loop() const;
    StepResult raise(const std::string& reason);
    std::int32_t advance(std::int32_t next_pc);

    const Program* prog_;
    CoreState state_;
    Trace trace_;
    std::vector<std::int8_t> leaf_loop_;  ///< per pc: loop index of the enclosing leaf hwloop body, or -1
    std::vector<std::int32_t> leaf_start_;
};

/// Runs `prog` to completion on a fresh core. System instructions that need a cluster
/// (barrier, evt.wait, rbe.start, dma.start) retire as single-cycle no-ops.
Trace run(const Program& prog, Memory& mem, std::uint64_t max_cycles, CoreState* final_state = nullptr);
Trace run(const Program& prog, Memory& mem, std::uint64_t max_cycles, const CoreState& initial,
          CoreState* final_state = nullptr);

}  // namespace acs::isa
