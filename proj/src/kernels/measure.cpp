// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include "acs/kernels/kernels.hpp"

namespace acs::kernels {

KernelStats measure(const isa::Program& prog, Memory& mem, std::uint64_t macs, std::uint64_t max_cycles) {
    KernelStats s;
    s.trace = isa::run(prog, mem, max_cycles);
    if (s.trace.trap) throw Error("kernel trapped at pc " + std::to_string(s.trace.trap->pc) + ": " + s.trace.trap->reason);
    s.instructions_retired = s.trace.retired;
    s.cycles = s.trace.cycles;
    s.macs_performed = macs;
    s.instr_per_mac = macs ? double(s.instructions_retired) / double(macs) : 0.0;
    s.dotp_utilization = s.trace.utilization();
    s.steady_state_utilization = s.trace.steady_state_utilization();
    s.loads = s.trace.loads;
    return s;
}

InnerLoopInfo inspect_inner_loop(const isa::Program& prog) {
    InnerLoopInfo info;
    for (std::size_t pc = 0; pc < prog.size(); ++pc) {
        const auto& setup = prog.code[pc];
        if (isa::op_class(setup.op) != isa::OpClass::HwLoop) continue;
        bool leaf = true;
        for (auto q = static_cast<std::int32_t>(pc) + 1; q < setup.target; ++q)
            if (isa::op_class(prog.code[q].op) == isa::OpClass::HwLoop) leaf = false;
        if (!leaf) continue;
        std::set<int> accs;
        info = {};
        for (auto q = static_cast<std::int32_t>(pc) + 1; q < setup.target; ++q) {
            const auto& insn = prog.code[q];
            ++info.length;
            if (isa::is_load(insn.op)) ++info.explicit_loads;
            if (isa::is_dotp(insn.op)) {
                ++info.dotp;
                accs.insert(insn.rd);
            }
        }
        info.accumulators = static_cast<int>(accs.size());
        return info;
    }
    return info;
}

}  // namespace acs::kernels
