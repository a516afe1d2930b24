// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/isa/core.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "acs/isa/simd.hpp"

namespace acs::isa {

namespace {

bool aligned(std::uint32_t addr, int size) { return size <= 1 || addr % static_cast<std::uint32_t>(size) == 0; }

std::int32_t sign_extend(std::uint32_t v, int bits) {
    if (bits >= 32) return static_cast<std::int32_t>(v);
    const std::uint32_t m = 1u << (bits - 1);
    v &= (1u << bits) - 1u;
    return static_cast<std::int32_t>((v ^ m) - m);
}

}  // namespace

std::string Trace::to_json() const {
    nlohmann::ordered_json j;
    j["cycles"] = cycles;
    j["retired"] = retired;
    nlohmann::ordered_json hist;
    for (std::size_t c = 0; c < kNumClasses; ++c)
        hist[std::string(op_class_name(static_cast<OpClass>(c)))] = histogram[c];
    j["histogram"] = hist;
    j["dotp_cycles"] = dotp_cycles;
    j["utilization"] = utilization();
    j["loop_cycles"] = loop_cycles;
    j["loop_dotp_cycles"] = loop_dotp_cycles;
    j["steady_state_utilization"] = steady_state_utilization();
    j["loads"] = loads;
    j["stores"] = stores;
    j["stall_cycles"] = stall_cycles;
    j["wait_cycles"] = wait_cycles;
    j["branch_penalty_cycles"] = branch_penalty_cycles;
    if (trap) j["trap"] = {{"pc", trap->pc}, {"reason", trap->reason}};
    return j.dump(2);
}

Core::Core(const Program& prog) : prog_(&prog) {
    validate(prog);
    state_.pc = prog.entry;
    state_.halted = prog.empty();

    // A leaf loop body contains no other hardware-loop setup.
    const auto n = static_cast<std::int32_t>(prog.size());
    leaf_loop_.assign(n, -1);
    leaf_start_.assign(n, -1);
    for (std::int32_t pc = 0; pc < n; ++pc) {
        const auto& insn = prog.code[pc];
        if (op_class(insn.op) != OpClass::HwLoop) continue;
        bool leaf = true;
        for (std::int32_t q = pc + 1; q < insn.target; ++q)
            if (op_class(prog.code[q].op) == OpClass::HwLoop) leaf = false;
        if (!leaf) continue;
        for (std::int32_t q = pc + 1; q < insn.target; ++q) {
            leaf_loop_[q] = static_cast<std::int8_t>(insn.imm2);
            leaf_start_[q] = pc + 1;
        }
    }
}

const Instruction* Core::next() const {
    if (state_.halted) return nullptr;
    return &prog_->code[state_.pc];
}

std::optional<MemRequest> Core::pending_request() const {
    const Instruction* insn = next();
    if (!insn) return std::nullopt;
    const auto& s = state_;
    switch (insn->op) {
        case Op::Lw: case Op::Lh: case Op::Lhu: case Op::Lb: case Op::Lbu:
            return MemRequest{s.x(insn->rs1) + static_cast<std::uint32_t>(insn->imm), false};
        case Op::Sw: case Op::Sh: case Op::Sb:
            return MemRequest{s.x(insn->rs1) + static_cast<std::uint32_t>(insn->imm), true};
        case Op::PLw: case Op::PLbu: case Op::PLb: case Op::NnLw:
            return MemRequest{s.x(insn->rs1), false};
        case Op::PSw: case Op::PSb:
            return MemRequest{s.x(insn->rs1), true};
        case Op::PvMlSdot:
            if (insn->refresh_a || insn->refresh_b) return MemRequest{s.x(insn->rs1), false};
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

void Core::stall(std::uint64_t n) {
    trace_.cycles += n;
    trace_.stall_cycles += n;
}

void Core::sleep(std::uint64_t n) {
    trace_.cycles += n;
    trace_.wait_cycles += n;
}

bool Core::in_leaf_loop() const {
    const int leaf = leaf_loop_[state_.pc];
    if (leaf < 0) return false;
    const auto& lp = state_.loops[leaf];
    return lp.count > 0 && lp.start == leaf_start_[state_.pc];
}

void Core::retire(const Instruction& insn, std::uint64_t cycles, bool dotp, bool in_loop) {
    trace_.cycles += cycles;
    trace_.retired += 1;
    trace_.histogram[static_cast<std::size_t>(op_class(insn.op))] += 1;
    if (dotp) trace_.dotp_cycles += 1;
    if (in_loop) {
        trace_.loop_cycles += cycles;
        if (dotp) trace_.loop_dotp_cycles += 1;
    }
}

StepResult Core::raise(const std::string& reason) {
    trace_.trap = Trap{state_.pc, reason};
    state_.halted = true;
    return {Effect::Trap, state_.pc};
}

std::int32_t Core::advance(std::int32_t next_pc) {
    // Innermost loop (latest start) first; an exhausted inner loop falls through to the
    // enclosing loop when both end at the same instruction.
    std::array<int, kNumHwLoops> order{};
    int n = 0;
    for (int l = 0; l < kNumHwLoops; ++l)
        if (state_.loops[l].count > 0 && state_.loops[l].end == next_pc) order[n++] = l;
    std::sort(order.begin(), order.begin() + n,
              [&](int a, int b) { return state_.loops[a].start > state_.loops[b].start; });
    for (int i = 0; i < n; ++i) {
        auto& lp = state_.loops[order[i]];
        lp.count -= 1;
        if (lp.count > 0) return lp.start;
    }
    return next_pc;
}

StepResult Core::step(Memory& mem) {
    const Instruction* ip = next();
    if (!ip) return {Effect::Halt, 0};
    const Instruction& insn = *ip;
    auto& s = state_;
    const std::int32_t pc = s.pc;
    std::int32_t next_pc = pc + 1;
    bool taken = false;
    bool dotp = false;
    StepResult result;
    const bool in_loop = in_leaf_loop();

    const std::uint32_t a = s.x(insn.rs1);
    const std::uint32_t b = s.x(insn.rs2);
    const auto imm = static_cast<std::uint32_t>(insn.imm);
    const int size = access_size(insn.op);

    // Address checks come first so a trapping instruction leaves the state untouched.
    if (auto req = pending_request()) {
        if (!aligned(req->addr, size)) return raise("misaligned access at 0x" + [&] {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%08x", req->addr);
            return std::string(buf);
        }());
    }

    try {
        switch (insn.op) {
            case Op::Add: s.set_x(insn.rd, a + b); break;
            case Op::Sub: s.set_x(insn.rd, a - b); break;
            case Op::And: s.set_x(insn.rd, a & b); break;
            case Op::Or: s.set_x(insn.rd, a | b); break;
            case Op::Xor: s.set_x(insn.rd, a ^ b); break;
            case Op::Sll: s.set_x(insn.rd, a << (b & 31)); break;
            case Op::Srl: s.set_x(insn.rd, a >> (b & 31)); break;
            case Op::Sra: s.set_x(insn.rd, static_cast<std::uint32_t>(static_cast<std::int32_t>(a) >> (b & 31))); break;
            case Op::Slt: s.set_x(insn.rd, static_cast<std::int32_t>(a) < static_cast<std::int32_t>(b)); break;
            case Op::Sltu: s.set_x(insn.rd, a < b); break;
            case Op::Mul: s.set_x(insn.rd, a * b); break;
            case Op::Addi: s.set_x(insn.rd, a + imm); break;
            case Op::Andi: s.set_x(insn.rd, a & imm); break;
            case Op::Ori: s.set_x(insn.rd, a | imm); break;
            case Op::Xori: s.set_x(insn.rd, a ^ imm); break;
            case Op::Slli: s.set_x(insn.rd, a << (imm & 31)); break;
            case Op::Srli: s.set_x(insn.rd, a >> (imm & 31)); break;
            case Op::Srai: s.set_x(insn.rd, static_cast<std::uint32_t>(static_cast<std::int32_t>(a) >> (imm & 31))); break;
            case Op::Slti: s.set_x(insn.rd, static_cast<std::int32_t>(a) < insn.imm); break;
            case Op::Li: s.set_x(insn.rd, imm); break;

            case Op::Lw: s.set_x(insn.rd, mem.load32(a + imm)); break;
            case Op::Lh: s.set_x(insn.rd, static_cast<std::uint32_t>(sign_extend(mem.load16(a + imm), 16))); break;
            case Op::Lhu: s.set_x(insn.rd, mem.load16(a + imm)); break;
            case Op::Lb: s.set_x(insn.rd, static_cast<std::uint32_t>(sign_extend(mem.load8(a + imm), 8))); break;
            case Op::Lbu: s.set_x(insn.rd, mem.load8(a + imm)); break;
            case Op::Sw: mem.store32(a + imm, b); break;
            case Op::Sh: mem.store16(a + imm, static_cast<std::uint16_t>(b)); break;
            case Op::Sb: mem.store8(a + imm, static_cast<std::uint8_t>(b)); break;

            case Op::PLw: {
                const std::uint32_t v = mem.load32(a);
                s.set_x(insn.rs1, a + imm);
                s.set_x(insn.rd, v);
                break;
            }
            case Op::PLbu: {
                const std::uint32_t v = mem.load8(a);
                s.set_x(insn.rs1, a + imm);
                s.set_x(insn.rd, v);
                break;
            }
            case Op::PLb: {
                const auto v = static_cast<std::uint32_t>(sign_extend(mem.load8(a), 8));
                s.set_x(insn.rs1, a + imm);
                s.set_x(insn.rd, v);
                break;
            }
            case Op::PSw: mem.store32(a, b); s.set_x(insn.rs1, a + imm); break;
            case Op::PSb: mem.store8(a, static_cast<std::uint8_t>(b)); s.set_x(insn.rs1, a + imm); break;

            case Op::Beq: taken = a == b; break;
            case Op::Bne: taken = a != b; break;
            case Op::Blt: taken = static_cast<std::int32_t>(a) < static_cast<std::int32_t>(b); break;
            case Op::Bge: taken = static_cast<std::int32_t>(a) >= static_cast<std::int32_t>(b); break;
            case Op::Bltu: taken = a < b; break;
            case Op::Bgeu: taken = a >= b; break;
            case Op::Jal:
                s.set_x(insn.rd, static_cast<std::uint32_t>(pc + 1));
                taken = true;
                break;

            case Op::LpSetup: case Op::LpSetupi: {
                const std::uint32_t count = insn.op == Op::LpSetup ? a : imm;
                s.loops[insn.imm2] = HwLoop{pc + 1, insn.target, count};
                if (count == 0) next_pc = insn.target;
                break;
            }

            case Op::PExtract: s.set_x(insn.rd, static_cast<std::uint32_t>(sign_extend(a >> insn.imm2, insn.imm))); break;
            case Op::PExtractu: {
                const std::uint32_t mask = insn.imm >= 32 ? 0xFFFFFFFFu : ((1u << insn.imm) - 1u);
                s.set_x(insn.rd, (a >> insn.imm2) & mask);
                break;
            }
            case Op::PClipu: {
                const auto v = static_cast<std::int32_t>(a);
                const std::int32_t hi = static_cast<std::int32_t>((1u << insn.imm) - 1u);
                s.set_x(insn.rd, static_cast<std::uint32_t>(std::clamp(v, 0, hi)));
                break;
            }

            case Op::PvAdd: s.set_x(insn.rd, simd_add(a, b, insn.simd.width)); break;
            case Op::PvPackLo:
                s.set_x(insn.rd, (s.x(insn.rd) & 0xFFFF0000u) | ((a & 0xFFu) << 8) | (b & 0xFFu));
                break;
            case Op::PvPackHi:
                s.set_x(insn.rd, (s.x(insn.rd) & 0x0000FFFFu) | ((a & 0xFFu) << 24) | ((b & 0xFFu) << 16));
                break;
            case Op::PvDot: s.set_x(insn.rd, sdotp(a, b, 0, insn.simd)); dotp = true; break;
            case Op::PvSdot: s.set_x(insn.rd, sdotp(a, b, s.x(insn.rd), insn.simd)); dotp = true; break;

            case Op::PvMlSdot: {
                // The dot product reads the NN-RF before the refresh lands.
                const std::uint32_t r = sdotp(s.nn[insn.nn_a], s.nn[insn.nn_b], s.x(insn.rd), insn.simd);
                std::optional<std::uint32_t> fresh;
                if (insn.refresh_a || insn.refresh_b) fresh = mem.load32(a);
                s.set_x(insn.rd, r);
                if (fresh) {
                    s.nn[insn.refresh_a ? insn.nn_a : insn.nn_b] = *fresh;
                    s.set_x(insn.rs1, a + 4);
                }
                dotp = true;
                break;
            }
            case Op::NnLw: {
                const std::uint32_t v = mem.load32(a);
                s.nn[insn.nn_a] = v;
                s.set_x(insn.rs1, a + imm);
                break;
            }

            case Op::Barrier: result = {Effect::Barrier, 0}; break;
            case Op::EvtWait: result = {Effect::WaitEvent, insn.imm}; break;
            case Op::RbeStart: result = {Effect::RbeStart, insn.imm}; break;
            case Op::DmaStart: result = {Effect::DmaStart, insn.imm}; break;
            case Op::Halt: result = {Effect::Halt, 0}; break;
            case Op::Nop: break;
            case Op::Count_: return raise("invalid opcode");
        }
    } catch (const DomainError& e) {
        return raise(e.what());
    }

    if (is_load(insn.op) || (insn.op == Op::PvMlSdot && (insn.refresh_a || insn.refresh_b))) trace_.loads += 1;
    if (is_store(insn.op)) trace_.stores += 1;

    std::uint64_t cycles = 1;
    if (taken) {
        next_pc = insn.target;
        cycles += 1;
        trace_.branch_penalty_cycles += 1;
    } else if (op_class(insn.op) != OpClass::HwLoop || next_pc != pc + 1) {
        // a skipped empty loop lands on its end, which may close an enclosing loop
        next_pc = advance(next_pc);
    }
    retire(insn, cycles, dotp, in_loop);

    s.pc = next_pc;
    if (insn.op == Op::Halt || s.pc >= static_cast<std::int32_t>(prog_->size())) {
        s.halted = true;
        if (result.effect == Effect::None) result.effect = Effect::Halt;
    }
    return result;
}

Trace run(const Program& prog, Memory& mem, std::uint64_t max_cycles, const CoreState& initial,
          CoreState* final_state) {
    Core core(prog);
    const std::int32_t entry = core.state().pc;
    const bool halted = core.state().halted;
    core.state() = initial;
    core.state().pc = entry;
    core.state().halted = halted;
    while (!core.done()) {
        if (core.trace().cycles >= max_cycles) {
            if (final_state) *final_state = core.state();
            throw TimeoutError("cycle budget of " + std::to_string(max_cycles) + " exceeded", core.trace());
        }
        core.step(mem);
    }
    if (final_state) *final_state = core.state();
    return core.trace();
}

Trace run(const Program& prog, Memory& mem, std::uint64_t max_cycles, CoreState* final_state) {
    return run(prog, mem, max_cycles, CoreState{}, final_state);
}

}  // namespace acs::isa
