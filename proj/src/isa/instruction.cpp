// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/isa/instruction.hpp"

#include <algorithm>
#include <array>
#include <string>

namespace acs::isa {

namespace {

struct OpInfo {
    std::string_view name;
    OpClass cls;
};

constexpr std::array<OpInfo, static_cast<std::size_t>(Op::Count_)> kOps = {{
    {"add", OpClass::Alu},        {"sub", OpClass::Alu},         {"and", OpClass::Alu},
    {"or", OpClass::Alu},         {"xor", OpClass::Alu},         {"sll", OpClass::Alu},
    {"srl", OpClass::Alu},        {"sra", OpClass::Alu},         {"slt", OpClass::Alu},
    {"sltu", OpClass::Alu},       {"mul", OpClass::Mul},         {"addi", OpClass::Alu},
    {"andi", OpClass::Alu},       {"ori", OpClass::Alu},         {"xori", OpClass::Alu},
    {"slli", OpClass::Alu},       {"srli", OpClass::Alu},        {"srai", OpClass::Alu},
    {"slti", OpClass::Alu},       {"li", OpClass::Alu},          {"lw", OpClass::Load},
    {"lh", OpClass::Load},        {"lhu", OpClass::Load},        {"lb", OpClass::Load},
    {"lbu", OpClass::Load},       {"sw", OpClass::Store},        {"sh", OpClass::Store},
    {"sb", OpClass::Store},       {"beq", OpClass::Branch},      {"bne", OpClass::Branch},
    {"blt", OpClass::Branch},     {"bge", OpClass::Branch},      {"bltu", OpClass::Branch},
    {"bgeu", OpClass::Branch},    {"jal", OpClass::Jump},        {"p.lw", OpClass::Load},
    {"p.lbu", OpClass::Load},     {"p.lb", OpClass::Load},       {"p.sw", OpClass::Store},
    {"p.sb", OpClass::Store},     {"lp.setup", OpClass::HwLoop}, {"lp.setupi", OpClass::HwLoop},
    {"p.extract", OpClass::BitManip}, {"p.extractu", OpClass::BitManip}, {"p.clipu", OpClass::BitManip},
    {"pv.add", OpClass::SimdAlu}, {"pv.packlo", OpClass::SimdAlu}, {"pv.packhi", OpClass::SimdAlu},
    {"pv.dot", OpClass::Dotp},    {"pv.sdot", OpClass::Dotp},    {"pv.mlsdot", OpClass::MacLoad},
    {"nn.lw", OpClass::NnLoad},   {"barrier", OpClass::System},  {"evt.wait", OpClass::System},
    {"rbe.start", OpClass::System}, {"dma.start", OpClass::System}, {"halt", OpClass::System},
    {"nop", OpClass::Alu},
}};

constexpr std::array<std::string_view, static_cast<std::size_t>(OpClass::Count_)> kClassNames = {
    "alu", "mul", "load", "store", "branch", "jump", "hwloop", "bitmanip", "simd_alu", "dotp", "macload",
    "nn_load", "system"};

}  // namespace

OpClass op_class(Op op) { return kOps.at(static_cast<std::size_t>(op)).cls; }
std::string_view op_class_name(OpClass c) { return kClassNames.at(static_cast<std::size_t>(c)); }
std::string_view mnemonic(Op op) { return kOps.at(static_cast<std::size_t>(op)).name; }

bool is_load(Op op) {
    switch (op) {
        case Op::Lw: case Op::Lh: case Op::Lhu: case Op::Lb: case Op::Lbu:
        case Op::PLw: case Op::PLbu: case Op::PLb: case Op::NnLw:
            return true;
        default:
            return false;
    }
}

bool is_store(Op op) {
    switch (op) {
        case Op::Sw: case Op::Sh: case Op::Sb: case Op::PSw: case Op::PSb:
            return true;
        default:
            return false;
    }
}

bool is_dotp(Op op) { return op == Op::PvDot || op == Op::PvSdot || op == Op::PvMlSdot; }

int access_size(Op op) {
    switch (op) {
        case Op::Lw: case Op::Sw: case Op::PLw: case Op::PSw: case Op::NnLw: case Op::PvMlSdot:
            return 4;
        case Op::Lh: case Op::Lhu: case Op::Sh:
            return 2;
        case Op::Lb: case Op::Lbu: case Op::Sb: case Op::PLbu: case Op::PLb: case Op::PSb:
            return 1;
        default:
            return 0;
    }
}

void validate(const Instruction& insn) {
    if (insn.rd >= kNumGpr || insn.rs1 >= kNumGpr || insn.rs2 >= kNumGpr)
        throw DecodeError("register index out of range in " + std::string(mnemonic(insn.op)));
    switch (insn.op) {
        case Op::PvMlSdot:
            if (insn.refresh_a && insn.refresh_b)
                throw DecodeError("pv.mlsdot may refresh only one NN-RF register");
            if ((insn.refresh_a || insn.refresh_b) && insn.rd == insn.rs1 && insn.rd != 0)
                throw DecodeError("pv.mlsdot cannot use its destination as the load pointer");
            [[fallthrough]];
        case Op::NnLw:
            if (insn.nn_a >= kNumNnRegs || insn.nn_b >= kNumNnRegs)
                throw DecodeError("NN-RF selector " + std::to_string(std::max(insn.nn_a, insn.nn_b)) + " > 5");
            break;
        case Op::PLw: case Op::PLbu: case Op::PLb:
            if (insn.rd == insn.rs1 && insn.rd != 0)
                throw DecodeError("post-increment load cannot write its own pointer");
            break;
        case Op::PvDot: case Op::PvSdot: case Op::PvAdd:
            if (insn.simd.width != 2 && insn.simd.width != 4 && insn.simd.width != 8 && insn.simd.width != 16)
                throw DecodeError("unsupported SIMD width " + std::to_string(insn.simd.width));
            break;
        case Op::PvPackLo: case Op::PvPackHi:
            if (insn.simd.width != 8) throw DecodeError("pv.pack supports byte lanes only");
            break;
        case Op::PExtract: case Op::PExtractu:
            if (insn.imm < 1 || insn.imm2 < 0 || insn.imm + insn.imm2 > 32)
                throw DecodeError("bit-field outside the 32-bit register");
            break;
        case Op::PClipu:
            if (insn.imm < 1 || insn.imm > 31) throw DecodeError("p.clipu width must lie in [1, 31]");
            break;
        case Op::LpSetup: case Op::LpSetupi:
            if (insn.imm2 < 0 || insn.imm2 >= kNumHwLoops) throw DecodeError("hardware loop index must be 0 or 1");
            break;
        default:
            break;
    }
}

void validate(const Program& prog) {
    const auto n = static_cast<std::int32_t>(prog.size());
    for (std::int32_t pc = 0; pc < n; ++pc) {
        const auto& insn = prog.code[pc];
        validate(insn);
        const auto cls = op_class(insn.op);
        if (cls == OpClass::Branch || cls == OpClass::Jump || cls == OpClass::HwLoop) {
            if (insn.target < 0 || insn.target > n)
                throw DecodeError("unresolved target at pc " + std::to_string(pc));
        }
        if (cls == OpClass::HwLoop && insn.target <= pc + 1)
            throw DecodeError("hardware loop at pc " + std::to_string(pc) + " has an empty body");
    }
    if (prog.entry < 0 || (prog.entry >= n && n > 0)) throw DecodeError("entry point outside program");

    // loop bodies [pc+1, target) must be disjoint or nested, at most two deep, and
    // nested bodies must use different loop indices
    struct Body {
        std::int32_t begin, end, index;
    };
    std::vector<Body> bodies;
    for (std::int32_t pc = 0; pc < n; ++pc)
        if (op_class(prog.code[pc].op) == OpClass::HwLoop)
            bodies.push_back({pc + 1, prog.code[pc].target, prog.code[pc].imm2});
    for (std::size_t i = 0; i < bodies.size(); ++i) {
        int depth = 1;
        for (std::size_t j = 0; j < bodies.size(); ++j) {
            if (i == j) continue;
            const auto& a = bodies[i];
            const auto& b = bodies[j];
            const bool disjoint = a.end <= b.begin || b.end <= a.begin;
            const bool b_contains_a = b.begin <= a.begin && a.end <= b.end && !(a.begin == b.begin && a.end == b.end);
            const bool a_contains_b = a.begin <= b.begin && b.end <= a.end;
            if (!disjoint && !b_contains_a && !a_contains_b)
                throw DecodeError("hardware loop bodies overlap without nesting");
            if (b_contains_a) {
                ++depth;
                if (a.index == b.index) throw DecodeError("nested hardware loops must use different indices");
            }
        }
        if (depth > kNumHwLoops) throw DecodeError("hardware loops nested deeper than two");
    }
}

}  // namespace acs::isa
