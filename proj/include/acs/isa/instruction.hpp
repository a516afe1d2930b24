// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "acs/common/error.hpp"

namespace acs::isa {

inline constexpr int kNumGpr = 32;
inline constexpr int kNumNnRegs = 6;
inline constexpr int kNumHwLoops = 2;

/// Raised for encodings the core cannot execute (bad NN-RF selector, both refresh bits set).
class DecodeError : public Error {
public:
    using Error::Error;
};

enum class Op : std::uint8_t {
    // RV32IM subset
    Add, Sub, And, Or, Xor, Sll, Srl, Sra, Slt, Sltu, Mul,
    Addi, Andi, Ori, Xori, Slli, Srli, Srai, Slti, Li,
    Lw, Lh, Lhu, Lb, Lbu, Sw, Sh, Sb,
    Beq, Bne, Blt, Bge, Bltu, Bgeu, Jal,
    // Xpulp: post-increment memory, hardware loops, bit manipulation, packed SIMD
    PLw, PLbu, PLb, PSw, PSb,
    LpSetup, LpSetupi,
    PExtract, PExtractu, PClipu,
    PvAdd, PvPackLo, PvPackHi,
    PvDot, PvSdot,
    // XpulpNN
    PvMlSdot, NnLw,
    // cluster system operations
    Barrier, EvtWait, RbeStart, DmaStart, Halt, Nop,
    Count_
};

/// Coarse classes used for the retired-instruction histogram.
enum class OpClass : std::uint8_t {
    Alu, Mul, Load, Store, Branch, Jump, HwLoop, BitManip, SimdAlu, Dotp, MacLoad, NnLoad, System, Count_
};

enum class Signedness : std::uint8_t { SS, UU, US, SU };

struct SimdFormat {
    int width = 8;  ///< lane width in bits: 16, 8, 4 or 2
    Signedness sign = Signedness::UU;
    bool scalar = false;  ///< "vs" form: lane 0 of the second operand is replicated

    int lanes() const { return 32 / width; }
    friend bool operator==(const SimdFormat&, const SimdFormat&) = default;
};

/// Event channels of the cluster event unit.
enum class EventId : std::uint8_t { DmaDone = 0, RbeDone = 1 };

/// One decoded instruction. Operand use per class:
///   R-type:       rd, rs1, rs2
///   I-type/Li:    rd, rs1, imm
///   loads:        rd, imm(rs1)      post-increment forms add imm to rs1 afterwards
///   stores:       rs2, imm(rs1)
///   branches:     rs1, rs2, target
///   lp.setup(i):  imm2 = loop index, rs1 = count register / imm = count, target = loop end (exclusive)
///   p.extract(u): rd, rs1, imm = length, imm2 = offset
///   p.clipu:      rd, rs1, imm = output bits
///   pv.*:         rd, rs1, rs2 with `simd`
///   pv.mlsdot:    rd += dot(nn[nn_a], nn[nn_b]); if a refresh bit is set the selected
///                 NN-RF register is reloaded from [rs1] and rs1 += 4
///   nn.lw:        nn[nn_a] = [rs1], then rs1 += imm
///   evt.wait:     imm = EventId; rbe.start / dma.start: imm = job index
struct Instruction {
    Op op = Op::Nop;
    std::uint8_t rd = 0;
    std::uint8_t rs1 = 0;
    std::uint8_t rs2 = 0;
    std::int32_t imm = 0;
    std::int32_t imm2 = 0;
    SimdFormat simd{};
    std::uint8_t nn_a = 0;
    std::uint8_t nn_b = 0;
    bool refresh_a = false;
    bool refresh_b = false;
    std::int32_t target = -1;  ///< resolved instruction index for branches and loop ends

    friend bool operator==(const Instruction&, const Instruction&) = default;
};

/// A program is a flat list of instructions; pc is an index into it.
struct Program {
    std::vector<Instruction> code;
    std::vector<std::pair<std::string, std::int32_t>> labels;
    std::int32_t entry = 0;

    std::size_t size() const { return code.size(); }
    bool empty() const { return code.empty(); }
};

OpClass op_class(Op op);
std::string_view op_class_name(OpClass c);
std::string_view mnemonic(Op op);

bool is_load(Op op);
bool is_store(Op op);
bool is_dotp(Op op);
/// Number of bytes moved by a memory instruction (0 for others).
int access_size(Op op);

/// Checks structural constraints (register indices, NN-RF selectors, refresh bits).
void validate(const Instruction& insn);
/// Whole-program checks: every instruction valid, targets resolve, loops nest.
void validate(const Program& prog);

}  // namespace acs::isa
