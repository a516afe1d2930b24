// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "acs/isa/instruction.hpp"

namespace acs::isa {

/// Parses the textual assembly format. One instruction per line, `label:` prefixes,
/// `#` comments, `.entry label` to set the entry point. Registers accept both x0..x31
/// and ABI names; NN-RF registers are n0..n5. Throws DecodeError with the line number.
Program assemble(std::string_view text);

/// Renders a program in a form that assemble() maps back to the same instructions.
std::string disassemble(const Program& prog);
std::string disassemble(const Instruction& insn, const Program* prog = nullptr);

/// Parses a register name (x5, t0, a0, zero, ...).
int parse_gpr(std::string_view name);

}  // namespace acs::isa
