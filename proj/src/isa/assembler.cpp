// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/isa/assembler.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <climits>
#include <map>
#include <sstream>

namespace acs::isa {

namespace {

constexpr std::array<std::string_view, 32> kAbi = {
    "zero", "ra", "sp", "gp", "tp", "t0", "t1", "t2", "s0", "s1", "a0",  "a1",  "a2", "a3", "a4", "a5",
    "a6",   "a7", "s2", "s3", "s4", "s5", "s6", "s7", "s8", "s9", "s10", "s11", "t3", "t4", "t5", "t6"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_operands(std::string_view s) {
    std::vector<std::string_view> out;
    s = trim(s);
    if (s.empty()) return out;
    std::size_t pos;
    while ((pos = s.find(',')) != std::string_view::npos) {
        out.push_back(trim(s.substr(0, pos)));
        s.remove_prefix(pos + 1);
    }
    out.push_back(trim(s));
    return out;
}

std::vector<std::string_view> split_dots(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t pos;
    while ((pos = s.find('.')) != std::string_view::npos) {
        out.push_back(s.substr(0, pos));
        s.remove_prefix(pos + 1);
    }
    out.push_back(s);
    return out;
}

std::int32_t parse_int(std::string_view s) {
    s = trim(s);
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        base = 16;
        s.remove_prefix(2);
    }
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw DecodeError("bad immediate '" + std::string(s) + "'");
    v = neg ? -v : v;
    if (v < INT32_MIN || v > static_cast<std::int64_t>(UINT32_MAX)) throw DecodeError("immediate out of range");
    return static_cast<std::int32_t>(static_cast<std::uint32_t>(v));
}

int parse_nn(std::string_view s) {
    s = trim(s);
    if (s.size() != 2 || s[0] != 'n' || s[1] < '0' || s[1] > '9')
        throw DecodeError("bad NN-RF register '" + std::string(s) + "'");
    return s[1] - '0';
}

int width_from_suffix(std::string_view s) {
    if (s == "h") return 16;
    if (s == "b") return 8;
    if (s == "n") return 4;
    if (s == "c") return 2;
    throw DecodeError("bad SIMD width suffix '" + std::string(s) + "'");
}

char suffix_from_width(int w) {
    switch (w) {
        case 16: return 'h';
        case 8: return 'b';
        case 4: return 'n';
        default: return 'c';
    }
}

Signedness sign_from_suffix(std::string_view s) {
    if (s == "ss") return Signedness::SS;
    if (s == "uu") return Signedness::UU;
    if (s == "us") return Signedness::US;
    if (s == "su") return Signedness::SU;
    throw DecodeError("bad signedness suffix '" + std::string(s) + "'");
}

std::string_view sign_suffix(Signedness s) {
    switch (s) {
        case Signedness::SS: return "ss";
        case Signedness::UU: return "uu";
        case Signedness::US: return "us";
        default: return "su";
    }
}

/// "imm(reg)" or "imm(reg!)"; returns {imm, reg, post_increment}.
struct MemOperand {
    std::int32_t imm;
    int reg;
    bool post;
};

MemOperand parse_mem(std::string_view s) {
    const auto open = s.find('(');
    const auto close = s.find(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open)
        throw DecodeError("bad memory operand '" + std::string(s) + "'");
    MemOperand m{};
    const auto head = trim(s.substr(0, open));
    m.imm = head.empty() ? 0 : parse_int(head);
    auto reg = trim(s.substr(open + 1, close - open - 1));
    if (!reg.empty() && reg.back() == '!') {
        m.post = true;
        reg.remove_suffix(1);
    }
    m.reg = parse_gpr(reg);
    return m;
}

const std::map<std::string, Op, std::less<>>& plain_ops() {
    static const std::map<std::string, Op, std::less<>> m = [] {
        std::map<std::string, Op, std::less<>> t;
        for (int i = 0; i < static_cast<int>(Op::Count_); ++i) {
            const auto op = static_cast<Op>(i);
            t.emplace(std::string(mnemonic(op)), op);
        }
        return t;
    }();
    return m;
}

void expect(const std::vector<std::string_view>& ops, std::size_t n, std::string_view mn) {
    if (ops.size() != n)
        throw DecodeError(std::string(mn) + " expects " + std::to_string(n) + " operands, got " +
                          std::to_string(ops.size()));
}

struct Pending {
    std::size_t index;
    std::string label;
    int line;
};

}  // namespace

int parse_gpr(std::string_view name) {
    name = trim(name);
    if (name.size() >= 2 && name[0] == 'x') {
        int v = 0;
        auto [p, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), v);
        if (ec == std::errc() && p == name.data() + name.size() && v >= 0 && v < kNumGpr) return v;
    }
    if (name == "fp") return 8;
    for (int i = 0; i < kNumGpr; ++i)
        if (kAbi[i] == name) return i;
    throw DecodeError("unknown register '" + std::string(name) + "'");
}

Program assemble(std::string_view text) {
    Program prog;
    std::vector<Pending> fixups;
    std::map<std::string, std::int32_t, std::less<>> labels;
    std::string entry_label;
    int line_no = 0;

    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        line = trim(line);
        try {
            // labels
            while (true) {
                const auto colon = line.find(':');
                if (colon == std::string_view::npos) break;
                const auto name = trim(line.substr(0, colon));
                if (name.empty() || name.find_first_of(" \t,(") != std::string_view::npos) break;
                if (!labels.emplace(std::string(name), static_cast<std::int32_t>(prog.size())).second)
                    throw DecodeError("duplicate label '" + std::string(name) + "'");
                prog.labels.emplace_back(std::string(name), static_cast<std::int32_t>(prog.size()));
                line = trim(line.substr(colon + 1));
            }
            if (line.empty()) continue;

            const auto sp = line.find_first_of(" \t");
            const std::string_view mn = line.substr(0, sp);
            const auto ops = split_operands(sp == std::string_view::npos ? std::string_view{} : line.substr(sp));

            if (mn == ".entry") {
                expect(ops, 1, mn);
                entry_label = std::string(ops[0]);
                continue;
            }

            Instruction insn;
            auto target = [&](std::string_view label) {
                fixups.push_back({prog.size(), std::string(label), line_no});
            };
            const auto parts = split_dots(mn);

            if (mn == "mv") {
                expect(ops, 2, mn);
                insn.op = Op::Addi;
                insn.rd = parse_gpr(ops[0]);
                insn.rs1 = parse_gpr(ops[1]);
            } else if (mn == "j") {
                expect(ops, 1, mn);
                insn.op = Op::Jal;
                target(ops[0]);
            } else if (parts.size() >= 3 && parts[0] == "pv" && (parts[1] == "sdot" || parts[1] == "dot")) {
                // pv.sdot.<sign>.<width>[.sc] rd, rs1, rs2
                insn.op = parts[1] == "sdot" ? Op::PvSdot : Op::PvDot;
                if (parts.size() < 4 || parts.size() > 5) throw DecodeError("bad mnemonic '" + std::string(mn) + "'");
                insn.simd.sign = sign_from_suffix(parts[2]);
                insn.simd.width = width_from_suffix(parts[3]);
                if (parts.size() == 5) {
                    if (parts[4] != "sc") throw DecodeError("bad mnemonic '" + std::string(mn) + "'");
                    insn.simd.scalar = true;
                }
                expect(ops, 3, mn);
                insn.rd = parse_gpr(ops[0]);
                insn.rs1 = parse_gpr(ops[1]);
                insn.rs2 = parse_gpr(ops[2]);
            } else if (parts.size() == 4 && parts[0] == "pv" && parts[1] == "mlsdot") {
                // pv.mlsdot.<sign>.<width> rd, nA, nB, {-|a|b}, rs1
                insn.op = Op::PvMlSdot;
                insn.simd.sign = sign_from_suffix(parts[2]);
                insn.simd.width = width_from_suffix(parts[3]);
                expect(ops, 5, mn);
                insn.rd = parse_gpr(ops[0]);
                insn.nn_a = parse_nn(ops[1]);
                insn.nn_b = parse_nn(ops[2]);
                if (ops[3] == "a") insn.refresh_a = true;
                else if (ops[3] == "b") insn.refresh_b = true;
                else if (ops[3] != "-") throw DecodeError("refresh selector must be -, a or b");
                insn.rs1 = parse_gpr(ops[4]);
            } else if (parts.size() == 3 && parts[0] == "pv" &&
                       (parts[1] == "add" || parts[1] == "packlo" || parts[1] == "packhi")) {
                insn.op = parts[1] == "add" ? Op::PvAdd : parts[1] == "packlo" ? Op::PvPackLo : Op::PvPackHi;
                insn.simd.width = width_from_suffix(parts[2]);
                expect(ops, 3, mn);
                insn.rd = parse_gpr(ops[0]);
                insn.rs1 = parse_gpr(ops[1]);
                insn.rs2 = parse_gpr(ops[2]);
            } else {
                const auto it = plain_ops().find(mn);
                if (it == plain_ops().end() || op_class(it->second) == OpClass::Dotp ||
                    op_class(it->second) == OpClass::MacLoad || op_class(it->second) == OpClass::SimdAlu)
                    throw DecodeError("unknown mnemonic '" + std::string(mn) + "'");
                insn.op = it->second;
                const auto cls = op_class(insn.op);
                switch (insn.op) {
                    case Op::Add: case Op::Sub: case Op::And: case Op::Or: case Op::Xor: case Op::Sll:
                    case Op::Srl: case Op::Sra: case Op::Slt: case Op::Sltu: case Op::Mul:
                        expect(ops, 3, mn);
                        insn.rd = parse_gpr(ops[0]);
                        insn.rs1 = parse_gpr(ops[1]);
                        insn.rs2 = parse_gpr(ops[2]);
                        break;
                    case Op::Li:
                        expect(ops, 2, mn);
                        insn.rd = parse_gpr(ops[0]);
                        insn.imm = parse_int(ops[1]);
                        break;
                    case Op::PClipu:
                        expect(ops, 3, mn);
                        insn.rd = parse_gpr(ops[0]);
                        insn.rs1 = parse_gpr(ops[1]);
                        insn.imm = parse_int(ops[2]);
                        break;
                    case Op::PExtract: case Op::PExtractu:
                        expect(ops, 4, mn);
                        insn.rd = parse_gpr(ops[0]);
                        insn.rs1 = parse_gpr(ops[1]);
                        insn.imm = parse_int(ops[2]);
                        insn.imm2 = parse_int(ops[3]);
                        break;
                    case Op::Jal:
                        expect(ops, 2, mn);
                        insn.rd = parse_gpr(ops[0]);
                        target(ops[1]);
                        break;
                    case Op::LpSetup: case Op::LpSetupi:
                        expect(ops, 3, mn);
                        insn.imm2 = parse_int(ops[0]);
                        if (insn.op == Op::LpSetup) insn.rs1 = parse_gpr(ops[1]);
                        else insn.imm = parse_int(ops[1]);
                        target(ops[2]);
                        break;
                    case Op::NnLw: {
                        expect(ops, 2, mn);
                        insn.nn_a = parse_nn(ops[0]);
                        const auto m = parse_mem(ops[1]);
                        if (!m.post) throw DecodeError("nn.lw requires a post-increment operand");
                        insn.rs1 = m.reg;
                        insn.imm = m.imm;
                        break;
                    }
                    case Op::EvtWait:
                        expect(ops, 1, mn);
                        if (ops[0] == "dma") insn.imm = static_cast<int>(EventId::DmaDone);
                        else if (ops[0] == "rbe") insn.imm = static_cast<int>(EventId::RbeDone);
                        else throw DecodeError("evt.wait expects dma or rbe");
                        break;
                    case Op::RbeStart: case Op::DmaStart:
                        expect(ops, 1, mn);
                        insn.imm = parse_int(ops[0]);
                        break;
                    case Op::Barrier: case Op::Halt: case Op::Nop:
                        expect(ops, 0, mn);
                        break;
                    default:
                        if (cls == OpClass::Alu) {  // I-type
                            expect(ops, 3, mn);
                            insn.rd = parse_gpr(ops[0]);
                            insn.rs1 = parse_gpr(ops[1]);
                            insn.imm = parse_int(ops[2]);
                        } else if (cls == OpClass::Load || cls == OpClass::Store) {
                            expect(ops, 2, mn);
                            const auto m = parse_mem(ops[1]);
                            const bool post_form = mn.substr(0, 2) == "p.";
                            if (m.post != post_form)
                                throw DecodeError(post_form ? "post-increment form needs (reg!)"
                                                            : "(reg!) requires a p. mnemonic");
                            if (cls == OpClass::Load) insn.rd = parse_gpr(ops[0]);
                            else insn.rs2 = parse_gpr(ops[0]);
                            insn.rs1 = m.reg;
                            insn.imm = m.imm;
                        } else if (cls == OpClass::Branch) {
                            expect(ops, 3, mn);
                            insn.rs1 = parse_gpr(ops[0]);
                            insn.rs2 = parse_gpr(ops[1]);
                            target(ops[2]);
                        } else {
                            throw DecodeError("unknown mnemonic '" + std::string(mn) + "'");
                        }
                }
            }
            validate(insn);
            prog.code.push_back(insn);
        } catch (const DecodeError& e) {
            throw DecodeError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }

    for (const auto& f : fixups) {
        const auto it = labels.find(f.label);
        if (it == labels.end())
            throw DecodeError("line " + std::to_string(f.line) + ": undefined label '" + f.label + "'");
        prog.code[f.index].target = it->second;
    }
    if (!entry_label.empty()) {
        const auto it = labels.find(entry_label);
        if (it == labels.end()) throw DecodeError("undefined entry label '" + entry_label + "'");
        prog.entry = it->second;
    }
    validate(prog);
    return prog;
}

namespace {

std::string reg(int r) { return "x" + std::to_string(r); }

std::string target_name(std::int32_t t, const Program* prog) {
    if (prog)
        for (const auto& [name, idx] : prog->labels)
            if (idx == t) return name;
    return ".L" + std::to_string(t);
}

}  // namespace

std::string disassemble(const Instruction& insn, const Program* prog) {
    std::ostringstream os;
    const auto cls = op_class(insn.op);
    const std::string mn(mnemonic(insn.op));
    const std::string w(1, suffix_from_width(insn.simd.width));
    switch (insn.op) {
        case Op::PvDot: case Op::PvSdot:
            os << mn << '.' << sign_suffix(insn.simd.sign) << '.' << w << (insn.simd.scalar ? ".sc" : "") << ' '
               << reg(insn.rd) << ", " << reg(insn.rs1) << ", " << reg(insn.rs2);
            break;
        case Op::PvMlSdot:
            os << mn << '.' << sign_suffix(insn.simd.sign) << '.' << w << ' ' << reg(insn.rd) << ", n"
               << int(insn.nn_a) << ", n" << int(insn.nn_b) << ", "
               << (insn.refresh_a ? "a" : insn.refresh_b ? "b" : "-") << ", " << reg(insn.rs1);
            break;
        case Op::PvAdd: case Op::PvPackLo: case Op::PvPackHi:
            os << mn << '.' << w << ' ' << reg(insn.rd) << ", " << reg(insn.rs1) << ", " << reg(insn.rs2);
            break;
        case Op::Li:
            os << mn << ' ' << reg(insn.rd) << ", " << insn.imm;
            break;
        case Op::PClipu:
            os << mn << ' ' << reg(insn.rd) << ", " << reg(insn.rs1) << ", " << insn.imm;
            break;
        case Op::PExtract: case Op::PExtractu:
            os << mn << ' ' << reg(insn.rd) << ", " << reg(insn.rs1) << ", " << insn.imm << ", " << insn.imm2;
            break;
        case Op::Jal:
            os << mn << ' ' << reg(insn.rd) << ", " << target_name(insn.target, prog);
            break;
        case Op::LpSetup:
            os << mn << ' ' << insn.imm2 << ", " << reg(insn.rs1) << ", " << target_name(insn.target, prog);
            break;
        case Op::LpSetupi:
            os << mn << ' ' << insn.imm2 << ", " << insn.imm << ", " << target_name(insn.target, prog);
            break;
        case Op::NnLw:
            os << mn << " n" << int(insn.nn_a) << ", " << insn.imm << '(' << reg(insn.rs1) << "!)";
            break;
        case Op::EvtWait:
            os << mn << ' ' << (insn.imm == static_cast<int>(EventId::DmaDone) ? "dma" : "rbe");
            break;
        case Op::RbeStart: case Op::DmaStart:
            os << mn << ' ' << insn.imm;
            break;
        case Op::Barrier: case Op::Halt: case Op::Nop:
            os << mn;
            break;
        default:
            if (cls == OpClass::Alu && insn.op >= Op::Addi) {
                os << mn << ' ' << reg(insn.rd) << ", " << reg(insn.rs1) << ", " << insn.imm;
            } else if (cls == OpClass::Alu || cls == OpClass::Mul) {
                os << mn << ' ' << reg(insn.rd) << ", " << reg(insn.rs1) << ", " << reg(insn.rs2);
            } else if (cls == OpClass::Load || cls == OpClass::Store) {
                const bool post = mn.rfind("p.", 0) == 0;
                os << mn << ' ' << reg(cls == OpClass::Load ? insn.rd : insn.rs2) << ", " << insn.imm << '('
                   << reg(insn.rs1) << (post ? "!)" : ")");
            } else if (cls == OpClass::Branch) {
                os << mn << ' ' << reg(insn.rs1) << ", " << reg(insn.rs2) << ", " << target_name(insn.target, prog);
            }
    }
    return os.str();
}

std::string disassemble(const Program& prog) {
    std::ostringstream os;
    const auto n = static_cast<std::int32_t>(prog.size());
    std::vector<bool> need(n + 1, false);
    for (const auto& insn : prog.code) {
        const auto cls = op_class(insn.op);
        if (cls == OpClass::Branch || cls == OpClass::Jump || cls == OpClass::HwLoop) need[insn.target] = true;
    }
    if (n > 0) need[prog.entry] = true;
    auto emit_labels = [&](std::int32_t idx) {
        bool named = false;
        for (const auto& [name, at] : prog.labels)
            if (at == idx) {
                os << name << ":\n";
                named = true;
            }
        if (need[idx] && !named) os << ".L" << idx << ":\n";
    };
    if (prog.entry != 0) os << ".entry " << target_name(prog.entry, &prog) << '\n';
    for (std::int32_t i = 0; i < n; ++i) {
        emit_labels(i);
        os << "    " << disassemble(prog.code[i], &prog) << '\n';
    }
    emit_labels(n);
    return os.str();
}

}  // namespace acs::isa
