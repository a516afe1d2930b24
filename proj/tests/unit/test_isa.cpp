// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "acs/isa/assembler.hpp"
#include "acs/isa/core.hpp"
#include "acs/isa/simd.hpp"

using namespace acs;
using namespace acs::isa;

namespace {

// Independent lane oracle: shifts and masks on 64-bit integers.
std::uint32_t lane_oracle(std::uint32_t a, std::uint32_t b, std::uint32_t acc, int width, Signedness sign,
                          bool scalar) {
    const bool as = sign == Signedness::SS || sign == Signedness::SU;
    const bool bs = sign == Signedness::SS || sign == Signedness::US;
    auto lane = [&](std::uint32_t v, int k, bool sgn) -> std::int64_t {
        std::int64_t x = (v >> (k * width)) & ((1ull << width) - 1);
        if (sgn && x >= (1ll << (width - 1))) x -= (1ll << width);
        return x;
    };
    std::int64_t sum = acc;
    for (int k = 0; k < 32 / width; ++k) sum += lane(a, k, as) * lane(b, scalar ? 0 : k, bs);
    return static_cast<std::uint32_t>(sum & 0xFFFFFFFFll);
}

FlatMemory make_mem() { return FlatMemory(0x1000, 4096); }

}  // namespace

TEST_CASE("sdotp examples") {
    SimdFormat f8{8, Signedness::UU, false};
    CHECK(sdotp(0x04030201u, 0x01010101u, 10, f8) == 20);
    SimdFormat f2{2, Signedness::UU, false};
    CHECK(sdotp(0xFFFFFFFFu, 0xFFFFFFFFu, 0, f2) == 144);
    SimdFormat s8{8, Signedness::SS, false};
    CHECK(sdotp(0x000000FFu, 0x000000FFu, 0, s8) == 1);  // (-1)*(-1)
    SimdFormat sc{8, Signedness::UU, true};
    CHECK(sdotp(0x04030201u, 0x00000002u, 0, sc) == 20);
}

TEST_CASE("sdotp grid against the lane oracle") {
    std::mt19937_64 rng(11);
    const int widths[] = {2, 4, 8, 16};
    const Signedness signs[] = {Signedness::SS, Signedness::UU, Signedness::US, Signedness::SU};
    int n = 0;
    for (int w : widths)
        for (auto sg : signs)
            for (bool sc : {false, true})
                for (int i = 0; i < 100000 / 32 + 1; ++i, ++n) {
                    const auto a = static_cast<std::uint32_t>(rng());
                    const auto b = static_cast<std::uint32_t>(rng());
                    const auto acc = static_cast<std::uint32_t>(rng());
                    REQUIRE(sdotp(a, b, acc, SimdFormat{w, sg, sc}) == lane_oracle(a, b, acc, w, sg, sc));
                }
    CHECK(n >= 100000);
}

TEST_CASE("simd add wraps per lane") {
    CHECK(simd_add(0xFF01u, 0x0101u, 8) == 0x0002u);
    CHECK(simd_add(0xFu, 0x1u, 4) == 0x0u);
    CHECK(simd_add(0x3u, 0x1u, 2) == 0x0u);
}

TEST_CASE("empty program takes zero cycles") {
    auto mem = make_mem();
    const auto t = run(Program{}, mem, 100);
    CHECK(t.cycles == 0);
    CHECK(t.retired == 0);
}

TEST_CASE("x0 stays zero") {
    auto mem = make_mem();
    CoreState fin;
    run(assemble("li x0, 5\naddi zero, zero, 7\nli t0, 3\nadd x0, t0, t0\n"), mem, 100, &fin);
    CHECK(fin.x(0) == 0);
    CHECK(fin.gpr[0] == 0);
    CHECK(fin.x(5) == 3);
}

TEST_CASE("basic arithmetic, memory and branches") {
    auto mem = make_mem();
    mem.store32(0x1000, 0xFFFFFF80u);
    CoreState fin;
    const auto prog = assemble(R"(
        li a0, 0x1000
        lw t0, 0(a0)
        lb t1, 0(a0)
        lbu t2, 0(a0)
        li a1, 10
        li a2, 0
    loop:
        addi a2, a2, 3
        addi a1, a1, -1
        bne a1, zero, loop
        sw a2, 4(a0)
        p.lw t3, 4(a0!)
        mul a3, a2, a2
        srai a4, t0, 4
        p.extract a5, t0, 4, 4
        p.extractu a6, t0, 4, 4
        p.clipu a7, a2, 4
    )");
    const auto t = run(prog, mem, 1000, &fin);
    CHECK(fin.x(5) == 0xFFFFFF80u);
    CHECK(fin.x(6) == 0xFFFFFF80u);
    CHECK(fin.x(7) == 0x80u);
    CHECK(fin.x(12) == 30);
    CHECK(mem.load32(0x1004) == 30);
    CHECK(fin.x(28) == 0xFFFFFF80u);  // loads at the old pointer
    CHECK(fin.x(10) == 0x1004);
    CHECK(fin.x(13) == 900);
    CHECK(static_cast<std::int32_t>(fin.x(14)) == -8);
    CHECK(static_cast<std::int32_t>(fin.x(15)) == -8);
    CHECK(fin.x(16) == 8);
    CHECK(fin.x(17) == 15);
    // 9 taken branches pay one extra cycle each
    CHECK(t.branch_penalty_cycles == 9);
    CHECK(t.cycles == t.retired + 9);
}

TEST_CASE("pack instructions follow byte placement") {
    auto mem = make_mem();
    CoreState fin;
    run(assemble("li t0, 0x11\nli t1, 0x22\nli t2, 0x33\nli t3, 0x44\n"
                 "pv.packlo.b a0, t1, t0\npv.packhi.b a0, t3, t2\n"),
        mem, 100, &fin);
    CHECK(fin.x(10) == 0x44332211u);
}

TEST_CASE("hardware loop retired count is closed form") {
    for (std::uint32_t n_body : {1u, 3u, 7u})
        for (std::uint32_t m : {0u, 1u, 5u, 40u}) {
            std::string src = "li t0, 0\nlp.setupi 0, " + std::to_string(m) + ", end\n";
            for (std::uint32_t i = 0; i < n_body; ++i) src += "addi t0, t0, 1\n";
            src += "end:\n";
            auto mem = make_mem();
            CoreState fin;
            const auto t = run(assemble(src), mem, 100000, &fin);
            CHECK(t.retired == 2 + n_body * m);
            CHECK(t.count(OpClass::Branch) == 0);
            CHECK(t.cycles == t.retired);
            CHECK(fin.x(5) == n_body * m);
        }
}

TEST_CASE("nested hardware loops, including a shared end") {
    auto mem = make_mem();
    CoreState fin;
    const auto prog = assemble(R"(
        li t0, 0
        li t1, 0
        lp.setupi 1, 4, outer_end
        addi t1, t1, 1
        lp.setupi 0, 3, outer_end
        addi t0, t0, 1
    outer_end:
    )");
    const auto t = run(prog, mem, 10000, &fin);
    CHECK(fin.x(5) == 12);
    CHECK(fin.x(6) == 4);
    CHECK(t.retired == 3 + 4 * (2 + 3));
    CHECK(t.loop_cycles == 12);
}

TEST_CASE("loop nesting is validated") {
    CHECK_THROWS_AS(assemble("lp.setupi 0, 2, e\nlp.setupi 0, 2, e\nnop\ne:\n"), DecodeError);
    CHECK_THROWS_AS(assemble("lp.setupi 0, 2, a\nnop\nlp.setupi 1, 2, b\nnop\na:\nnop\nb:\n"), DecodeError);
    CHECK_THROWS_AS(assemble("lp.setupi 0, 2, e\ne:\n"), DecodeError);
    CHECK_THROWS_AS(assemble("beq x0, x0, nowhere\n"), DecodeError);
    CHECK_NOTHROW(assemble("lp.setupi 1, 2, e\nlp.setupi 0, 2, e\nnop\ne:\n"));
}

TEST_CASE("decode errors") {
    CHECK_THROWS_AS(assemble("nn.lw n6, 4(a0!)\n"), DecodeError);
    CHECK_THROWS_AS(assemble("pv.mlsdot.uu.b a0, n0, n9, -, a1\n"), DecodeError);
    CHECK_THROWS_AS(assemble("frob a0\n"), DecodeError);
    CHECK_THROWS_AS(assemble("pv.sdot.uu.q a0, a1, a2\n"), DecodeError);
    Instruction both;
    both.op = Op::PvMlSdot;
    both.refresh_a = both.refresh_b = true;
    CHECK_THROWS_AS(validate(both), DecodeError);
}

TEST_CASE("misaligned word access traps") {
    auto mem = make_mem();
    CoreState fin;
    const auto t = run(assemble("li a0, 0x1002\nlw t0, 0(a0)\nli t1, 1\n"), mem, 100, &fin);
    REQUIRE(t.trap.has_value());
    CHECK(t.trap->pc == 1);
    CHECK(fin.x(5) == 0);
    CHECK(t.retired == 1);
}

TEST_CASE("timeout carries the partial trace") {
    auto mem = make_mem();
    try {
        run(assemble("top:\nj top\n"), mem, 50);
        FAIL("expected timeout");
    } catch (const TimeoutError& e) {
        CHECK(e.trace().cycles >= 50);
        CHECK(e.trace().retired > 0);
    }
}

TEST_CASE("MAC&LOAD refresh semantics") {
    auto mem = make_mem();
    mem.store32(0x1100, 0x01010101u);
    CoreState init;
    init.nn[0] = 0x04030201u;
    init.nn[1] = 0x02020202u;
    init.gpr[10] = 0x1100;
    init.gpr[11] = 5;
    CoreState fin;
    const auto t = run(assemble("pv.mlsdot.uu.b a1, n0, n1, b, a0\n"), mem, 10, init, &fin);
    CHECK(fin.x(11) == 5 + 2 * (1 + 2 + 3 + 4));  // old n1 used
    CHECK(fin.nn[1] == 0x01010101u);
    CHECK(fin.nn[0] == init.nn[0]);
    CHECK(fin.x(10) == 0x1104);
    CHECK(t.loads == 1);
    CHECK(t.cycles == 1);
    // without refresh nothing but rd changes
    const auto t2 = run(assemble("pv.mlsdot.uu.b a1, n0, n1, -, a0\n"), mem, 10, init, &fin);
    CHECK(fin.x(10) == 0x1100);
    CHECK(fin.nn == init.nn);
    CHECK(t2.loads == 0);
}

TEST_CASE("MAC&LOAD matches the de-fused sequence") {
    std::mt19937_64 rng(5);
    const int widths[] = {2, 4, 8, 16};
    const char* wsuf[] = {"c", "n", "b", "h"};
    const char* ssuf[] = {"ss", "uu", "us", "su"};
    for (int it = 0; it < 100000; ++it) {
        const int wi = static_cast<int>(rng() % 4);
        const int si = static_cast<int>(rng() % 4);
        const int na = static_cast<int>(rng() % 6);
        const int nb = static_cast<int>(rng() % 6);
        const int refresh = static_cast<int>(rng() % 3);  // 0 none, 1 a, 2 b
        const std::string sfx = std::string(ssuf[si]) + "." + wsuf[wi];
        const std::string nsel = "n" + std::to_string(na) + ", n" + std::to_string(nb);

        Program fused, defused;
        {
            Instruction m;
            m.op = Op::PvMlSdot;
            m.simd = SimdFormat{widths[wi], static_cast<Signedness>(si), false};
            m.rd = 11;
            m.rs1 = 10;
            m.nn_a = static_cast<std::uint8_t>(na);
            m.nn_b = static_cast<std::uint8_t>(nb);
            m.refresh_a = refresh == 1;
            m.refresh_b = refresh == 2;
            fused.code.push_back(m);
            Instruction d = m;
            d.refresh_a = d.refresh_b = false;
            defused.code.push_back(d);
            if (refresh) {
                Instruction l;
                l.op = Op::NnLw;
                l.nn_a = static_cast<std::uint8_t>(refresh == 1 ? na : nb);
                l.rs1 = 10;
                l.imm = 4;
                defused.code.push_back(l);
            }
        }
        CoreState init;
        for (auto& r : init.gpr) r = static_cast<std::uint32_t>(rng());
        for (auto& r : init.nn) r = static_cast<std::uint32_t>(rng());
        init.gpr[0] = 0;
        init.gpr[10] = 0x1000 + 4 * static_cast<std::uint32_t>(rng() % 64);
        auto m1 = make_mem();
        for (std::uint32_t a = 0x1000; a < 0x1100; a += 4) m1.store32(a, static_cast<std::uint32_t>(rng()));
        auto m2 = m1;
        CoreState f1, f2;
        run(fused, m1, 10, init, &f1);
        run(defused, m2, 10, init, &f2);
        REQUIRE(f1.gpr == f2.gpr);
        REQUIRE(f1.nn == f2.nn);
        int changed = 0;
        for (int r = 0; r < kNumNnRegs; ++r) changed += f1.nn[r] != init.nn[r];
        REQUIRE(changed <= 1);
        REQUIRE(std::equal(m1.bytes().begin(), m1.bytes().end(), m2.bytes().begin()));
    }
}

TEST_CASE("histogram sums to retired and runs are deterministic") {
    auto mem = make_mem();
    const auto prog = assemble(R"(
        li a0, 0x1000
        li t0, 0x01020304
        sw t0, 0(a0)
        nn.lw n0, 0(a0!)
        lp.setupi 0, 8, e
        pv.sdot.uu.b a1, t0, t0
        pv.mlsdot.uu.b a2, n0, n0, -, a0
        addi t1, t1, 1
    e:
        halt
    )");
    auto mem2 = mem;
    const auto t1 = run(prog, mem, 1000);
    const auto t2 = run(prog, mem2, 1000);
    std::uint64_t sum = 0;
    for (auto c : t1.histogram) sum += c;
    CHECK(sum == t1.retired);
    CHECK(t1 == t2);
    CHECK(t1.dotp_cycles == 16);
    CHECK(t1.loop_cycles == 24);
    CHECK(t1.steady_state_utilization() == doctest::Approx(16.0 / 24.0));
    CHECK(t1.to_json().find("\"utilization\"") != std::string::npos);
}

TEST_CASE("assembler round trip") {
    const auto prog = assemble(R"(
        .entry start
        nop
    start:
        li a0, -12
        mv a1, a0
        p.lbu t0, 1(a0!)
        p.sw t0, -4(a1!)
        pv.sdot.su.n.sc a2, a3, a4
        pv.dot.ss.h a2, a3, a4
        pv.add.c s0, s1, s2
        pv.mlsdot.us.c a5, n5, n2, a, a6
        nn.lw n3, 8(a6!)
        lp.setup 1, t2, done
        lp.setupi 0, 9, done
        p.extractu t3, t4, 3, 7
        bltu a0, a1, start
    done:
        evt.wait rbe
        rbe.start 1
        dma.start 0
        barrier
        jal ra, done
        halt
    )");
    const auto again = assemble(disassemble(prog));
    CHECK(again.code == prog.code);
    CHECK(again.entry == prog.entry);
}
