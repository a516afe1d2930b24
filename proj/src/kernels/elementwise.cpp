// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "acs/isa/assembler.hpp"
#include "acs/kernels/kernels.hpp"
#include "acs/quant/qtensor.hpp"

namespace acs::kernels {

VecAddLayout vecadd_layout(const KernelSpec& spec, std::uint32_t base) {
    spec.validate();
    VecAddLayout l;
    l.words = quant::ceil_div(spec.n, 32 / spec.precision);
    const auto bytes = static_cast<std::uint32_t>(l.words) * 4;
    l.a = base;
    l.b = l.a + bytes;
    l.c = l.b + bytes;
    l.end = l.c + bytes;
    return l;
}

isa::Program gen_vecadd(const KernelSpec& spec, std::uint32_t base) {
    const auto l = vecadd_layout(spec, base);
    const char w = spec.precision == 8 ? 'b' : spec.precision == 4 ? 'n' : 'c';
    std::ostringstream os;
    os << "    li a0, " << l.a << "\n    li a1, " << l.b << "\n    li a2, " << l.c << '\n';
    os << "    lp.setupi 0, " << l.words << ", done\n";
    os << "    p.lw t0, 4(a0!)\n    p.lw t1, 4(a1!)\n";
    os << "    pv.add." << w << " t2, t0, t1\n";
    os << "    p.sw t2, 4(a2!)\n";
    os << "done:\n    halt\n";
    return isa::assemble(os.str());
}

NormQuantLayout normquant_layout(const KernelSpec& spec, std::uint32_t base) {
    spec.validate();
    NormQuantLayout l;
    const auto elems = static_cast<std::uint32_t>(spec.m) * static_cast<std::uint32_t>(spec.n);
    l.acc = base;
    l.scale = l.acc + elems * 4;
    l.bias = l.scale + static_cast<std::uint32_t>(spec.n) * 4;
    l.out = l.bias + static_cast<std::uint32_t>(spec.n) * 4;
    l.end = l.out + (elems + 3) / 4 * 4;
    return l;
}

isa::Program gen_normquant(const KernelSpec& spec, std::uint32_t base) {
    const auto l = normquant_layout(spec, base);
    std::ostringstream os;
    os << "    li a0, " << l.acc << "\n    li a3, " << l.out << '\n';
    os << "    lp.setupi 1, " << spec.m << ", done\n";
    os << "    li a1, " << l.scale << "\n    li a2, " << l.bias << '\n';
    os << "    lp.setupi 0, " << spec.n << ", done\n";
    os << "    p.lw t0, 4(a0!)\n    p.lw t1, 4(a1!)\n    p.lw t2, 4(a2!)\n";
    os << "    mul t0, t0, t1\n    add t0, t0, t2\n";
    os << "    srai t0, t0, " << spec.shift << '\n';
    os << "    p.clipu t0, t0, " << spec.out_bits << '\n';
    os << "    p.sb t0, 1(a3!)\n";
    os << "done:\n    halt\n";
    return isa::assemble(os.str());
}

}  // namespace acs::kernels
