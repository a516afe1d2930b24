// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include "acs/isa/assembler.hpp"
#include "acs/kernels/kernels.hpp"
#include "acs/quant/qtensor.hpp"

namespace acs::kernels {

namespace {

using isa::Signedness;

constexpr int kUsableGprs = 31;
constexpr std::uint32_t kOverreadPad = 16;

char width_suffix(int precision) {
    switch (precision) {
        case 8: return 'b';
        case 4: return 'n';
        default: return 'c';
    }
}

std::string sign_suffix(Signedness s) {
    switch (s) {
        case Signedness::SS: return "ss";
        case Signedness::UU: return "uu";
        case Signedness::US: return "us";
        default: return "su";
    }
}

bool a_signed(Signedness s) { return s == Signedness::SS || s == Signedness::SU; }
bool b_signed(Signedness s) { return s == Signedness::SS || s == Signedness::US; }

/// Hands out x1..x31 in order.
class RegAlloc {
public:
    explicit RegAlloc(std::string what) : what_(std::move(what)) {}
    std::string take() {
        if (next_ > kUsableGprs)
            throw GenerationError(what_ + " needs more than " + std::to_string(kUsableGprs) + " registers");
        return "x" + std::to_string(next_++);
    }
    std::vector<std::string> take(int n) {
        std::vector<std::string> r;
        for (int i = 0; i < n; ++i) r.push_back(take());
        return r;
    }

private:
    std::string what_;
    int next_ = 1;
};

struct Common {
    std::vector<std::string> acc;  // row-major tile
    std::vector<std::string> ap, bp;
    std::string cptr, arow, bcol, rows_left;
};

Common alloc_common(RegAlloc& ra, int rows, int cols) {
    Common c;
    c.acc = ra.take(rows * cols);
    c.ap = ra.take(rows);
    c.bp = ra.take(cols);
    c.cptr = ra.take();
    c.arow = ra.take();
    c.bcol = ra.take();
    c.rows_left = ra.take();
    return c;
}

/// Emits the row/column tile loops around `inner`, which is called with the pointer
/// registers already set to the start of the tile.
template <typename InnerFn>
void emit_tiles(std::ostringstream& os, const MatmulLayout& l, int rows, int cols, const Common& r, InnerFn inner) {
    const std::uint32_t row_bytes = static_cast<std::uint32_t>(l.k_words) * 4;
    const std::uint32_t c_row = static_cast<std::uint32_t>(l.n_padded) * 4;
    os << "    li " << r.cptr << ", " << l.c << '\n';
    os << "    li " << r.arow << ", " << l.a << '\n';
    os << "    li " << r.rows_left << ", " << l.m_padded / rows << '\n';
    os << "row_tile:\n";
    os << "    li " << r.bcol << ", " << l.b << '\n';
    os << "    lp.setupi 1, " << l.n_padded / cols << ", col_end\n";
    for (int i = 0; i < rows; ++i) os << "    addi " << r.ap[i] << ", " << r.arow << ", " << i * row_bytes << '\n';
    for (int j = 0; j < cols; ++j) os << "    addi " << r.bp[j] << ", " << r.bcol << ", " << j * row_bytes << '\n';
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            os << "    lw " << r.acc[i * cols + j] << ", " << i * c_row + j * 4 << '(' << r.cptr << ")\n";
    inner(os);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            os << "    sw " << r.acc[i * cols + j] << ", " << i * c_row + j * 4 << '(' << r.cptr << ")\n";
    os << "    addi " << r.cptr << ", " << r.cptr << ", " << cols * 4 << '\n';
    os << "    addi " << r.bcol << ", " << r.bcol << ", " << cols * row_bytes << '\n';
    os << "col_end:\n";
    os << "    addi " << r.cptr << ", " << r.cptr << ", " << (rows - 1) * c_row << '\n';
    os << "    addi " << r.arow << ", " << r.arow << ", " << rows * row_bytes << '\n';
    os << "    addi " << r.rows_left << ", " << r.rows_left << ", -1\n";
    os << "    bne " << r.rows_left << ", zero, row_tile\n";
    os << "    halt\n";
}

void check_matmul(const KernelSpec& spec) {
    spec.validate();
    if (spec.kind != KernelKind::MatMul) throw GenerationError("spec is not a matmul");
}

/// 4x4 tile fed from the NN-RF: n0..n3 hold one word of each A row, n4/n5 alternate
/// between the four B columns. Each step names (row, column register, refresh).
std::string macload_body(const KernelSpec& spec, const Common& r) {
    const std::string mn = "pv.mlsdot." + sign_suffix(spec.sign) + "." + width_suffix(spec.precision);
    std::ostringstream os;
    auto step = [&](int row, int col, int bsel, const char* refresh, const std::string& ptr) {
        os << "    " << mn << ' ' << r.acc[row * 4 + col] << ", n" << row << ", n" << bsel << ", " << refresh << ", "
           << ptr << '\n';
    };
    // column 0 from n4; the last step swaps column 2 into n4
    for (int i = 0; i < 4; ++i) step(i, 0, 4, i == 3 ? "b" : "-", i == 3 ? r.bp[2] : r.bp[0]);
    // column 1 from n5; the last step swaps column 3 into n5
    for (int i = 0; i < 4; ++i) step(i, 1, 5, i == 3 ? "b" : "-", i == 3 ? r.bp[3] : r.bp[0]);
    // column 2 from n4; the last step brings column 0 of the next word
    for (int i = 0; i < 4; ++i) step(i, 2, 4, i == 3 ? "b" : "-", r.bp[0]);
    // column 3 from n5; each step refreshes its A row for the next word
    for (int i = 0; i < 4; ++i) step(i, 3, 5, "a", r.ap[i]);
    os << "    nn.lw n5, 4(" << r.bp[1] << "!)\n";
    return os.str();
}

}  // namespace

std::string to_string(KernelKind k) {
    switch (k) {
        case KernelKind::MatMul: return "matmul";
        case KernelKind::VecAdd: return "vecadd";
        default: return "normquant";
    }
}

KernelKind kernel_kind_from_string(const std::string& s) {
    if (s == "matmul") return KernelKind::MatMul;
    if (s == "vecadd") return KernelKind::VecAdd;
    if (s == "normquant") return KernelKind::NormQuant;
    throw ValidationError("unknown kernel kind '" + s + "'");
}

void KernelSpec::validate() const {
    if (m < 0 || n < 0 || k < 0) throw ValidationError("kernel dimensions must be non-negative");
    if (precision != 2 && precision != 4 && precision != 8)
        throw ValidationError("kernel precision must be 2, 4 or 8, got " + std::to_string(precision));
    if (tile_rows < 1 || tile_cols < 1) throw ValidationError("accumulator tile must be at least 1x1");
    if (kind == KernelKind::NormQuant && (shift < 0 || shift > 31 || out_bits < 1 || out_bits > 16))
        throw ValidationError("normquant shift must lie in [0, 31] and out_bits in [1, 16]");
}

MatmulLayout matmul_layout(const KernelSpec& spec, std::uint32_t base) {
    check_matmul(spec);
    MatmulLayout l;
    l.base = base;
    const int lanes = 32 / spec.precision;
    l.k_words = static_cast<int>(quant::ceil_div(spec.k, lanes));
    l.m_padded = static_cast<int>(quant::ceil_div(spec.m, spec.tile_rows)) * spec.tile_rows;
    l.n_padded = static_cast<int>(quant::ceil_div(spec.n, spec.tile_cols)) * spec.tile_cols;
    l.a = base;
    l.b = l.a + static_cast<std::uint32_t>(l.m_padded * l.k_words) * 4 + kOverreadPad;
    l.c = l.b + static_cast<std::uint32_t>(l.n_padded * l.k_words) * 4 + kOverreadPad;
    l.end = l.c + static_cast<std::uint32_t>(l.m_padded * l.n_padded) * 4;
    return l;
}

std::string matmul_asm(const KernelSpec& spec, std::uint32_t base) {
    check_matmul(spec);
    const auto l = matmul_layout(spec, base);
    std::ostringstream os;
    os << "# matmul " << spec.m << 'x' << spec.n << 'x' << spec.k << ", " << spec.precision << "-bit, "
       << (spec.use_macload ? "MAC&LOAD" : "plain loads") << ", tile " << spec.tile_rows << 'x' << spec.tile_cols
       << '\n';
    if (l.m_padded == 0 || l.n_padded == 0) {
        os << "    halt\n";
        return os.str();
    }
    if (spec.use_macload) {
        if (spec.tile_rows != 4 || spec.tile_cols != 4)
            throw GenerationError("the MAC&LOAD schedule is defined for a 4x4 accumulator tile");
        RegAlloc ra("MAC&LOAD matmul");
        const auto r = alloc_common(ra, 4, 4);
        const auto body = macload_body(spec, r);
        emit_tiles(os, l, 4, 4, r, [&](std::ostringstream& o) {
            for (int i = 0; i < 4; ++i) o << "    nn.lw n" << i << ", 4(" << r.ap[i] << "!)\n";
            o << "    nn.lw n4, 4(" << r.bp[0] << "!)\n";
            o << "    nn.lw n5, 4(" << r.bp[1] << "!)\n";
            o << "    lp.setupi 0, " << l.k_words << ", k_end\n" << body << "k_end:\n";
        });
    } else {
        const int rows = spec.tile_rows, cols = spec.tile_cols;
        RegAlloc ra("matmul tile " + std::to_string(rows) + "x" + std::to_string(cols));
        const auto r = alloc_common(ra, rows, cols);
        const auto av = ra.take(rows);
        const auto bv = ra.take(cols);
        const std::string mn = "pv.sdot." + sign_suffix(spec.sign) + "." + width_suffix(spec.precision);
        emit_tiles(os, l, rows, cols, r, [&](std::ostringstream& o) {
            o << "    lp.setupi 0, " << l.k_words << ", k_end\n";
            for (int i = 0; i < rows; ++i) o << "    p.lw " << av[i] << ", 4(" << r.ap[i] << "!)\n";
            for (int j = 0; j < cols; ++j) o << "    p.lw " << bv[j] << ", 4(" << r.bp[j] << "!)\n";
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j)
                    o << "    " << mn << ' ' << r.acc[i * cols + j] << ", " << av[i] << ", " << bv[j] << '\n';
            o << "k_end:\n";
        });
    }
    return os.str();
}

std::string matmul_baseline_subbyte_asm(const KernelSpec& spec, std::uint32_t base) {
    check_matmul(spec);
    if (spec.precision != 2 && spec.precision != 4)
        throw GenerationError("the unpacking baseline is defined for 2- and 4-bit operands");
    const auto l = matmul_layout(spec, base);
    std::ostringstream os;
    os << "# matmul " << spec.m << 'x' << spec.n << 'x' << spec.k << ", " << spec.precision
       << "-bit unpacked to bytes, tile " << spec.tile_rows << 'x' << spec.tile_cols << '\n';
    if (l.m_padded == 0 || l.n_padded == 0) {
        os << "    halt\n";
        return os.str();
    }
    const int rows = spec.tile_rows, cols = spec.tile_cols;
    RegAlloc ra("unpacking matmul tile " + std::to_string(rows) + "x" + std::to_string(cols));
    const auto r = alloc_common(ra, rows, cols);
    const auto apk = ra.take(rows);
    const auto bpk = ra.take(cols);
    const auto au = ra.take(rows);
    const auto bu = ra.take();
    const auto t0 = ra.take();
    const auto t1 = ra.take();
    const int p = spec.precision;
    const int subwords = 8 / p;
    const std::string mn = "pv.sdot." + sign_suffix(spec.sign) + ".b";

    auto unpack = [&](std::ostringstream& o, const std::string& dst, const std::string& src, int s, bool sgn) {
        const char* ex = sgn ? "p.extract" : "p.extractu";
        const int e = 4 * s;
        o << "    " << ex << ' ' << t0 << ", " << src << ", " << p << ", " << e * p << '\n';
        o << "    " << ex << ' ' << t1 << ", " << src << ", " << p << ", " << (e + 1) * p << '\n';
        o << "    pv.packlo.b " << dst << ", " << t1 << ", " << t0 << '\n';
        o << "    " << ex << ' ' << t0 << ", " << src << ", " << p << ", " << (e + 2) * p << '\n';
        o << "    " << ex << ' ' << t1 << ", " << src << ", " << p << ", " << (e + 3) * p << '\n';
        o << "    pv.packhi.b " << dst << ", " << t1 << ", " << t0 << '\n';
    };

    emit_tiles(os, l, rows, cols, r, [&](std::ostringstream& o) {
        o << "    lp.setupi 0, " << l.k_words << ", k_end\n";
        for (int i = 0; i < rows; ++i) o << "    p.lw " << apk[i] << ", 4(" << r.ap[i] << "!)\n";
        for (int j = 0; j < cols; ++j) o << "    p.lw " << bpk[j] << ", 4(" << r.bp[j] << "!)\n";
        for (int s = 0; s < subwords; ++s) {
            for (int i = 0; i < rows; ++i) unpack(o, au[i], apk[i], s, a_signed(spec.sign));
            for (int j = 0; j < cols; ++j) {
                unpack(o, bu, bpk[j], s, b_signed(spec.sign));
                for (int i = 0; i < rows; ++i)
                    o << "    " << mn << ' ' << r.acc[i * cols + j] << ", " << au[i] << ", " << bu << '\n';
            }
        }
        o << "k_end:\n";
    });
    return os.str();
}

isa::Program gen_matmul(const KernelSpec& spec, std::uint32_t base) { return isa::assemble(matmul_asm(spec, base)); }

isa::Program gen_matmul_baseline_subbyte(const KernelSpec& spec, std::uint32_t base) {
    return isa::assemble(matmul_baseline_subbyte_asm(spec, base));
}

std::vector<std::uint32_t> pack_lanes(const std::vector<std::int32_t>& values, int precision, int words) {
    const int lanes = 32 / precision;
    const std::uint32_t mask = precision == 32 ? 0xFFFFFFFFu : ((1u << precision) - 1u);
    if (static_cast<std::int64_t>(values.size()) > static_cast<std::int64_t>(words) * lanes)
        throw DomainError("pack_lanes: more values than lanes");
    std::vector<std::uint32_t> out(words, 0);
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i / lanes] |= (static_cast<std::uint32_t>(values[i]) & mask) << ((i % lanes) * precision);
    return out;
}

void load_matmul(Memory& mem, const KernelSpec& spec, const MatmulLayout& l, const std::vector<std::int32_t>& a,
                 const std::vector<std::int32_t>& b) {
    const auto m = static_cast<std::size_t>(spec.m), n = static_cast<std::size_t>(spec.n),
               k = static_cast<std::size_t>(spec.k);
    if (a.size() != m * k || b.size() != k * n) throw DomainError("load_matmul: operand sizes do not match the spec");
    const auto bw = quant::BitWidth(spec.precision);
    const auto check = [&](std::int32_t v, bool sgn) {
        const std::int64_t lo = sgn ? bw.signed_min() : 0;
        const std::int64_t hi = sgn ? bw.signed_max() : bw.unsigned_max();
        if (v < lo || v > hi) throw DomainError("operand " + std::to_string(v) + " not representable");
    };
    for (std::uint32_t addr = l.base; addr < l.end; addr += 4) mem.store32(addr, 0);
    std::vector<std::int32_t> row(k);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t kk = 0; kk < k; ++kk) {
            check(a[i * k + kk], a_signed(spec.sign));
            row[kk] = a[i * k + kk];
        }
        mem.write_words(l.a + static_cast<std::uint32_t>(i * l.k_words * 4), pack_lanes(row, spec.precision, l.k_words));
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t kk = 0; kk < k; ++kk) {
            check(b[kk * n + j], b_signed(spec.sign));
            row[kk] = b[kk * n + j];
        }
        mem.write_words(l.b + static_cast<std::uint32_t>(j * l.k_words * 4), pack_lanes(row, spec.precision, l.k_words));
    }
}

std::vector<std::int32_t> read_matmul(const Memory& mem, const KernelSpec& spec, const MatmulLayout& l) {
    std::vector<std::int32_t> c(static_cast<std::size_t>(spec.m) * spec.n);
    for (int i = 0; i < spec.m; ++i)
        for (int j = 0; j < spec.n; ++j)
            c[static_cast<std::size_t>(i) * spec.n + j] =
                static_cast<std::int32_t>(mem.load32(l.c + static_cast<std::uint32_t>((i * l.n_padded + j) * 4)));
    return c;
}

std::vector<std::int32_t> matmul_oracle(int m, int n, int k, const std::vector<std::int32_t>& a,
                                        const std::vector<std::int32_t>& b) {
    std::vector<std::int32_t> c(static_cast<std::size_t>(m) * n, 0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            std::uint32_t s = 0;
            for (int kk = 0; kk < k; ++kk)
                s += static_cast<std::uint32_t>(a[static_cast<std::size_t>(i) * k + kk]) *
                     static_cast<std::uint32_t>(b[static_cast<std::size_t>(kk) * n + j]);
            c[static_cast<std::size_t>(i) * n + j] = static_cast<std::int32_t>(s);
        }
    return c;
}

MatmulRun run_matmul(const KernelSpec& spec, const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b,
                     bool baseline_subbyte) {
    const auto l = matmul_layout(spec);
    const auto prog = baseline_subbyte ? gen_matmul_baseline_subbyte(spec) : gen_matmul(spec);
    FlatMemory mem(l.base, l.end - l.base);
    load_matmul(mem, spec, l, a, b);
    MatmulRun out;
    out.stats = measure(prog, mem, static_cast<std::uint64_t>(spec.m) * spec.n * spec.k);
    out.c = read_matmul(mem, spec, l);
    return out;
}

}  // namespace acs::kernels
