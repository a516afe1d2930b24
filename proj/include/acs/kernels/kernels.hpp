// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acs/common/memory.hpp"
#include "acs/isa/core.hpp"
#include "acs/isa/instruction.hpp"

namespace acs::kernels {

/// The generator cannot map a spec onto the register file or the ISA.
class GenerationError : public Error {
public:
    using Error::Error;
};

enum class KernelKind { MatMul, VecAdd, NormQuant };

std::string to_string(KernelKind k);
KernelKind kernel_kind_from_string(const std::string& s);

struct KernelSpec {
    KernelKind kind = KernelKind::MatMul;
    int m = 0;  ///< matmul rows of A and C; normquant pixels
    int n = 0;  ///< matmul columns of B and C; vecadd elements; normquant channels
    int k = 0;  ///< matmul reduction length
    int precision = 8;
    bool use_macload = true;
    int tile_rows = 4;
    int tile_cols = 4;
    isa::Signedness sign = isa::Signedness::UU;  ///< first letter: A, second: B
    // normquant only
    int shift = 0;
    int out_bits = 8;

    void validate() const;
};

/// Where a generated kernel expects its operands. A is row-major and B is
/// column-major; both are packed `precision`-bit lanes along K, rows padded to whole
/// words. C is a row-major int32 matrix with padded dimensions.
struct MatmulLayout {
    std::uint32_t base = 0;
    std::uint32_t a = 0, b = 0, c = 0;
    int m_padded = 0, n_padded = 0;
    int k_words = 0;  ///< words per row of A / column of B
    std::uint32_t end = 0;
};

struct VecAddLayout {
    std::uint32_t a = 0, b = 0, c = 0;
    int words = 0;
    std::uint32_t end = 0;
};

struct NormQuantLayout {
    std::uint32_t acc = 0, scale = 0, bias = 0, out = 0;
    std::uint32_t end = 0;
};

inline constexpr std::uint32_t kDefaultBase = 0x10000000u;

MatmulLayout matmul_layout(const KernelSpec& spec, std::uint32_t base = kDefaultBase);
VecAddLayout vecadd_layout(const KernelSpec& spec, std::uint32_t base = kDefaultBase);
NormQuantLayout normquant_layout(const KernelSpec& spec, std::uint32_t base = kDefaultBase);

/// Register-tiled matmul using XpulpNN dot products at `precision`. With
/// use_macload the 4x4 tile is fed from the NN-RF with one explicit load per
/// inner iteration; otherwise a tile_rows x tile_cols GP-RF tile with plain loads.
isa::Program gen_matmul(const KernelSpec& spec, std::uint32_t base = kDefaultBase);
/// Same result using only 8-bit dot products: every 2/4-bit operand word is unpacked
/// to bytes with bit-field extracts and byte packs inside the inner loop.
isa::Program gen_matmul_baseline_subbyte(const KernelSpec& spec, std::uint32_t base = kDefaultBase);
/// c = a + b lane-wise, wrapping at `precision` bits.
isa::Program gen_vecadd(const KernelSpec& spec, std::uint32_t base = kDefaultBase);
/// out[p][ch] = clamp((acc * scale[ch] + bias[ch]) >> shift, 0, 2^out_bits - 1), one byte per output.
isa::Program gen_normquant(const KernelSpec& spec, std::uint32_t base = kDefaultBase);

/// Assembly text of the same generators.
std::string matmul_asm(const KernelSpec& spec, std::uint32_t base = kDefaultBase);
std::string matmul_baseline_subbyte_asm(const KernelSpec& spec, std::uint32_t base = kDefaultBase);

/// Packs `values` (row-major, `count` elements) into precision-bit lanes.
std::vector<std::uint32_t> pack_lanes(const std::vector<std::int32_t>& values, int precision, int words);

/// Writes A (m x k, row-major) and B (k x n, row-major) into the kernel layout and
/// zeroes C. Needs a memory covering [layout.base, layout.end).
void load_matmul(Memory& mem, const KernelSpec& spec, const MatmulLayout& layout,
                 const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b);
/// Reads C back as m x n row-major.
std::vector<std::int32_t> read_matmul(const Memory& mem, const KernelSpec& spec, const MatmulLayout& layout);

struct KernelStats {
    std::uint64_t instructions_retired = 0;
    std::uint64_t cycles = 0;
    std::uint64_t macs_performed = 0;
    double instr_per_mac = 0.0;
    double dotp_utilization = 0.0;
    double steady_state_utilization = 0.0;
    std::uint64_t loads = 0;
    isa::Trace trace;
};

/// Runs `prog` standalone and derives per-MAC statistics.
KernelStats measure(const isa::Program& prog, Memory& mem, std::uint64_t macs, std::uint64_t max_cycles = 1ull << 32);

/// Structure of the innermost hardware loop of a program.
struct InnerLoopInfo {
    int length = 0;
    int explicit_loads = 0;  ///< load instructions other than refreshing MAC&LOADs
    int dotp = 0;
    int accumulators = 0;  ///< distinct destination registers of dot products
};
InnerLoopInfo inspect_inner_loop(const isa::Program& prog);

/// Result of generating, loading and running one matmul on random or given data.
struct MatmulRun {
    KernelStats stats;
    std::vector<std::int32_t> c;
};
MatmulRun run_matmul(const KernelSpec& spec, const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b,
                     bool baseline_subbyte = false);

/// Plain triple-loop oracle.
std::vector<std::int32_t> matmul_oracle(int m, int n, int k, const std::vector<std::int32_t>& a,
                                        const std::vector<std::int32_t>& b);

}  // namespace acs::kernels
