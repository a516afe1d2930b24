// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/rbe/engine.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

#include "acs/quant/reference.hpp"
#include "acs/rbe/uloop.hpp"

namespace acs::rbe {

using quant::ConvMode;

const char* to_string(Phase p) {
    switch (p) {
        case Phase::Load: return "LOAD";
        case Phase::Compute: return "COMPUTE";
        case Phase::NormQuant: return "NORMQUANT";
        default: return "STREAMOUT";
    }
}

namespace {

constexpr int kSide = EngineGeometry::output_side;
constexpr int kCores = EngineGeometry::cores;
constexpr int kPlanes = EngineGeometry::planes_per_pass;

int patch_side(ConvMode m) { return m == ConvMode::Conv3x3 ? EngineGeometry::patch_side : kSide; }

std::uint64_t ceil_div64(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

FunctionalStats execute_functional(const RbeJob& job, Memory& mem, OverflowPolicy policy) {
    require_valid(job);
    FunctionalStats st;
    const bool conv3 = job.mode == ConvMode::Conv3x3;
    const int taps = quant::filter_taps(job.mode);
    const int ps = patch_side(job.mode);
    const int hin = job.hin(), win = job.win();
    const std::int64_t wgt_channel = static_cast<std::int64_t>(job.kin_slices()) * job.w_bits * taps * 4;
    const quant::BitWidth obits(job.o_bits);

    // accumulators: 9 cores x 32 channels
    std::array<std::array<std::int64_t, 32>, kCores> acc{};
    // input buffer: patch pixels x 4 planes
    std::vector<std::uint32_t> patch(static_cast<std::size_t>(ps * ps * kPlanes));
    // weight words for the current Kout tile and Kin slice: [channel][bit][tap]
    std::vector<std::uint32_t> wbuf(static_cast<std::size_t>(32 * job.w_bits * taps));
    std::int64_t patch_origin_y = 0, patch_origin_x = 0;

    job_uloop(job).walk([&](const std::vector<int>& idx, const std::vector<std::int64_t>& addr) {
        const int ty = idx[0], tx = idx[1], ko = idx[2], ki = idx[3], ip = idx[4];
        const int kt = std::min(32, job.kout - ko * 32);
        const int planes = std::min(kPlanes, job.i_bits - ip * kPlanes);
        patch_origin_y = static_cast<std::int64_t>(ty) * kSide - job.pad();
        patch_origin_x = static_cast<std::int64_t>(tx) * kSide - job.pad();

        if (ki == 0 && ip == 0)
            for (auto& core : acc) core.fill(0);

        // LOAD: patch words, zero outside the input tensor
        for (int py = 0; py < ps; ++py)
            for (int px = 0; px < ps; ++px) {
                const std::int64_t y = patch_origin_y + py, x = patch_origin_x + px;
                const bool inside = y >= 0 && y < hin && x >= 0 && x < win;
                for (int p = 0; p < kPlanes; ++p) {
                    std::uint32_t w = 0;
                    if (inside && p < planes)
                        w = mem.load32(static_cast<std::uint32_t>(addr[kRegAct] + py * static_cast<std::int64_t>(job.act_stride_y) +
                                                                  px * static_cast<std::int64_t>(job.act_stride_x) + p * 4));
                    patch[(py * ps + px) * kPlanes + p] = w;
                }
            }
        // weights stream in alongside COMPUTE
        for (int c = 0; c < kt; ++c)
            for (int j = 0; j < job.w_bits; ++j)
                for (int t = 0; t < taps; ++t)
                    wbuf[(c * job.w_bits + j) * taps + t] =
                        mem.load32(static_cast<std::uint32_t>(addr[kRegWgt] + c * wgt_channel + (j * taps + t) * 4));

        // COMPUTE: one output channel per step (times W steps in 3x3 mode)
        const int plane_shift = ip * kPlanes;
        for (int c = 0; c < kt; ++c) {
            const int steps = conv3 ? job.w_bits : 1;
            for (int step = 0; step < steps; ++step) {
                int gates = 0;
                for (int core = 0; core < kCores; ++core) {
                    const int oy = core / kSide, ox = core % kSide;
                    if (ty * kSide + oy >= job.hout || tx * kSide + ox >= job.wout) continue;  // idle core
                    std::int64_t sum = 0;
                    // blocks: taps (3x3) or weight bits (1x1); binconvs: input planes
                    const int blocks = conv3 ? taps : job.w_bits;
                    for (int blk = 0; blk < blocks; ++blk) {
                        const int j = conv3 ? step : blk;
                        const int t = conv3 ? blk : 0;
                        const int fy = conv3 ? t / 3 : 0, fx = conv3 ? t % 3 : 0;
                        const std::uint32_t wword = wbuf[(c * job.w_bits + j) * taps + t];
                        const std::uint32_t* a = &patch[((oy + fy) * ps + (ox + fx)) * kPlanes];
                        for (int p = 0; p < planes; ++p)
                            sum += static_cast<std::int64_t>(binconv(a[p], wword)) << (plane_shift + p + j);
                        st.binconv_evaluations += static_cast<std::uint64_t>(planes);
                        gates += planes * 32;
                    }
                    std::int64_t& cell = acc[core][c];
                    cell += sum;
                    if (cell > INT32_MAX) {
                        if (policy == OverflowPolicy::Trap)
                            throw OverflowError("RBE accumulator overflow at output tile (" + std::to_string(ty) + ", " +
                                                std::to_string(tx) + "), channel " + std::to_string(ko * 32 + c));
                        ++st.overflow_events;
                        cell = static_cast<std::int32_t>(static_cast<std::uint32_t>(cell));
                    }
                }
                st.max_and_gates_per_step = std::max(st.max_and_gates_per_step, gates);
            }
        }

        // NORMQUANT + STREAMOUT after the last reduction step of this Kout tile
        if (ki == job.kin_slices() - 1 && ip == job.i_passes() - 1) {
            for (int core = 0; core < kCores; ++core) {
                const int oy = core / kSide, ox = core % kSide;
                if (ty * kSide + oy >= job.hout || tx * kSide + ox >= job.wout) continue;
                std::array<std::uint32_t, 8> planes_out{};
                for (int c = 0; c < kt; ++c) {
                    const auto ch = static_cast<std::size_t>(ko * 32 + c);
                    const std::int32_t q = quant::reference_normquant(acc[core][c], job.norm.scale[ch], job.norm.bias[ch],
                                                                      job.norm.shift, job.norm.relu, obits);
                    for (int b = 0; b < job.o_bits; ++b)
                        planes_out[b] |= static_cast<std::uint32_t>((q >> b) & 1) << c;
                }
                const std::int64_t base = addr[kRegOut] + oy * static_cast<std::int64_t>(job.out_stride_y) +
                                          ox * static_cast<std::int64_t>(job.out_stride_x);
                for (int b = 0; b < job.o_bits; ++b) {
                    mem.store32(static_cast<std::uint32_t>(base + b * 4), planes_out[b]);
                    ++st.output_words_written;
                }
            }
        }
    });
    return st;
}

CycleReport estimate_cycles(const RbeJob& job, const RbeTiming& timing) {
    require_valid(job);
    CycleReport r;
    r.clock_hz = timing.clock_hz;
    r.macs = job.macs();
    r.ops = 2 * r.macs;
    r.binary_ops = r.ops * static_cast<std::uint64_t>(job.w_bits) * static_cast<std::uint64_t>(job.i_bits);
    const bool conv3 = job.mode == ConvMode::Conv3x3;
    const int ps = patch_side(job.mode);

    auto push = [&](Phase ph, std::uint64_t cycles, std::int64_t addr, std::uint64_t words) {
        r.timeline.push_back({ph, cycles, static_cast<std::uint32_t>(std::max<std::int64_t>(addr, 0)),
                              static_cast<std::uint32_t>(words)});
        r.phase_cycles[static_cast<std::size_t>(ph)] += cycles;
        r.total_cycles += cycles;
    };

    job_uloop(job).walk([&](const std::vector<int>& idx, const std::vector<std::int64_t>& addr) {
        const int ty = idx[0], tx = idx[1], ko = idx[2], ki = idx[3], ip = idx[4];
        const int kt = std::min(32, job.kout - ko * 32);
        const int planes = std::min(kPlanes, job.i_bits - ip * kPlanes);
        const std::uint64_t patch_words = static_cast<std::uint64_t>(ps * ps * planes);
        push(Phase::Load, ceil_div64(patch_words, static_cast<std::uint64_t>(timing.load_words_per_cycle)),
             addr[kRegAct], patch_words);
        const std::uint64_t steps = static_cast<std::uint64_t>(kt) * (conv3 ? job.w_bits : 1);
        push(Phase::Compute, static_cast<std::uint64_t>(timing.compute_overhead) + steps, addr[kRegWgt], 0);
        if (ki == job.kin_slices() - 1 && ip == job.i_passes() - 1) {
            const int active = std::min(kSide, job.hout - ty * kSide) * std::min(kSide, job.wout - tx * kSide);
            push(Phase::NormQuant, static_cast<std::uint64_t>(timing.normquant_cycles), 0, 0);
            const std::uint64_t out_words = static_cast<std::uint64_t>(active * job.o_bits);
            push(Phase::StreamOut, ceil_div64(out_words, static_cast<std::uint64_t>(timing.streamout_words_per_cycle)),
                 addr[kRegOut], out_words);
        }
    });
    return r;
}

CycleReport execute_timed(const RbeJob& job, Memory& mem, const RbeTiming& timing, OverflowPolicy policy,
                          FunctionalStats* stats) {
    const auto st = execute_functional(job, mem, policy);
    if (stats) *stats = st;
    return estimate_cycles(job, timing);
}

RbeEngine::RbeEngine(Memory& mem, RbeTiming timing, OverflowPolicy policy)
    : mem_(&mem), timing_(timing), policy_(policy) {}

int RbeEngine::enqueue(const RbeJob& job) {
    if (occupancy() >= kContexts) throw QueueFullError("RBE job queue full (2 contexts in use)");
    require_valid(job);
    const int id = next_id_++;
    queue_.emplace_back(id, job);
    return id;
}

void RbeEngine::start_next() {
    if (running_ || queue_.empty()) return;
    auto [id, job] = queue_.front();
    queue_.pop_front();
    FunctionalStats st;
    Running r{id, execute_timed(job, *mem_, timing_, policy_, &st)};
    fstats_.push_back(st);
    if (!r.report.timeline.empty()) r.left = r.report.timeline[0].cycles;
    running_ = std::move(r);
}

std::optional<RbeEngine::Request> RbeEngine::request() {
    start_next();
    if (!running_ || running_->segment >= running_->report.timeline.size()) return std::nullopt;
    const auto& seg = running_->report.timeline[running_->segment];
    if (seg.words == 0) return std::nullopt;
    const int per_cycle = seg.phase == Phase::Load ? timing_.load_words_per_cycle : timing_.streamout_words_per_cycle;
    const auto remaining = static_cast<std::uint64_t>(seg.words) - running_->done_words;
    const int words = static_cast<int>(std::min<std::uint64_t>(remaining, static_cast<std::uint64_t>(per_cycle)));
    return Request{seg.addr + static_cast<std::uint32_t>(running_->done_words * 4), words};
}

std::vector<int> RbeEngine::tick(bool granted) {
    std::vector<int> done;
    if (!running_) return done;
    ++busy_cycles_;
    auto& r = *running_;
    const auto& tl = r.report.timeline;
    if (r.segment < tl.size()) {
        const auto& seg = tl[r.segment];
        if (seg.words > 0 && !granted) {
            ++stall_cycles_;
            return done;
        }
        if (seg.words > 0) {
            const int per_cycle =
                seg.phase == Phase::Load ? timing_.load_words_per_cycle : timing_.streamout_words_per_cycle;
            r.done_words = std::min<std::uint64_t>(seg.words, r.done_words + static_cast<std::uint64_t>(per_cycle));
        }
        if (--r.left == 0) {
            ++r.segment;
            r.done_words = 0;
            if (r.segment < tl.size()) r.left = tl[r.segment].cycles;
        }
    }
    if (r.segment >= tl.size()) {
        done.push_back(r.id);
        completed_.emplace_back(r.id, std::move(r.report));
        running_.reset();
    }
    return done;
}

std::uint64_t RbeEngine::run_to_idle() {
    std::uint64_t cycles = 0;
    while (!idle()) {
        request();
        tick(true);
        ++cycles;
    }
    return cycles;
}

RbeJob make_dense_job(ConvMode mode, int w_bits, int i_bits, int o_bits, int kin, int kout, int hout, int wout,
                      std::uint32_t base, quant::Padding padding) {
    RbeJob j;
    j.mode = mode;
    j.w_bits = w_bits;
    j.i_bits = i_bits;
    j.o_bits = o_bits;
    j.kin = kin;
    j.kout = kout;
    j.hout = hout;
    j.wout = wout;
    j.padding = padding;
    j.norm = quant::NormParams::identity(std::max(kout, 0));
    j.act_stride_x = j.dense_act_stride_x();
    j.act_stride_y = j.act_stride_x * static_cast<std::uint32_t>(std::max(j.win(), 0));
    j.out_stride_x = j.dense_out_stride_x();
    j.out_stride_y = j.out_stride_x * static_cast<std::uint32_t>(std::max(wout, 0));
    j.act_addr = base;
    j.wgt_addr = j.act_addr + j.act_bytes();
    j.out_addr = j.wgt_addr + j.wgt_bytes();
    return j;
}

std::vector<SweepRow> throughput_sweep(const RbeTiming& timing, int kin, int kout, int out_side,
                                       std::vector<int> w_values, std::vector<int> i_values, int o_bits) {
    std::vector<SweepRow> rows;
    for (ConvMode mode : {ConvMode::Conv3x3, ConvMode::Conv1x1})
        for (int w : w_values)
            for (int i : i_values) {
                const auto job = make_dense_job(mode, w, i, o_bits, kin, kout, out_side, out_side);
                rows.push_back({mode, w, i, o_bits, estimate_cycles(job, timing)});
            }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "mode,W,I,O,ops_per_cycle,binary_ops_per_cycle,compute_ops_per_cycle,gops,binary_gops,"
          "load_cycles,compute_cycles,normquant_cycles,streamout_cycles,total_cycles\n";
    char buf[512];
    for (const auto& r : rows) {
        const auto& c = r.report;
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%.4f,%.4f,%.4f,%.4f,%.4f,%llu,%llu,%llu,%llu,%llu\n",
                      quant::to_string(r.mode), r.w_bits, r.i_bits, r.o_bits, c.ops_per_cycle(),
                      c.binary_ops_per_cycle(), c.compute_ops_per_cycle(), c.gops(), c.binary_gops(),
                      static_cast<unsigned long long>(c.cycles(Phase::Load)),
                      static_cast<unsigned long long>(c.cycles(Phase::Compute)),
                      static_cast<unsigned long long>(c.cycles(Phase::NormQuant)),
                      static_cast<unsigned long long>(c.cycles(Phase::StreamOut)),
                      static_cast<unsigned long long>(c.total_cycles));
        os << buf;
    }
    return os.str();
}

}  // namespace acs::rbe
