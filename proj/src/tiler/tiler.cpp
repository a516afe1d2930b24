// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#include "acs/tiler/tiler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include "acs/kernels/kernels.hpp"
#include "acs/rbe/staging.hpp"

namespace acs::tiler {

namespace {

std::uint64_t cdiv(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

quant::ConvMode rbe_mode(const Layer& l) {
    return l.kind == LayerKind::Conv3x3 ? quant::ConvMode::Conv3x3 : quant::ConvMode::Conv1x1;
}

bool channels_tied(const Layer& l) { return l.kind == LayerKind::DwConv3x3 || l.kind == LayerKind::Add; }

// Packed L1 bytes of an output tile once final (not partial sums).
std::uint64_t final_out_bytes(const Layer& l, int h, int w, int kout) {
    if (l.on_rbe()) return std::uint64_t(h) * w * cdiv(kout, 32) * l.o_bits * 4;
    return std::uint64_t(h) * w * cdiv(std::uint64_t(kout) * l.o_bits, 8);
}

std::uint64_t weight_bytes(const Layer& l, int kin, int kout) {
    switch (l.kind) {
        case LayerKind::Conv3x3:
        case LayerKind::Conv1x1:
        case LayerKind::Linear:
            return std::uint64_t(kout) * cdiv(kin, 32) * l.w_bits * (l.kind == LayerKind::Conv3x3 ? 9 : 1) * 4 +
                   std::uint64_t(kout) * 8;
        case LayerKind::DwConv3x3: return cdiv(std::uint64_t(kout) * 9 * l.w_bits, 8) + std::uint64_t(kout) * 8;
        case LayerKind::Add: return 0;
    }
    return 0;
}

std::vector<int> channel_candidates(int full) {
    std::vector<int> v{full};
    for (int k = ((full - 1) / 32) * 32; k >= 32; k -= 32) v.push_back(k);
    return v;
}

// (extent, count) pairs covering `total` with tiles of `t`.
std::vector<std::pair<int, std::uint64_t>> split(int total, int t) {
    std::vector<std::pair<int, std::uint64_t>> v;
    const int full = total / t, rem = total % t;
    if (full) v.emplace_back(t, full);
    if (rem) v.emplace_back(rem, 1);
    return v;
}

const char* residency_name(Residency r) { return r == Residency::L2 ? "L2" : "L3"; }

Residency residency_from_string(const std::string& s) {
    if (s == "L2" || s == "l2") return Residency::L2;
    if (s == "L3" || s == "l3") return Residency::L3;
    throw ValidationError("residency must be L2 or L3, got '" + s + "'");
}

// Measured software rates, cached per SIMD width.
struct SoftwareRates {
    double vecadd_slope = 0, vecadd_intercept = 0;  // cycles per word on one core
    double dot_macs_per_cycle = 0;                  // one core
};

int simd_width(int bits) { return bits <= 2 ? 2 : bits <= 4 ? 4 : 8; }

const SoftwareRates& software_rates(int precision) {
    static std::map<int, SoftwareRates> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(precision);
    if (it != cache.end()) return it->second;

    SoftwareRates r;
    auto vecadd_cycles = [&](int n) {
        kernels::KernelSpec s;
        s.kind = kernels::KernelKind::VecAdd;
        s.n = n;
        s.precision = precision;
        const auto lay = kernels::vecadd_layout(s);
        FlatMemory mem(kernels::kDefaultBase, lay.end - kernels::kDefaultBase + 64);
        return std::pair<double, double>(double(lay.words),
                                         double(kernels::measure(kernels::gen_vecadd(s), mem, 1).cycles));
    };
    const auto [w1, c1] = vecadd_cycles(256 * (8 / precision) * 4);
    const auto [w2, c2] = vecadd_cycles(512 * (8 / precision) * 4);
    r.vecadd_slope = (c2 - c1) / (w2 - w1);
    r.vecadd_intercept = c1 - r.vecadd_slope * w1;

    kernels::KernelSpec m;
    m.kind = kernels::KernelKind::MatMul;
    m.m = 16;
    m.n = 16;
    m.k = 64;
    m.precision = precision;
    std::vector<std::int32_t> a(std::size_t(m.m) * m.k, 1), b(std::size_t(m.k) * m.n, 1);
    const auto run = kernels::run_matmul(m, a, b);
    r.dot_macs_per_cycle = double(m.m) * m.n * m.k / double(run.stats.cycles);
    return cache.emplace(precision, r).first->second;
}

std::uint64_t software_cycles(const Layer& l, int h, int w, int ch, int cores) {
    const auto& r = software_rates(simd_width(std::max(l.i_bits, l.w_bits)));
    const std::uint64_t elems = std::uint64_t(h) * w * ch;
    if (l.kind == LayerKind::Add) {
        const int p = simd_width(l.i_bits);
        const std::uint64_t words = cdiv(elems * p, 32);
        return std::uint64_t(std::ceil(double(cdiv(words, cores)) * r.vecadd_slope + r.vecadd_intercept));
    }
    // depthwise: nine MACs per output
    return std::uint64_t(std::ceil(double(elems * 9) / (r.dot_macs_per_cycle * cores)));
}

}  // namespace

const char* to_string(LayerKind k) {
    switch (k) {
        case LayerKind::Conv3x3: return "conv3x3";
        case LayerKind::Conv1x1: return "conv1x1";
        case LayerKind::DwConv3x3: return "dwconv3x3";
        case LayerKind::Linear: return "linear";
        case LayerKind::Add: return "add";
    }
    return "?";
}

LayerKind layer_kind_from_string(const std::string& s) {
    for (auto k : {LayerKind::Conv3x3, LayerKind::Conv1x1, LayerKind::DwConv3x3, LayerKind::Linear, LayerKind::Add})
        if (s == to_string(k)) return k;
    throw ValidationError("unknown layer kind '" + s + "'");
}

std::uint64_t Layer::macs() const {
    const std::uint64_t px = std::uint64_t(hout()) * wout();
    switch (kind) {
        case LayerKind::Conv3x3: return px * kin * kout * 9;
        case LayerKind::Conv1x1:
        case LayerKind::Linear: return px * kin * kout;
        case LayerKind::DwConv3x3: return px * kout * 9;
        case LayerKind::Add: return 0;
    }
    return 0;
}

void Layer::validate() const {
    std::vector<std::string> errs;
    if (h <= 0 || w <= 0 || kin <= 0 || kout <= 0) errs.push_back("extents must be positive");
    if (stride < 1 || stride > 2) errs.push_back("stride must be 1 or 2");
    for (int b : {w_bits, i_bits, o_bits})
        if (b < 2 || b > 8) errs.push_back("precision " + std::to_string(b) + " outside [2, 8]");
    if (channels_tied(*this) && kin != kout) errs.push_back(std::string(to_string(kind)) + " needs kin == kout");
    if (kind == LayerKind::Linear && (h != 1 || w != 1)) errs.push_back("linear layers take a 1x1 input");
    if (kind == LayerKind::Add && stride != 1) errs.push_back("add layers have stride 1");
    if (errs.empty()) return;
    std::string msg = "layer '" + name + "':";
    for (const auto& e : errs) msg += " " + e + ";";
    throw ValidationError(msg);
}

Footprint footprint(const Layer& l, const Tile& t) {
    const std::uint64_t f = std::uint64_t(l.filter());
    const std::uint64_t rows = std::uint64_t(t.h - 1) * l.stride + f;
    const std::uint64_t cols = std::uint64_t(t.w - 1) * l.stride + f;
    Footprint fp;
    if (l.on_rbe()) {
        fp.in = rows * cols * cdiv(t.kin, 32) * l.i_bits * 4;
        fp.out = t.kin < l.kin ? std::uint64_t(t.h) * t.w * t.kout * 4 : final_out_bytes(l, t.h, t.w, t.kout);
    } else {
        const std::uint64_t px_bytes = cdiv(std::uint64_t(t.kout) * l.i_bits, 8);
        fp.in = rows * cols * px_bytes * (l.kind == LayerKind::Add ? 2 : 1);
        fp.out = final_out_bytes(l, t.h, t.w, t.kout);
    }
    fp.weights = weight_bytes(l, t.kin, t.kout);
    return fp;
}

TileSolution tile_layer(const Layer& l, std::uint64_t budget) {
    l.validate();
    const int ho = l.hout(), wo = l.wout();
    auto finish = [&](const Tile& t, bool dbl) {
        TileSolution s;
        s.tile = t;
        s.bytes = footprint(l, t);
        s.double_buffered = dbl;
        s.tiles_h = quant::ceil_div(ho, t.h);
        s.tiles_w = quant::ceil_div(wo, t.w);
        s.tiles_kin = quant::ceil_div(l.kin, t.kin);
        s.tiles_kout = quant::ceil_div(l.kout, t.kout);
        return s;
    };

    auto fits = [&](const Tile& t) { return 2 * footprint(l, t).sum() <= budget; };
    // RBE tiles cover whole engine output blocks at the stride-1 compute extent, or less than one block
    constexpr int block = rbe::EngineGeometry::output_side;
    auto aligned = [&](int t, int full) {
        const int ext = (t - 1) * l.stride + 1;
        return !l.on_rbe() || t == full || ext < block || ext % block == 0;
    };
    const Tile whole{ho, wo, l.kin, l.kout};
    if (fits(whole)) return finish(whole, false);

    const auto kouts = channel_candidates(l.kout);
    const auto kins = channels_tied(l) ? std::vector<int>{l.kin} : channel_candidates(l.kin);
    // Full Kin wins whenever it fits. Among Kin splits the most MACs per tile wins.
    std::optional<Tile> best;
    for (int kin_t : kins) {
        const bool split_kin = kin_t < l.kin;
        auto key = [&](const Tile& t) {
            const std::uint64_t vol = std::uint64_t(t.h) * t.w * t.kout;
            return std::make_tuple(split_kin ? vol * std::uint64_t(t.kin) : vol, t.kin, t.kout, t.h, t.w);
        };
        for (int kout_t : kouts) {
            const int kin_eff = channels_tied(l) ? kout_t : kin_t;
            for (int h = ho; h >= 1; --h) {
                if (!aligned(h, ho)) continue;
                int w = wo;
                while (w >= 1 && !(aligned(w, wo) && fits({h, w, kin_eff, kout_t}))) --w;
                if (w < 1) continue;
                const Tile t{h, w, kin_eff, kout_t};
                if (!best || key(t) > key(*best)) best = t;
            }
        }
        if (best && !split_kin) return finish(*best, true);
    }
    if (best) return finish(*best, true);

    const int kmin = std::min(l.kout, 32);
    const Tile minimal{1, 1, channels_tied(l) ? kmin : std::min(l.kin, 32), kmin};
    const auto fp = footprint(l, minimal);
    const char* binding = "weights";
    std::uint64_t top = fp.weights;
    if (fp.in > top) binding = "input", top = fp.in;
    if (fp.out > top) binding = "output", top = fp.out;
    std::ostringstream os;
    os << "layer '" << l.name << "': no tile fits the L1 budget of " << budget << " B; the smallest tile needs "
       << 2 * fp.sum() << " B double-buffered (input " << fp.in << ", weights " << fp.weights << ", output " << fp.out
       << "); binding buffer: " << binding;
    throw TilingError(os.str());
}

const char* to_string(Boundedness b) {
    switch (b) {
        case Boundedness::OffChip: return "offchip";
        case Boundedness::OnChip: return "onchip";
        case Boundedness::Compute: return "compute";
    }
    return "?";
}

Boundedness classify(std::uint64_t offchip, std::uint64_t onchip, std::uint64_t compute) {
    if (compute >= offchip && compute >= onchip) return Boundedness::Compute;
    return offchip >= onchip ? Boundedness::OffChip : Boundedness::OnChip;
}

OperatingPoint operating_point(const std::string& name) {
    if (name == "0.8V") return {"0.8V", 0.8, 420e6, 0.0};
    if (name == "0.65V-abb") return {"0.65V-abb", 0.65, 400e6, 0.45};
    if (name == "0.5V") return {"0.5V", 0.5, 100e6, 0.0};
    throw ValidationError("unknown operating point '" + name + "' (expected 0.8V, 0.65V-abb or 0.5V)");
}

LayerSchedule schedule_layer(const Layer& l, const OperatingPoint& op, const abb::PowerModel& power,
                             const TilerConfig& cfg) {
    return schedule_layer(l, tile_layer(l, cfg.budget), op, power, cfg);
}

LayerSchedule schedule_layer(const Layer& l, const TileSolution& tiling, const OperatingPoint& op,
                             const abb::PowerModel& power, const TilerConfig& cfg) {
    l.validate();
    LayerSchedule s;
    s.layer = l;
    s.tiling = tiling;
    s.tiling.bytes = footprint(l, tiling.tile);
    const Tile& t = s.tiling.tile;
    const auto hs = split(l.hout(), t.h), ws = split(l.wout(), t.w), kos = split(l.kout, t.kout);
    const auto kis = channels_tied(l) ? std::vector<std::pair<int, std::uint64_t>>{{0, 1}} : split(l.kin, t.kin);

    std::map<std::tuple<int, int, int, int>, std::uint64_t> compute_cache;
    std::uint64_t in_cyc = 0, w_cyc = 0, out_cyc = 0;
    const std::uint64_t spatial = std::uint64_t(s.tiling.tiles_h) * s.tiling.tiles_w;
    for (const auto& [ko, nko] : kos) {
        for (const auto& [ki_raw, nki] : kis) {
            const int ki = channels_tied(l) ? ko : ki_raw;
            const std::uint64_t wt = weight_bytes(l, ki, ko);
            // weights stay resident across spatial tiles unless Kin is split
            const std::uint64_t w_loads = s.tiling.tiles_kin == 1 ? nko : nko * spatial * nki;
            if (wt) w_cyc += w_loads * cluster::dma_cycles(wt, cfg.dma);
            for (const auto& [hh, nh] : hs)
                for (const auto& [ww, nw] : ws) {
                    const std::uint64_t n = nko * nki * nh * nw;
                    in_cyc += n * cluster::dma_cycles(footprint(l, {hh, ww, ki, ko}).in, cfg.dma);
                    const auto key = std::make_tuple(hh, ww, ki, ko);
                    auto it = compute_cache.find(key);
                    if (it == compute_cache.end()) {
                        std::uint64_t c;
                        if (l.on_rbe()) {
                            const auto job = rbe::make_dense_job(rbe_mode(l), l.w_bits, l.i_bits, l.o_bits, ki, ko,
                                                                 (hh - 1) * l.stride + 1, (ww - 1) * l.stride + 1);
                            c = rbe::estimate_cycles(job, cfg.rbe).total_cycles + cfg.job_overhead_cycles;
                        } else {
                            c = software_cycles(l, hh, ww, ko, cfg.cores);
                        }
                        it = compute_cache.emplace(key, c).first;
                    }
                    s.compute += n * it->second;
                }
        }
        for (const auto& [hh, nh] : hs)
            for (const auto& [ww, nw] : ws)
                out_cyc += nko * nh * nw * cluster::dma_cycles(final_out_bytes(l, hh, ww, ko), cfg.dma);
    }

    const int ki0 = channels_tied(l) ? t.kout : t.kin;
    s.prologue = cluster::dma_cycles(footprint(l, t).in, cfg.dma);
    if (const auto wt = weight_bytes(l, ki0, t.kout)) s.prologue += cluster::dma_cycles(wt, cfg.dma);
    s.epilogue = cluster::dma_cycles(final_out_bytes(l, hs.back().first, ws.back().first, kos.back().first), cfg.dma);
    s.onchip = in_cyc + w_cyc + out_cyc;
    const std::uint64_t exposed = s.prologue + s.epilogue;
    const std::uint64_t onchip_overlapped = s.onchip > exposed ? s.onchip - exposed : 0;

    std::uint64_t l3 = 0;
    if (l.weights == Residency::L3) l3 += weight_bytes(l, l.kin, l.kout);
    if (l.input == Residency::L3)
        l3 += footprint(l, {l.hout(), l.wout(), l.kin, l.kout}).in;
    if (l.output == Residency::L3) l3 += final_out_bytes(l, l.hout(), l.wout(), l.kout);
    if (l3) s.offchip = std::uint64_t(std::ceil(double(l3) / cfg.l3_bytes_per_cycle)) + cfg.l3_latency_cycles;

    s.latency = std::max({s.offchip, onchip_overlapped, s.compute}) + exposed;
    s.label = classify(s.offchip, s.onchip, s.compute);
    s.time_us = double(s.latency) / op.freq * 1e6;
    const double busy = power.total_mw(op.vdd, op.freq, op.vbb, cfg.busy_activity);
    const double idle = power.total_mw(op.vdd, op.freq, op.vbb, cfg.idle_activity);
    s.energy_uj = (busy * double(s.compute) + idle * double(s.latency - s.compute)) / op.freq * 1e3;
    return s;
}

NetworkSchedule schedule_network(const std::string& name, const std::vector<Layer>& layers, const OperatingPoint& op,
                                 const abb::PowerModel& power, const TilerConfig& cfg) {
    NetworkSchedule n;
    n.network = name;
    n.op = op;
    for (const auto& l : layers) {
        n.layers.push_back(schedule_layer(l, op, power, cfg));
        n.total_cycles += n.layers.back().latency;
        n.total_time_us += n.layers.back().time_us;
        n.total_energy_uj += n.layers.back().energy_uj;
    }
    return n;
}

std::vector<std::string> infeasible_layers(const std::vector<Layer>& layers, std::uint64_t budget) {
    std::vector<std::string> out;
    for (const auto& l : layers) {
        try {
            tile_layer(l, budget);
        } catch (const TilingError& e) {
            out.emplace_back(e.what());
        }
    }
    return out;
}

std::string NetworkSchedule::csv() const {
    std::ostringstream os;
    os << "layer,kind,h,w,kin,kout,stride,w_bits,i_bits,o_bits,tile_h,tile_w,tile_kin,tile_kout,tiles,l1_bytes,"
          "double_buffered,compute_cycles,onchip_cycles,offchip_cycles,prologue_cycles,epilogue_cycles,latency_cycles,"
          "bound,time_us,energy_uj\n";
    os.setf(std::ios::fixed);
    os.precision(4);
    for (const auto& s : layers) {
        const auto& l = s.layer;
        const auto& t = s.tiling;
        os << l.name << ',' << to_string(l.kind) << ',' << l.h << ',' << l.w << ',' << l.kin << ',' << l.kout << ','
           << l.stride << ',' << l.w_bits << ',' << l.i_bits << ',' << l.o_bits << ',' << t.tile.h << ',' << t.tile.w
           << ',' << t.tile.kin << ',' << t.tile.kout << ',' << t.tile_count() << ',' << t.l1_bytes() << ','
           << (t.double_buffered ? 1 : 0) << ',' << s.compute << ',' << s.onchip << ',' << s.offchip << ','
           << s.prologue << ',' << s.epilogue << ',' << s.latency << ',' << to_string(s.label) << ',' << s.time_us
           << ',' << s.energy_uj << '\n';
    }
    return os.str();
}

nlohmann::ordered_json to_json(const Layer& l) {
    nlohmann::ordered_json j;
    j["name"] = l.name;
    j["kind"] = to_string(l.kind);
    j["h"] = l.h;
    j["w"] = l.w;
    j["kin"] = l.kin;
    j["kout"] = l.kout;
    j["stride"] = l.stride;
    j["w_bits"] = l.w_bits;
    j["i_bits"] = l.i_bits;
    j["o_bits"] = l.o_bits;
    j["input"] = residency_name(l.input);
    j["output"] = residency_name(l.output);
    j["weights"] = residency_name(l.weights);
    return j;
}

nlohmann::ordered_json NetworkSchedule::to_json() const {
    nlohmann::ordered_json j;
    j["network"] = network;
    j["operating_point"] = {{"name", op.name}, {"vdd", op.vdd}, {"freq_hz", op.freq}, {"vbb", op.vbb}};
    j["total_cycles"] = total_cycles;
    j["total_time_us"] = total_time_us;
    j["total_energy_uj"] = total_energy_uj;
    std::map<std::string, int> counts;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& s : layers) {
        ++counts[to_string(s.label)];
        nlohmann::ordered_json e;
        e["layer"] = tiler::to_json(s.layer);
        e["tile"] = {{"h", s.tiling.tile.h}, {"w", s.tiling.tile.w}, {"kin", s.tiling.tile.kin},
                     {"kout", s.tiling.tile.kout}};
        e["tiles"] = s.tiling.tile_count();
        e["l1_bytes"] = s.tiling.l1_bytes();
        e["double_buffered"] = s.tiling.double_buffered;
        e["compute_cycles"] = s.compute;
        e["onchip_cycles"] = s.onchip;
        e["offchip_cycles"] = s.offchip;
        e["prologue_cycles"] = s.prologue;
        e["epilogue_cycles"] = s.epilogue;
        e["latency_cycles"] = s.latency;
        e["bound"] = to_string(s.label);
        e["time_us"] = s.time_us;
        e["energy_uj"] = s.energy_uj;
        arr.push_back(e);
    }
    j["bound_counts"] = counts;
    j["layers"] = arr;
    return j;
}

Network network_from_json(const nlohmann::json& j) {
    try {
        Network n;
        n.name = j.value("name", std::string("network"));
        for (const auto& e : j.at("layers")) {
            Layer l;
            l.name = e.at("name").get<std::string>();
            l.kind = layer_kind_from_string(e.at("kind").get<std::string>());
            l.h = e.at("h").get<int>();
            l.w = e.at("w").get<int>();
            l.kin = e.at("kin").get<int>();
            l.kout = e.value("kout", l.kin);
            l.stride = e.value("stride", 1);
            l.w_bits = e.value("w_bits", 8);
            l.i_bits = e.value("i_bits", 8);
            l.o_bits = e.value("o_bits", 8);
            l.input = residency_from_string(e.value("input", std::string("L2")));
            l.output = residency_from_string(e.value("output", std::string("L2")));
            l.weights = residency_from_string(e.value("weights", std::string("L3")));
            l.validate();
            n.layers.push_back(std::move(l));
        }
        return n;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed network description: ") + e.what());
    }
}

Network load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open network file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    return network_from_json(j);
}

quant::QTensor execute_tiled(const Layer& l, const TileSolution& sol, const quant::QTensor& acts,
                             const quant::QTensor& wgts, const quant::NormParams& norm) {
    if (!l.on_rbe()) throw DomainError("execute_tiled: layer '" + l.name + "' does not run on the RBE");
    if (sol.tile.kin != l.kin) throw DomainError("execute_tiled: Kin-split tiles need partial-sum output");
    const int f = l.filter(), pad = f / 2, s = l.stride;
    const int ho = l.hout(), wo = l.wout();
    const auto mode = rbe_mode(l);
    auto out = quant::QTensor::zeros({ho, wo, l.kout}, quant::BitWidth(l.o_bits));
    const auto& t = sol.tile;
    for (int k0 = 0; k0 < l.kout; k0 += t.kout) {
        const int ke = std::min(t.kout, l.kout - k0);
        auto wsub = quant::QTensor::zeros({ke, l.kin, f, f}, wgts.bitwidth(), wgts.is_signed());
        quant::NormParams nsub;
        nsub.shift = norm.shift;
        nsub.relu = norm.relu;
        for (int k = 0; k < ke; ++k) {
            nsub.scale.push_back(norm.scale[std::size_t(k0 + k)]);
            nsub.bias.push_back(norm.bias[std::size_t(k0 + k)]);
            for (int c = 0; c < l.kin; ++c)
                for (int a = 0; a < f; ++a)
                    for (int b = 0; b < f; ++b) wsub.set({k, c, a, b}, wgts.at({k0 + k, c, a, b}));
        }
        for (int y0 = 0; y0 < ho; y0 += t.h)
            for (int x0 = 0; x0 < wo; x0 += t.w) {
                const int he = std::min(t.h, ho - y0), we = std::min(t.w, wo - x0);
                const int rows = (he - 1) * s + f, cols = (we - 1) * s + f;
                auto patch = quant::QTensor::zeros({rows, cols, l.kin}, acts.bitwidth(), acts.is_signed());
                for (int r = 0; r < rows; ++r)
                    for (int c = 0; c < cols; ++c) {
                        const int iy = y0 * s - pad + r, ix = x0 * s - pad + c;
                        if (iy < 0 || ix < 0 || iy >= l.h || ix >= l.w) continue;
                        for (int k = 0; k < l.kin; ++k) patch.set({r, c, k}, acts.at({iy, ix, k}));
                    }
                auto staged = rbe::stage_job(patch, wsub, nsub, mode, l.w_bits, l.i_bits, l.o_bits,
                                             quant::Padding::Valid);
                rbe::execute_functional(staged.job, staged.mem);
                const auto res = rbe::read_outputs(staged.mem, staged.job);
                for (int y = 0; y < he; ++y)
                    for (int x = 0; x < we; ++x)
                        for (int k = 0; k < ke; ++k) out.set({y0 + y, x0 + x, k0 + k}, res.at({y * s, x * s, k}));
            }
    }
    return out;
}

}  // namespace acs::tiler
