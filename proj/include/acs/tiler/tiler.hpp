// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "acs/abb/model.hpp"
#include "acs/cluster/dma.hpp"
#include "acs/quant/qtensor.hpp"
#include "acs/rbe/engine.hpp"

namespace acs::tiler {

enum class LayerKind { Conv3x3, Conv1x1, DwConv3x3, Linear, Add };
enum class Residency { L2, L3 };

const char* to_string(LayerKind k);
LayerKind layer_kind_from_string(const std::string& s);

/// One network layer. Spatial extents are the input's; convolutions use same padding.
struct Layer {
    std::string name;
    LayerKind kind = LayerKind::Conv3x3;
    int h = 1, w = 1, kin = 1, kout = 1;
    int stride = 1;
    int w_bits = 8, i_bits = 8, o_bits = 8;
    Residency input = Residency::L2, output = Residency::L2, weights = Residency::L3;

    int hout() const { return (h + stride - 1) / stride; }
    int wout() const { return (w + stride - 1) / stride; }
    bool on_rbe() const { return kind == LayerKind::Conv3x3 || kind == LayerKind::Conv1x1 || kind == LayerKind::Linear; }
    int filter() const { return kind == LayerKind::Conv3x3 || kind == LayerKind::DwConv3x3 ? 3 : 1; }
    std::uint64_t macs() const;
    /// Throws ValidationError listing the problem.
    void validate() const;
};

/// Output tile extents plus the input-channel chunk.
struct Tile {
    int h = 1, w = 1, kin = 1, kout = 1;
};

struct Footprint {
    std::uint64_t in = 0, out = 0, weights = 0;
    std::uint64_t sum() const { return in + out + weights; }
};

/// L1 bytes of one tile's buffers.
Footprint footprint(const Layer& l, const Tile& t);

struct TileSolution {
    Tile tile;
    Footprint bytes;
    bool double_buffered = false;  ///< more than one tile, so transfers overlap compute
    int tiles_h = 1, tiles_w = 1, tiles_kin = 1, tiles_kout = 1;

    std::uint64_t tile_count() const {
        return std::uint64_t(tiles_h) * std::uint64_t(tiles_w) * std::uint64_t(tiles_kin) * std::uint64_t(tiles_kout);
    }
    /// Reserved L1: two copies of every buffer.
    std::uint64_t l1_bytes() const { return 2 * bytes.sum(); }
};

class TilingError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

inline constexpr std::uint64_t kL1Budget = 128 * 1024;

/// Greedy search under 2 * (in + out + weights) <= budget: the whole layer when it fits,
/// else full Kin first, largest output volume, ties to larger kout, then h, then w.
TileSolution tile_layer(const Layer& l, std::uint64_t budget = kL1Budget);

enum class Boundedness { OffChip, OnChip, Compute };
const char* to_string(Boundedness b);
/// Argmax stream; ties go to compute.
Boundedness classify(std::uint64_t offchip, std::uint64_t onchip, std::uint64_t compute);

struct OperatingPoint {
    std::string name = "0.8V";
    double vdd = 0.8;
    double freq = 420e6;
    double vbb = 0.0;
};
/// Built-in points: "0.8V" (420 MHz), "0.65V-abb" (400 MHz, bias at its bound), "0.5V" (100 MHz).
OperatingPoint operating_point(const std::string& name);

struct TilerConfig {
    std::uint64_t budget = kL1Budget;
    double l3_bytes_per_cycle = 1.0;       ///< off-chip line model (stand-in constants)
    std::uint64_t l3_latency_cycles = 100;
    std::uint64_t job_overhead_cycles = 60;  ///< core-side programming per RBE job
    cluster::DmaTiming dma;
    rbe::RbeTiming rbe;
    double busy_activity = 1.0;
    double idle_activity = 0.3;
    int cores = 16;
};

struct LayerSchedule {
    Layer layer;
    TileSolution tiling;
    std::uint64_t compute = 0, onchip = 0, offchip = 0, prologue = 0, epilogue = 0, latency = 0;
    Boundedness label = Boundedness::Compute;
    double time_us = 0, energy_uj = 0;
};

struct NetworkSchedule {
    std::string network;
    OperatingPoint op;
    std::vector<LayerSchedule> layers;
    std::uint64_t total_cycles = 0;
    double total_time_us = 0, total_energy_uj = 0;

    std::string csv() const;
    nlohmann::ordered_json to_json() const;
};

/// Per-layer streams: compute from the RBE model (software kernels for dwconv/add),
/// on-chip as the sum of all L2/L1 DMA transfers, off-chip from the L3 line model for
/// L3-resident tensors. The first tile load and last store are exposed:
/// latency = max(offchip, onchip - exposed, compute) + exposed. The label compares
/// the three streams.
LayerSchedule schedule_layer(const Layer& l, const OperatingPoint& op, const abb::PowerModel& power,
                             const TilerConfig& cfg = {});
/// Same with a given tiling (must be feasible for `l`).
LayerSchedule schedule_layer(const Layer& l, const TileSolution& tiling, const OperatingPoint& op,
                             const abb::PowerModel& power, const TilerConfig& cfg = {});
NetworkSchedule schedule_network(const std::string& name, const std::vector<Layer>& layers, const OperatingPoint& op,
                                 const abb::PowerModel& power, const TilerConfig& cfg = {});

/// Every layer that fails to tile under the budget, one message each.
std::vector<std::string> infeasible_layers(const std::vector<Layer>& layers, std::uint64_t budget);

struct Network {
    std::string name;
    std::vector<Layer> layers;
};
Network network_from_json(const nlohmann::json& j);
Network load_network(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const Layer& l);

/// Runs an RBE layer tile by tile on the engine model and stitches the output
/// {Hout, Wout, Kout}. Requires full-Kin tiles.
quant::QTensor execute_tiled(const Layer& l, const TileSolution& sol, const quant::QTensor& acts,
                             const quant::QTensor& wgts, const quant::NormParams& norm);

}  // namespace acs::tiler
