// Copyright (C) 2026 The ACS Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "acs/common/memory.hpp"
#include "acs/quant/packing.hpp"
#include "acs/rbe/job.hpp"

namespace acs::rbe {

/// Dense job plus a memory image holding its packed operands.
struct StagedJob {
    RbeJob job;
    FlatMemory mem;
};

/// Packs `acts` {Hin, Win, Kin} and `wgts` {Kout, Kin, f, f} into a fresh memory at `base`.
StagedJob stage_job(const quant::QTensor& acts, const quant::QTensor& wgts, const quant::NormParams& norm,
                    quant::ConvMode mode, int w_bits, int i_bits, int o_bits, quant::Padding padding = quant::Padding::Same,
                    std::uint32_t base = 0x10000000);

/// Writes packed activations at `addr` honouring the job's activation strides.
void write_activations(Memory& mem, const RbeJob& job, const quant::PackedActivations& p);
/// Reads the job's output tensor {Hout, Wout, Kout} back from memory.
quant::QTensor read_outputs(const Memory& mem, const RbeJob& job);

}  // namespace acs::rbe
