// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "effact/compiler/compile.hpp"
#include "effact/isa/memory.hpp"
#include "effact/sim/simulator.hpp"

namespace effact::sim {

struct SweepPoint {
  std::size_t slots = 0;
  compiler::CompileReport compile;
  SimReport report;
};

/// Recompiles `ir` for every slot count and simulates it. Points are
/// independent and computed concurrently; the result follows the order of
/// `slot_counts`.
std::vector<SweepPoint> sweep_sram(const isa::Program& ir, const HardwareDescription& hw,
                                   const std::vector<std::size_t>& slot_counts,
                                   const compiler::CompileOptions& opt = {});

/// `slots,cycles,dram_bytes,dram_utilization,fu_utilization,spill_loads,spill_stores`.
std::string sweep_csv(const std::vector<SweepPoint>& pts);
std::string sweep_json(const std::vector<SweepPoint>& pts, int indent = 2);

struct StreamingComparison {
  compiler::CompileReport compile_on, compile_off;
  SimReport on, off;
  /// Set when an input image was supplied: both compiled programs were run
  /// on it and their DRAM contents compared.
  std::optional<bool> outputs_identical;

  /// Fractions saved by streaming, (off - on) / off.
  double dram_reduction() const;
  double cycle_reduction() const;
};

/// Compiles `ir` twice, with streaming merge on and off, and simulates
/// both on `hw`.
StreamingComparison compare_streaming(const isa::Program& ir, const HardwareDescription& hw,
                                      const compiler::CompileOptions& opt = {},
                                      const isa::MemoryImage* image = nullptr);

std::string to_json(const StreamingComparison& c, int indent = 2);

}  // namespace effact::sim
