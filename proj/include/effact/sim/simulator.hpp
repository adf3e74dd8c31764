// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "effact/compiler/hardware.hpp"
#include "effact/isa/program.hpp"

namespace effact::sim {

using compiler::FuClass;
using compiler::HardwareDescription;

/// Straight-line dynamic trace of `p`: scalar instructions are evaluated
/// (registers start at zero, as in the golden executor), branches are
/// followed and every vector instruction is emitted with its DRAM addresses
/// resolved to constant offsets. Throws SimError on a runaway loop or an
/// address outside its symbol.
isa::Program expand_trace(const isa::Program& p, std::size_t max_steps = 50'000'000);

struct SimOptions {
  bool trace = false;  // keep per-instruction events
  std::size_t max_steps = 50'000'000;
};

struct FuStats {
  FuClass unit = FuClass::None;
  std::size_t count = 0;
  std::uint64_t busy = 0;  // summed over the units of the class
  double utilization = 0;  // busy / (cycles * count)
};

struct DramTraffic {
  std::uint64_t load_bytes = 0;     // LOAD instructions
  std::uint64_t store_bytes = 0;    // STORE instructions
  std::uint64_t stream_bytes = 0;   // memory operands of compute instructions
  std::uint64_t spill_bytes = 0;    // part of the above that targets __ regions
  std::uint64_t busy_cycles = 0;    // channel occupancy
  double utilization = 0;           // busy_cycles / cycles
  std::uint64_t total() const { return load_bytes + store_bytes + stream_bytes; }
};

struct TraceEvent {
  std::size_t index = 0;  // position in the dynamic trace
  isa::Opcode op = isa::Opcode::MMUL;
  FuClass unit = FuClass::None;  // class that executed it (MAC may use Ntt)
  std::uint64_t issue = 0;
  std::uint64_t complete = 0;
};

struct SimReport {
  std::size_t n = 0;
  std::size_t instructions = 0;  // dynamic vector instructions
  std::uint64_t cycles = 0;
  std::uint64_t critical_path = 0;  // dependence bound on the same trace
  std::uint64_t dram_bound = 0;     // ceil(DRAM bytes / bandwidth)
  std::vector<FuStats> fu;          // Ntt, Mmul, Madd, Auto
  double fu_utilization = 0;        // compute busy over all compute units
  DramTraffic dram;
  std::uint64_t bank_conflicts = 0;
  std::size_t peak_fifo = 0;
  std::size_t macs_on_ntt = 0;
  std::vector<TraceEvent> trace;

  const FuStats& unit(FuClass c) const;
};

/// Out-of-order scoreboard model. Instructions enter a window of
/// hw.window entries in program order and issue once their unit is free
/// and their operands are ready; readiness follows the compiler's
/// dependence graph, so FIFO operands can be consumed pipeline_depth cycles
/// after the producer starts. DRAM is one channel shared by LOAD/STORE and
/// streamed operands under a round-robin arbiter that favours the FIFO side
/// when the channels are nearly full. SRAM reads of one cycle that fall in
/// the same bank (slot mod banks) serialize and delay the reader's result.
/// Throws SimError when the program uses slots or FIFO channels beyond hw.
SimReport simulate(const isa::Program& p, const HardwareDescription& hw,
                   const SimOptions& opt = {});

/// JSON object with every field of the report (trace only if recorded).
std::string to_json(const SimReport& r, int indent = 2);
/// Human-readable summary.
std::string to_text(const SimReport& r);
/// `index,op,unit,issue,complete` rows with a header line.
std::string trace_csv(const SimReport& r);

}  // namespace effact::sim
