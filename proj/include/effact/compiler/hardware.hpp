// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "effact/isa/program.hpp"

namespace effact::compiler {

using isa::Opcode;

enum class FuClass : std::uint8_t { None, Ntt, Mmul, Madd, Auto, Dram };
const char* to_string(FuClass c);

/// Functional unit that executes `op`. MAC runs on a multiplier and may also
/// be routed to an NTT unit.
FuClass fu_class(Opcode op);

struct OpTiming {
  std::uint64_t ii = 0;       // cycles the unit stays busy
  std::uint64_t latency = 0;  // issue to result
};

struct HardwareDescription {
  std::size_t lanes = 64;
  std::size_t slots = 64;  // residue polynomials
  std::size_t banks = 8;
  double dram_bw = 64.0;  // bytes per cycle
  std::uint64_t dram_latency = 100;
  std::size_t fu_ntt = 1;
  std::size_t fu_mmul = 2;
  std::size_t fu_madd = 2;
  std::size_t fu_auto = 1;
  std::size_t ntt_pipelines = 1;
  std::uint64_t pipeline_depth = 8;
  std::size_t fifo_depth = 4;  // streaming FIFO channels
  std::size_t window = 32;     // scoreboard entries
  bool streaming = true;
  /// Per-opcode overrides of the default timing model.
  std::map<Opcode, OpTiming> timing;

  /// Throws InvalidArgument on non-positive counts or slots < 2.
  void validate() const;
  std::size_t fu_count(FuClass c) const;

  /// Timing of one vector instruction at ring degree n. Defaults: n/lanes
  /// cycles for MMUL/MMAD/MAC/AUTO/COPY, (n/lanes)*log2(n)/pipelines for
  /// NTT/INTT, plus pipeline_depth of latency. DRAM ops are not covered
  /// here (see dram_cycles).
  OpTiming op_timing(Opcode op, std::size_t n) const;
  /// Channel occupancy of moving one residue polynomial.
  std::uint64_t dram_cycles(std::size_t n) const;
};

/// Key-value text, one `key = value` per line, `#` comments. Keys: lanes,
/// slots, banks, dram_bw, dram_latency, fu.ntt, fu.mmul, fu.madd, fu.auto,
/// ntt_pipelines, pipeline_depth, fifo_depth, window, streaming (on/off),
/// timing.<mnemonic> = <ii> <latency>. Throws ParseError.
HardwareDescription parse_hw(std::string_view text);
HardwareDescription load_hw(const std::string& path);
std::string to_text(const HardwareDescription& hw);

}  // namespace effact::compiler
