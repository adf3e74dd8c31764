// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "effact/compiler/analysis.hpp"
#include "effact/compiler/hardware.hpp"
#include "effact/isa/program.hpp"

namespace effact::compiler {

// Every pass takes and returns a whole program, requires straight-line code
// and preserves the golden executor's DRAM output bit for bit.

/// Expands each BCONV into MMUL/MMAD micro-ops, tagged !bc1 (per-source
/// scaling by qhat_j^-1) and !bc2 (per-target accumulation) and with a
/// conversion group. |C| sources and |B| targets give |C| + |C||B| MMUL and
/// (|C|-1)|B| MMAD. Throws CompileError on control flow.
Program lower(const Program& p);

/// Copy propagation (register-to-register COPY removed, uses renamed),
/// scalar constant folding (SADD/SMUL of known values become SET, known
/// registers in addresses become offsets) and removal of unused pure
/// instructions and scalar definitions.
Program propagate(const Program& p);

/// Removes recomputation of lexically identical pure instructions and
/// reloads of an address with no may-alias store in between.
Program pre(const Program& p);

struct PeepholeOptions {
  bool fold_conversions = true;  // deferred 1/N and NM/SM conversion folding
  bool fuse_mac = true;          // MMUL -> MMAD pairs into MAC
};
struct PeepholeStats {
  std::size_t deferred = 0;        // inverse NTTs turned scale-deferred
  std::size_t folded_outputs = 0;  // to-SM conversions folded into constants
  std::size_t macs = 0;            // fused pairs
};
/// Computation merge:
///  (a) exact INTT -> MMUL by 1:NM -> step-1 MMUL by c:SM, each single-use,
///      becomes INTT !defer -> MMUL by (c N^-1):NM !absorb;
///  (b) a step-2 accumulation whose single use is MMUL by 1:DM takes DM
///      constants and the conversion is dropped;
///  (c) MMUL whose only use is an MMAD add becomes one MAC.
Program peephole_merge(const Program& p, const PeepholeOptions& opt = {},
                       PeepholeStats* stats = nullptr);

/// List scheduling over the dependence graph. Priority is the longest
/// latency-weighted path to an exit, ties broken by program order. Units are
/// limited per the hardware description and DRAM transfers share one
/// channel. Returns the reordered program in scheduled form with issue
/// cycles.
Program schedule(const Program& p, const HardwareDescription& hw);
/// Latest completion of the issue annotations of a scheduled program.
std::uint64_t schedule_makespan(const Program& p, const HardwareDescription& hw);

struct AllocStats {
  std::size_t spill_stores = 0;
  std::size_t spill_loads = 0;
  std::size_t slots_used = 0;
};
/// Linear-scan binding of virtual registers to SRAM slots in program
/// order. When no slot is free the resident value with the furthest next
/// use is evicted to @__spill (stored once) and reloaded before its next
/// use. Throws CompileError when hw.slots < 2 or an instruction needs more
/// register sources than there are slots.
Program alloc_sram(const Program& p, const HardwareDescription& hw,
                   AllocStats* stats = nullptr);

struct StreamStats {
  std::size_t loads = 0;   // LOADs folded into their consumer
  std::size_t stores = 0;  // STOREs folded into their producer
  std::size_t fifos = 0;   // unit-to-unit values moved to FIFO channels
};
/// Streaming merge on virtual-register or slot form:
///  - a LOAD whose value has a single consumer becomes a streaming source
///    of that consumer,
///  - a STORE that is the single use of its value becomes a streaming sink
///    of the producer,
///  - with `fifos`, a single-use value between two units moves to one of
///    hw.fifo_depth FIFO channels.
/// An instruction takes at most one streaming source. Memory operands are
/// not moved across may-alias accesses.
Program merge_streaming(const Program& p, const HardwareDescription& hw,
                        bool fifos = true, StreamStats* stats = nullptr);

}  // namespace effact::compiler
