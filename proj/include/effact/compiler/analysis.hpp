// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "effact/compiler/hardware.hpp"
#include "effact/isa/program.hpp"

namespace effact::compiler {

using isa::Instruction;
using isa::Operand;
using isa::Program;

/// Throws CompileError if `p` contains branches or labels.
void require_straight_line(const Program& p, const char* pass);

enum class DepKind : std::uint8_t {
  Data,    // value through a register or slot: start after the producer ends
  Stream,  // value through a FIFO channel: start once first elements arrive
  Order,   // register reuse (WAR/WAW): start after the earlier one starts
  Memory,  // may-alias DRAM accesses with at least one write
};

struct Dep {
  std::size_t from = 0;
  DepKind kind = DepKind::Data;
};

/// Dependence graph of a straight-line program, predecessors per node.
/// Memory edges come from a flow-insensitive comparison of affine address
/// expressions: different symbols never alias, constant offsets alias when
/// equal, the same scalar register (unchanged in between) with the same
/// scale aliases when the offsets are equal, anything else may alias.
struct DepGraph {
  std::vector<std::vector<Dep>> preds;
  std::size_t size() const { return preds.size(); }
};
DepGraph dependences(const Program& p);

/// Latency used by the scheduler, the simulator and the critical-path
/// bound. Scalar instructions take one cycle.
std::uint64_t latency(const Instruction& in, const HardwareDescription& hw,
                      std::size_t n);

/// Start/end times of every instruction under the dependence constraints
/// alone (unlimited units). The end of the last instruction is the
/// critical-path lower bound of any schedule.
struct Timing {
  std::vector<std::uint64_t> start, end;
  std::uint64_t makespan = 0;
};
Timing critical_path(const Program& p, const DepGraph& g,
                     const HardwareDescription& hw);
std::uint64_t critical_path_length(const Program& p, const HardwareDescription& hw);

/// Earliest start of an instruction given its predecessors' start/end.
std::uint64_t earliest_start(const DepGraph& g, std::size_t i,
                             const std::vector<std::uint64_t>& start,
                             const std::vector<std::uint64_t>& end,
                             std::uint64_t pipeline_depth);
/// Lower bound on the end of instruction i from its FIFO producers.
std::uint64_t stream_end_bound(const DepGraph& g, std::size_t i,
                               const std::vector<std::uint64_t>& end);

struct LivenessInterval {
  std::uint32_t vreg = 0;
  std::size_t start = 0;  // defining instruction
  std::size_t end = 0;    // last use (== start when unused)
};
/// Intervals of every defined virtual register in program order.
std::vector<LivenessInterval> liveness(const Program& p);
/// Largest number of SRAM slots needed at any instruction when virtual
/// registers are kept resident: values live into the instruction, or
/// values live out of it plus its unused results, whichever is larger.
std::size_t max_liveness(const Program& p);

/// Uses of each virtual register as (instruction, source index) pairs.
std::vector<std::vector<std::pair<std::size_t, std::size_t>>> vreg_uses(const Program& p);
/// Defining instruction of each virtual register, -1 if none.
std::vector<std::ptrdiff_t> vreg_defs(const Program& p);

/// Removes instructions flagged in `dead`, keeping issue annotations aligned.
void erase_marked(Program& p, const std::vector<bool>& dead);

/// True if instruction `in` only reads its sources and writes its
/// destinations (no memory, FIFO or control effects).
bool is_pure(const Instruction& in);

}  // namespace effact::compiler
