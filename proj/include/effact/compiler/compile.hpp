// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "effact/compiler/hardware.hpp"
#include "effact/compiler/passes.hpp"
#include "effact/isa/program.hpp"

namespace effact::compiler {

struct CompileOptions {
  bool propagate = true;
  bool pre = true;
  bool peephole = true;
  bool schedule = true;
  bool alloc = true;
  /// Effective only when the hardware has streaming enabled too.
  bool streaming = true;
  PeepholeOptions peephole_options;
};

struct CompileReport {
  std::size_t ir_instructions = 0;
  std::size_t lowered = 0;
  std::size_t after_propagate = 0;
  std::size_t after_pre = 0;
  std::size_t after_peephole = 0;
  std::size_t final_instructions = 0;
  std::size_t max_live = 0;  // before allocation
  std::uint64_t schedule_makespan = 0;
  PeepholeStats peephole;
  StreamStats stream_before_alloc;
  StreamStats stream_after_alloc;
  AllocStats alloc;
};

/// Full pipeline: lower, propagate, pre, peephole_merge, schedule,
/// merge_streaming (with FIFOs), alloc_sram, merge_streaming again on the
/// allocated code (spill reloads and stores), then machine form. Passes
/// switched off are skipped; without allocation the result keeps virtual
/// registers. Stage errors are rethrown as CompileError tagged with the
/// stage name.
isa::Program compile(const isa::Program& ir, const HardwareDescription& hw,
                     const CompileOptions& opt = {}, CompileReport* report = nullptr);
isa::Program compile(std::string_view ir_text, const HardwareDescription& hw,
                     const CompileOptions& opt = {}, CompileReport* report = nullptr);

}  // namespace effact::compiler
