// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/compiler/compile.hpp"

#include "effact/error.hpp"
#include "effact/isa/text.hpp"

namespace effact::compiler {

namespace {

template <typename F>
isa::Program stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const CompileError&) {
    throw;
  } catch (const Error& e) {
    throw CompileError(std::string(name) + ": " + e.what());
  }
}

}  // namespace

isa::Program compile(const isa::Program& ir, const HardwareDescription& hw,
                     const CompileOptions& opt, CompileReport* report) {
  CompileReport local;
  CompileReport& r = report ? *report : local;
  r = {};
  try {
    hw.validate();
  } catch (const Error& e) {
    throw CompileError(std::string("hardware: ") + e.what());
  }
  stage("validate", [&] {
    isa::validate(ir);
    return isa::Program{};
  });
  r.ir_instructions = ir.code.size();
  isa::Program p = stage("lower", [&] { return lower(ir); });
  r.lowered = p.code.size();
  if (opt.propagate) p = stage("propagate", [&] { return propagate(p); });
  r.after_propagate = p.code.size();
  if (opt.pre) p = stage("pre", [&] { return pre(p); });
  r.after_pre = p.code.size();
  if (opt.peephole) {
    p = stage("peephole", [&] { return peephole_merge(p, opt.peephole_options, &r.peephole); });
  }
  r.after_peephole = p.code.size();
  if (opt.schedule) {
    p = stage("schedule", [&] { return schedule(p, hw); });
    r.schedule_makespan = schedule_makespan(p, hw);
  } else {
    p.form = isa::Form::Scheduled;
  }
  const bool streaming = opt.streaming && hw.streaming;
  if (streaming) {
    p = stage("streaming", [&] { return merge_streaming(p, hw, true, &r.stream_before_alloc); });
  }
  r.max_live = max_liveness(p);
  if (opt.alloc) {
    p = stage("alloc", [&] { return alloc_sram(p, hw, &r.alloc); });
    if (streaming) {
      p = stage("streaming", [&] {
        return merge_streaming(p, hw, false, &r.stream_after_alloc);
      });
    }
    p.form = isa::Form::Machine;
    p.vreg_names.clear();
  }
  stage("validate", [&] {
    isa::validate(p);
    return isa::Program{};
  });
  r.final_instructions = p.code.size();
  return p;
}

isa::Program compile(std::string_view ir_text, const HardwareDescription& hw,
                     const CompileOptions& opt, CompileReport* report) {
  isa::Program ir;
  try {
    ir = isa::parse_ir(ir_text);
  } catch (const ParseError& e) {
    throw CompileError(std::string("parse: ") + e.what());
  }
  return compile(ir, hw, opt, report);
}

}  // namespace effact::compiler
