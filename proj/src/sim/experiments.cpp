// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/sim/experiments.hpp"

#include <exception>
#include <sstream>

#include <nlohmann/json.hpp>

#include "effact/error.hpp"
#include "effact/isa/executor.hpp"

namespace effact::sim {

std::vector<SweepPoint> sweep_sram(const isa::Program& ir, const HardwareDescription& hw,
                                   const std::vector<std::size_t>& slot_counts,
                                   const compiler::CompileOptions& opt) {
  std::vector<SweepPoint> pts(slot_counts.size());
  std::vector<std::exception_ptr> errors(slot_counts.size());
  const auto count = static_cast<std::ptrdiff_t>(slot_counts.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      HardwareDescription h = hw;
      h.slots = slot_counts[i];
      pts[i].slots = h.slots;
      const isa::Program m = compiler::compile(ir, h, opt, &pts[i].compile);
      pts[i].report = simulate(m, h);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return pts;
}

std::string sweep_csv(const std::vector<SweepPoint>& pts) {
  std::ostringstream os;
  os << "slots,cycles,dram_bytes,dram_utilization,fu_utilization,spill_loads,spill_stores\n";
  for (const auto& p : pts) {
    os << p.slots << ',' << p.report.cycles << ',' << p.report.dram.total() << ','
       << p.report.dram.utilization << ',' << p.report.fu_utilization << ','
       << p.compile.alloc.spill_loads << ',' << p.compile.alloc.spill_stores << "\n";
  }
  return os.str();
}

std::string sweep_json(const std::vector<SweepPoint>& pts, int indent) {
  auto j = nlohmann::ordered_json::array();
  for (const auto& p : pts) {
    j.push_back({{"slots", p.slots},
                 {"cycles", p.report.cycles},
                 {"dram_bytes", p.report.dram.total()},
                 {"dram_utilization", p.report.dram.utilization},
                 {"fu_utilization", p.report.fu_utilization},
                 {"spill_loads", p.compile.alloc.spill_loads},
                 {"spill_stores", p.compile.alloc.spill_stores},
                 {"report", nlohmann::ordered_json::parse(to_json(p.report, -1))}});
  }
  return j.dump(indent);
}

double StreamingComparison::dram_reduction() const {
  const auto off_b = static_cast<double>(off.dram.total());
  return off_b > 0 ? (off_b - static_cast<double>(on.dram.total())) / off_b : 0.0;
}

double StreamingComparison::cycle_reduction() const {
  const auto off_c = static_cast<double>(off.cycles);
  return off_c > 0 ? (off_c - static_cast<double>(on.cycles)) / off_c : 0.0;
}

StreamingComparison compare_streaming(const isa::Program& ir, const HardwareDescription& hw,
                                      const compiler::CompileOptions& opt,
                                      const isa::MemoryImage* image) {
  StreamingComparison c;
  HardwareDescription h = hw;
  h.streaming = true;
  compiler::CompileOptions on = opt, off = opt;
  on.streaming = true;
  off.streaming = false;
  const isa::Program p_on = compiler::compile(ir, h, on, &c.compile_on);
  const isa::Program p_off = compiler::compile(ir, h, off, &c.compile_off);
  c.on = simulate(p_on, h);
  c.off = simulate(p_off, h);
  if (image) {
    isa::ExecOptions eo;
    eo.slots = h.slots;
    eo.lanes = h.lanes;
    const auto a = isa::execute_program(p_on, *image, eo);
    const auto b = isa::execute_program(p_off, *image, eo);
    c.outputs_identical = a.dram_equal(b);
  }
  return c;
}

std::string to_json(const StreamingComparison& c, int indent) {
  nlohmann::ordered_json j;
  j["on"] = nlohmann::ordered_json::parse(to_json(c.on, -1));
  j["off"] = nlohmann::ordered_json::parse(to_json(c.off, -1));
  j["dram_reduction"] = c.dram_reduction();
  j["cycle_reduction"] = c.cycle_reduction();
  if (c.outputs_identical) j["outputs_identical"] = *c.outputs_identical;
  return j.dump(indent);
}

}  // namespace effact::sim
