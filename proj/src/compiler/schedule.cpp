// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <limits>
#include <set>

#include "effact/compiler/passes.hpp"
#include "effact/error.hpp"

namespace effact::compiler {

using isa::OperandKind;

namespace {

std::size_t memory_operands(const Instruction& in) {
  std::size_t c = 0;
  for (const auto* ops : {&in.src, &in.dst}) {
    for (const auto& o : *ops) c += o.kind == OperandKind::Mem;
  }
  return c;
}

}  // namespace

Program schedule(const Program& in, const HardwareDescription& hw) {
  require_straight_line(in, "schedule");
  hw.validate();
  const std::size_t n = in.code.size();
  const DepGraph g = dependences(in);
  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& d : g.preds[i]) succ[d.from].push_back(i);
  }
  std::vector<std::uint64_t> lat(n), prio(n, 0);
  for (std::size_t i = 0; i < n; ++i) lat[i] = latency(in.code[i], hw, in.n);
  for (std::size_t i = n; i-- > 0;) {
    std::uint64_t best = 0;
    for (auto s : succ[i]) best = std::max(best, prio[s]);
    prio[i] = lat[i] + best;
  }

  const std::uint64_t dram_ii = hw.dram_cycles(in.n);
  std::vector<std::vector<std::uint64_t>> units(6);
  for (auto c : {FuClass::Ntt, FuClass::Mmul, FuClass::Madd, FuClass::Auto, FuClass::Dram}) {
    units[static_cast<int>(c)].assign(hw.fu_count(c), 0);
  }
  auto& dram = units[static_cast<int>(FuClass::Dram)];

  std::vector<std::size_t> waiting(n);
  std::vector<std::uint64_t> start(n, 0), end(n, 0), est(n, 0);
  using Key = std::pair<std::uint64_t, std::size_t>;  // (-priority, index)
  auto key = [&](std::size_t i) {
    return Key{std::numeric_limits<std::uint64_t>::max() - prio[i], i};
  };
  std::set<Key> ready;
  for (std::size_t i = 0; i < n; ++i) {
    waiting[i] = g.preds[i].size();
    if (waiting[i] == 0) ready.insert(key(i));
  }

  std::vector<std::size_t> order;
  order.reserve(n);
  std::uint64_t t = 0;
  while (order.size() < n) {
    std::vector<std::size_t> newly;
    for (auto it = ready.begin(); it != ready.end();) {
      const std::size_t i = it->second;
      const auto& ins = in.code[i];
      if (est[i] > t) {
        ++it;
        continue;
      }
      const std::size_t mems = memory_operands(ins);
      if (mems && ins.op != Opcode::LOAD && ins.op != Opcode::STORE && dram[0] > t) {
        ++it;
        continue;
      }
      std::uint64_t* unit = nullptr;
      std::uint64_t occupy = 0;
      const FuClass cls = fu_class(ins.op);
      if (cls != FuClass::None) {
        std::vector<FuClass> options{cls};
        if (ins.op == Opcode::MAC) options.push_back(FuClass::Ntt);
        for (auto c : options) {
          for (auto& u : units[static_cast<int>(c)]) {
            if (u <= t) {
              unit = &u;
              break;
            }
          }
          if (unit) break;
        }
        if (!unit) {
          ++it;
          continue;
        }
        occupy = cls == FuClass::Dram ? dram_ii : hw.op_timing(ins.op, in.n).ii;
        if (ins.op == Opcode::BCONV) occupy = lat[i];
      }
      if (unit) *unit = t + occupy;
      if (mems && cls != FuClass::Dram) dram[0] = t + mems * dram_ii;
      start[i] = t;
      end[i] = std::max(t + lat[i], stream_end_bound(g, i, end));
      order.push_back(i);
      for (auto s : succ[i]) {
        if (--waiting[s] == 0) newly.push_back(s);
      }
      it = ready.erase(it);
    }
    for (auto s : newly) {
      est[s] = earliest_start(g, s, start, end, hw.pipeline_depth);
      ready.insert(key(s));
    }
    if (order.size() == n) break;
    std::uint64_t next = std::numeric_limits<std::uint64_t>::max();
    for (const auto& [k, i] : ready) {
      if (est[i] > t) next = std::min(next, est[i]);
    }
    for (const auto& us : units) {
      for (auto u : us) {
        if (u > t) next = std::min(next, u);
      }
    }
    if (next == std::numeric_limits<std::uint64_t>::max()) {
      if (ready.empty()) throw CompileError("schedule: cyclic dependence");
      next = t + 1;
    }
    t = next;
  }

  Program p = in;
  p.form = isa::Form::Scheduled;
  p.code.clear();
  p.issue.clear();
  for (auto i : order) {
    p.code.push_back(in.code[i]);
    p.issue.push_back(start[i]);
  }
  return p;
}

std::uint64_t schedule_makespan(const Program& p, const HardwareDescription& hw) {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < p.code.size() && i < p.issue.size(); ++i) {
    m = std::max(m, p.issue[i] + latency(p.code[i], hw, p.n));
  }
  return m;
}

}  // namespace effact::compiler
