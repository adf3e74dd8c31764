// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/compiler/analysis.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "effact/error.hpp"

namespace effact::compiler {

using isa::OperandKind;

void require_straight_line(const Program& p, const char* pass) {
  for (std::size_t pc = 0; pc < p.code.size(); ++pc) {
    const auto op = p.code[pc].op;
    if (op == Opcode::BLT || op == Opcode::BGE || op == Opcode::JMP) {
      throw CompileError(std::string(pass) + ": instruction " + std::to_string(pc) +
                         ": control flow is not supported; unroll with loop blocks");
    }
  }
}

bool is_pure(const Instruction& in) {
  switch (in.op) {
    case Opcode::MMUL:
    case Opcode::MMAD:
    case Opcode::MAC:
    case Opcode::NTT:
    case Opcode::INTT:
    case Opcode::AUTO:
    case Opcode::COPY:
    case Opcode::BCONV: break;
    default: return false;
  }
  for (const auto* ops : {&in.src, &in.dst}) {
    for (const auto& o : *ops) {
      if (o.kind == OperandKind::Mem || o.kind == OperandKind::Fifo) return false;
    }
  }
  return true;
}

namespace {

std::uint64_t reg_key(const Operand& o) {
  return (static_cast<std::uint64_t>(o.kind) << 32) | o.index;
}

struct Access {
  std::size_t pc;
  bool write;
  isa::Address addr;
  std::size_t version;  // definition count of addr.sreg at the access
};

bool may_alias(const Access& a, const Access& b) {
  if (a.addr.symbol != b.addr.symbol) return false;
  if (a.addr.sreg < 0 && b.addr.sreg < 0) return a.addr.offset == b.addr.offset;
  if (a.addr.sreg == b.addr.sreg && a.version == b.version && a.addr.scale == b.addr.scale) {
    return a.addr.offset == b.addr.offset;
  }
  return true;
}

struct Cell {
  std::ptrdiff_t last_write = -1;
  std::vector<std::size_t> reads;
};

struct SymbolState {
  std::map<std::int64_t, Cell> cells;
  std::vector<Access> wild;
};

class Builder {
 public:
  explicit Builder(const Program& p) : p_(p) { g_.preds.resize(p.code.size()); }

  DepGraph run() {
    for (std::size_t pc = 0; pc < p_.code.size(); ++pc) visit(pc);
    for (auto& v : g_.preds) {
      std::sort(v.begin(), v.end(), [](const Dep& a, const Dep& b) {
        return a.from != b.from ? a.from < b.from : a.kind < b.kind;
      });
      v.erase(std::unique(v.begin(), v.end(),
                          [](const Dep& a, const Dep& b) {
                            return a.from == b.from && a.kind == b.kind;
                          }),
              v.end());
    }
    return std::move(g_);
  }

 private:
  void edge(std::size_t to, std::ptrdiff_t from, DepKind k) {
    if (from >= 0 && static_cast<std::size_t>(from) != to) {
      g_.preds[to].push_back({static_cast<std::size_t>(from), k});
    }
  }

  void read_reg(std::size_t pc, std::uint64_t key, bool fifo) {
    auto& r = regs_[key];
    edge(pc, r.last_write, fifo ? DepKind::Stream : DepKind::Data);
    r.reads.push_back(pc);
  }

  void write_reg(std::size_t pc, std::uint64_t key) {
    auto& r = regs_[key];
    edge(pc, r.last_write, DepKind::Order);
    for (auto rd : r.reads) edge(pc, static_cast<std::ptrdiff_t>(rd), DepKind::Order);
    r.last_write = static_cast<std::ptrdiff_t>(pc);
    r.reads.clear();
  }

  void access(std::size_t pc, const isa::Address& a, bool write) {
    if (a.sreg >= 0) read_reg(pc, sreg_key(a.sreg), false);
    Access acc{pc, write, a, a.sreg >= 0 ? versions_[a.sreg] : 0};
    auto& st = mem_[a.symbol];
    auto conflict_cell = [&](Cell& c) {
      edge(pc, c.last_write, DepKind::Memory);
      if (write) {
        for (auto rd : c.reads) edge(pc, static_cast<std::ptrdiff_t>(rd), DepKind::Memory);
      }
    };
    for (const auto& w : st.wild) {
      if ((write || w.write) && may_alias(acc, w)) {
        edge(pc, static_cast<std::ptrdiff_t>(w.pc), DepKind::Memory);
      }
    }
    if (a.sreg < 0) {
      auto& c = st.cells[a.offset];
      conflict_cell(c);
      if (write) {
        c.last_write = static_cast<std::ptrdiff_t>(pc);
        c.reads.clear();
      } else {
        c.reads.push_back(pc);
      }
    } else {
      for (auto& [off, c] : st.cells) conflict_cell(c);
      st.wild.push_back(acc);
    }
  }

  static std::uint64_t sreg_key(std::int64_t r) {
    return (static_cast<std::uint64_t>(OperandKind::SReg) << 32) |
           static_cast<std::uint32_t>(r);
  }

  void visit(std::size_t pc) {
    const auto& in = p_.code[pc];
    for (const auto& o : in.src) {
      if (o.is_reg()) read_reg(pc, reg_key(o), o.kind == OperandKind::Fifo);
      else if (o.kind == OperandKind::SReg) read_reg(pc, reg_key(o), false);
      else if (o.kind == OperandKind::Mem) access(pc, o.addr, false);
    }
    for (const auto& o : in.dst) {
      if (o.kind == OperandKind::Mem) access(pc, o.addr, true);
    }
    for (const auto& o : in.dst) {
      if (o.is_reg() || o.kind == OperandKind::SReg) write_reg(pc, reg_key(o));
      if (o.kind == OperandKind::SReg) ++versions_[o.index];
    }
  }

  struct RegState {
    std::ptrdiff_t last_write = -1;
    std::vector<std::size_t> reads;
  };

  const Program& p_;
  DepGraph g_;
  std::map<std::uint64_t, RegState> regs_;
  std::map<std::uint32_t, SymbolState> mem_;
  std::map<std::int64_t, std::size_t> versions_;
};

}  // namespace

DepGraph dependences(const Program& p) {
  require_straight_line(p, "dependences");
  return Builder(p).run();
}

std::uint64_t latency(const Instruction& in, const HardwareDescription& hw,
                      std::size_t n) {
  if (isa::is_scalar(in.op)) return 1;
  if (in.op == Opcode::BCONV) {
    // Unlowered conversion: |C| + |C||B| multiplies through one unit.
    const auto t = hw.op_timing(Opcode::MMUL, n);
    return t.ii * (in.src.size() * (1 + in.dst.size())) + (t.latency - t.ii);
  }
  return hw.op_timing(in.op, n).latency;
}

std::uint64_t earliest_start(const DepGraph& g, std::size_t i,
                             const std::vector<std::uint64_t>& start,
                             const std::vector<std::uint64_t>& end,
                             std::uint64_t pipeline_depth) {
  std::uint64_t s = 0;
  for (const auto& d : g.preds[i]) {
    switch (d.kind) {
      case DepKind::Data:
      case DepKind::Memory: s = std::max(s, end[d.from]); break;
      case DepKind::Stream:
        s = std::max(s, std::min(start[d.from] + pipeline_depth, end[d.from]));
        break;
      case DepKind::Order: s = std::max(s, start[d.from] + 1); break;
    }
  }
  return s;
}

std::uint64_t stream_end_bound(const DepGraph& g, std::size_t i,
                               const std::vector<std::uint64_t>& end) {
  std::uint64_t e = 0;
  for (const auto& d : g.preds[i]) {
    if (d.kind == DepKind::Stream) e = std::max(e, end[d.from] + 1);
  }
  return e;
}

Timing critical_path(const Program& p, const DepGraph& g,
                     const HardwareDescription& hw) {
  Timing t;
  t.start.resize(p.code.size());
  t.end.resize(p.code.size());
  for (std::size_t i = 0; i < p.code.size(); ++i) {
    t.start[i] = earliest_start(g, i, t.start, t.end, hw.pipeline_depth);
    t.end[i] = std::max(t.start[i] + latency(p.code[i], hw, p.n),
                        stream_end_bound(g, i, t.end));
    t.makespan = std::max(t.makespan, t.end[i]);
  }
  return t;
}

std::uint64_t critical_path_length(const Program& p, const HardwareDescription& hw) {
  return critical_path(p, dependences(p), hw).makespan;
}

std::vector<std::vector<std::pair<std::size_t, std::size_t>>> vreg_uses(const Program& p) {
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> uses(p.vreg_names.size());
  for (std::size_t pc = 0; pc < p.code.size(); ++pc) {
    const auto& src = p.code[pc].src;
    for (std::size_t k = 0; k < src.size(); ++k) {
      if (src[k].kind == OperandKind::VReg) uses[src[k].index].emplace_back(pc, k);
    }
  }
  return uses;
}

std::vector<std::ptrdiff_t> vreg_defs(const Program& p) {
  std::vector<std::ptrdiff_t> defs(p.vreg_names.size(), -1);
  for (std::size_t pc = 0; pc < p.code.size(); ++pc) {
    for (const auto& o : p.code[pc].dst) {
      if (o.kind == OperandKind::VReg) defs[o.index] = static_cast<std::ptrdiff_t>(pc);
    }
  }
  return defs;
}

std::vector<LivenessInterval> liveness(const Program& p) {
  const auto defs = vreg_defs(p);
  const auto uses = vreg_uses(p);
  std::vector<LivenessInterval> out;
  for (std::uint32_t v = 0; v < defs.size(); ++v) {
    if (defs[v] < 0) continue;
    LivenessInterval iv{v, static_cast<std::size_t>(defs[v]),
                        static_cast<std::size_t>(defs[v])};
    for (const auto& [pc, k] : uses[v]) iv.end = std::max(iv.end, pc);
    out.push_back(iv);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.start != b.start ? a.start < b.start : a.vreg < b.vreg;
  });
  return out;
}

std::size_t max_liveness(const Program& p) {
  const std::size_t n = p.code.size();
  if (n == 0) return 0;
  // live_in[i]: values defined before i and used at or after i.
  // live_out[i]: values defined at or before i and used after i.
  std::vector<std::ptrdiff_t> in_delta(n + 1, 0), out_delta(n + 1, 0);
  std::vector<std::size_t> dead_defs(n, 0);
  for (const auto& iv : liveness(p)) {
    if (iv.end == iv.start) {
      ++dead_defs[iv.start];
      continue;
    }
    ++in_delta[iv.start + 1];
    --in_delta[iv.end + 1];
    ++out_delta[iv.start];
    --out_delta[iv.end];
  }
  std::size_t best = 0;
  std::ptrdiff_t live_in = 0, live_out = 0;
  for (std::size_t i = 0; i < n; ++i) {
    live_in += in_delta[i];
    live_out += out_delta[i];
    best = std::max({best, static_cast<std::size_t>(live_in),
                     static_cast<std::size_t>(live_out) + dead_defs[i]});
  }
  return best;
}

void erase_marked(Program& p, const std::vector<bool>& dead) {
  std::vector<Instruction> code;
  std::vector<std::uint64_t> issue;
  const bool has_issue = p.issue.size() == p.code.size();
  for (std::size_t i = 0; i < p.code.size(); ++i) {
    if (dead[i]) continue;
    code.push_back(std::move(p.code[i]));
    if (has_issue) issue.push_back(p.issue[i]);
  }
  p.code = std::move(code);
  if (has_issue) p.issue = std::move(issue);
  else p.issue.clear();
}

}  // namespace effact::compiler
