// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "effact/compiler/analysis.hpp"
#include "effact/error.hpp"

namespace effact::sim {

using compiler::Dep;
using compiler::DepKind;
using isa::Instruction;
using isa::Opcode;
using isa::OperandKind;
using isa::Program;

isa::Program expand_trace(const Program& p, std::size_t max_steps) {
  Program t = p;
  t.code.clear();
  t.issue.clear();
  std::map<std::uint32_t, std::int64_t> regs;
  auto reg = [&](std::uint32_t r) {
    auto it = regs.find(r);
    return it == regs.end() ? std::int64_t{0} : it->second;
  };
  auto scalar = [&](const isa::Operand& o) {
    return o.kind == OperandKind::SReg ? reg(o.index) : static_cast<std::int64_t>(o.imm);
  };
  std::size_t pc = 0, steps = 0;
  while (pc < p.code.size()) {
    if (++steps > max_steps) throw SimError("trace: step limit exceeded");
    const Instruction& in = p.code[pc];
    std::size_t next = pc + 1;
    switch (in.op) {
      case Opcode::SET: regs[in.dst[0].index] = static_cast<std::int64_t>(in.src[0].imm); break;
      case Opcode::SADD: regs[in.dst[0].index] = reg(in.src[0].index) + scalar(in.src[1]); break;
      case Opcode::SMUL: regs[in.dst[0].index] = reg(in.src[0].index) * scalar(in.src[1]); break;
      case Opcode::BLT:
        if (reg(in.src[0].index) < scalar(in.src[1])) next = in.src[2].index;
        break;
      case Opcode::BGE:
        if (reg(in.src[0].index) >= scalar(in.src[1])) next = in.src[2].index;
        break;
      case Opcode::JMP: next = in.src[0].index; break;
      default: {
        Instruction v = in;
        for (auto* ops : {&v.src, &v.dst}) {
          for (auto& o : *ops) {
            if (o.kind != OperandKind::Mem) continue;
            std::int64_t off = o.addr.offset;
            if (o.addr.sreg >= 0) off += o.addr.scale * reg(static_cast<std::uint32_t>(o.addr.sreg));
            const auto& sym = p.symbols.at(o.addr.symbol);
            if (off < 0 || static_cast<std::size_t>(off) >= sym.size) {
              throw SimError("trace: instruction " + std::to_string(pc) + ": address @" +
                             sym.name + "[" + std::to_string(off) + "] out of range");
            }
            o.addr.sreg = -1;
            o.addr.scale = 0;
            o.addr.offset = off;
          }
        }
        t.code.push_back(std::move(v));
      }
    }
    pc = next;
  }
  return t;
}

const FuStats& SimReport::unit(FuClass c) const {
  for (const auto& f : fu) {
    if (f.unit == c) return f;
  }
  throw SimError(std::string("report: no unit class ") + compiler::to_string(c));
}

namespace {

constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();
constexpr FuClass kCompute[] = {FuClass::Ntt, FuClass::Mmul, FuClass::Madd, FuClass::Auto};

void check_resources(const Program& p, const HardwareDescription& hw) {
  for (std::size_t i = 0; i < p.code.size(); ++i) {
    for (const auto* ops : {&p.code[i].src, &p.code[i].dst}) {
      for (const auto& o : *ops) {
        if (o.kind == OperandKind::Slot && o.index >= hw.slots) {
          throw SimError("instruction " + std::to_string(i) + ": slot s" +
                         std::to_string(o.index) + " beyond " + std::to_string(hw.slots) +
                         " SRAM slots");
        }
        if (o.kind == OperandKind::Fifo && o.index >= hw.fifo_depth) {
          throw SimError("instruction " + std::to_string(i) + ": FIFO channel f" +
                         std::to_string(o.index) + " beyond " +
                         std::to_string(hw.fifo_depth) + " channels");
        }
      }
    }
  }
}

bool is_spill(const Program& p, const isa::Address& a) {
  return p.symbols.at(a.symbol).name.rfind("__", 0) == 0;
}

class Scoreboard {
 public:
  Scoreboard(const Program& t, const HardwareDescription& hw, const SimOptions& opt)
      : t_(t), hw_(hw), opt_(opt), g_(compiler::dependences(t)), n_(t.code.size()) {
    succ_.resize(n_);
    pending_.assign(n_, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      pending_[i] = g_.preds[i].size();
      for (const auto& d : g_.preds[i]) succ_[d.from].push_back(i);
    }
    lat_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) lat_[i] = compiler::latency(t.code[i], hw, t.n);
    for (auto c : kCompute) units_[idx(c)].assign(hw.fu_count(c), 0);
    start_.assign(n_, 0);
    end_.assign(n_, 0);
    est_.assign(n_, 0);
    issued_.assign(n_, false);
    unit_of_.assign(n_, FuClass::None);
    fifo_consumer_.assign(n_, kNone);
    for (std::size_t i = 0; i < n_; ++i) {
      for (const auto& d : g_.preds[i]) {
        if (d.kind == DepKind::Stream) fifo_consumer_[d.from] = i;
      }
    }
    dram_ii_ = hw.dram_cycles(t.n);
  }

  SimReport run() {
    std::size_t done = 0, head = 0;
    std::uint64_t now = 0;
    while (done < n_) {
      bank_use_.clear();
      const std::size_t limit = std::min(n_, head + hw_.window);
      std::size_t cand[2] = {kNone, kNone};  // 0: SRAM side, 1: FIFO side
      for (std::size_t i = head; i < limit; ++i) {
        if (issued_[i] || pending_[i] > 0 || est_[i] > now) continue;
        const Instruction& in = t_.code[i];
        const std::size_t mems = memory_operands(in);
        if (mems && dram_free_ > now) continue;
        if (!free_unit(in, now)) continue;
        if (mems) {
          const int side = fu_class_of(in) == FuClass::Dram ? 0 : 1;
          if (cand[side] == kNone) cand[side] = i;
          continue;
        }
        issue(i, now);
        ++done;
      }
      if (std::size_t pick = arbitrate(cand, now); pick != kNone) {
        issue(pick, now);
        ++done;
      }
      while (head < n_ && issued_[head]) ++head;
      if (done == n_) break;
      now = next_event(now, head);
    }
    return report();
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  static int idx(FuClass c) { return static_cast<int>(c); }

  static FuClass fu_class_of(const Instruction& in) { return compiler::fu_class(in.op); }

  static std::size_t memory_operands(const Instruction& in) {
    std::size_t c = 0;
    for (const auto* ops : {&in.src, &in.dst}) {
      for (const auto& o : *ops) c += o.kind == OperandKind::Mem;
    }
    return c;
  }

  // Busy-until cell of a unit free at `now`, or nullptr. DRAM and scalar
  // instructions get a dummy cell; the channel is tracked separately.
  std::uint64_t* free_unit(const Instruction& in, std::uint64_t now, FuClass* used = nullptr) {
    const FuClass cls = fu_class_of(in);
    if (cls == FuClass::Dram || cls == FuClass::None) {
      if (used) *used = cls;
      return &scratch_;
    }
    FuClass options[2] = {cls, FuClass::None};
    if (in.op == Opcode::MAC) options[1] = FuClass::Ntt;
    for (auto c : options) {
      if (c == FuClass::None) break;
      for (auto& u : units_[idx(c)]) {
        if (u <= now) {
          if (used) *used = c;
          return &u;
        }
      }
    }
    return nullptr;
  }

  std::size_t fifo_occupancy(std::uint64_t now) const {
    std::size_t occ = 0;
    for (auto prod : open_fifos_) {
      const auto cons = fifo_consumer_[prod];
      if (cons == kNone || !issued_[cons] || end_[cons] > now) ++occ;
    }
    return occ;
  }

  std::size_t arbitrate(const std::size_t cand[2], std::uint64_t now) {
    int side;
    if (cand[0] == kNone && cand[1] == kNone) return kNone;
    if (cand[0] == kNone) side = 1;
    else if (cand[1] == kNone) side = 0;
    else if (fifo_occupancy(now) + 1 >= hw_.fifo_depth) side = 1;
    else side = last_side_ == 0 ? 1 : 0;
    last_side_ = side;
    if (!free_unit(t_.code[cand[side]], now)) return kNone;
    return cand[side];
  }

  void issue(std::size_t i, std::uint64_t now) {
    const Instruction& in = t_.code[i];
    FuClass used = FuClass::None;
    std::uint64_t* unit = free_unit(in, now, &used);
    const FuClass cls = fu_class_of(in);
    const std::size_t mems = memory_operands(in);
    std::uint64_t penalty = 0;
    for (const auto& o : in.src) {
      if (o.kind != OperandKind::Slot) continue;
      if (++bank_use_[o.index % hw_.banks] > 1) {
        ++penalty;
        ++conflicts_;
      }
    }
    start_[i] = now;
    std::uint64_t end = std::max(now + lat_[i] + penalty,
                                 compiler::stream_end_bound(g_, i, end_));
    if (cls == FuClass::Dram) {
      dram_free_ = now + dram_ii_;
      dram_busy_ += dram_ii_;
    } else if (cls != FuClass::None) {
      const std::uint64_t occupy =
          in.op == Opcode::BCONV ? lat_[i] : hw_.op_timing(in.op, t_.n).ii;
      *unit = now + occupy;
      busy_[idx(used)] += occupy;
      if (mems) {
        dram_free_ = now + mems * dram_ii_;
        dram_busy_ += mems * dram_ii_;
        end = std::max(end, now + hw_.dram_latency + mems * dram_ii_);
      }
      if (in.op == Opcode::MAC && used == FuClass::Ntt) ++macs_on_ntt_;
    }
    end_[i] = end;
    issued_[i] = true;
    unit_of_[i] = cls == FuClass::Dram ? FuClass::Dram : used;
    const std::uint64_t bytes = static_cast<std::uint64_t>(t_.n) * 8;
    for (const auto* ops : {&in.src, &in.dst}) {
      for (const auto& o : *ops) {
        if (o.kind != OperandKind::Mem) continue;
        if (in.op == Opcode::LOAD) traffic_.load_bytes += bytes;
        else if (in.op == Opcode::STORE) traffic_.store_bytes += bytes;
        else traffic_.stream_bytes += bytes;
        if (is_spill(t_, o.addr)) traffic_.spill_bytes += bytes;
      }
    }
    for (const auto& o : in.dst) {
      if (o.kind == OperandKind::Fifo) open_fifos_.push_back(i);
    }
    std::erase_if(open_fifos_, [&](std::size_t prod) {
      const auto cons = fifo_consumer_[prod];
      return cons != kNone && issued_[cons] && end_[cons] <= now;
    });
    for (auto s : succ_[i]) {
      if (--pending_[s] == 0) est_[s] = compiler::earliest_start(g_, s, start_, end_, hw_.pipeline_depth);
    }
  }

  std::uint64_t next_event(std::uint64_t now, std::size_t head) const {
    std::uint64_t next = kNever;
    auto consider = [&](std::uint64_t v) {
      if (v > now) next = std::min(next, v);
    };
    const std::size_t limit = std::min(n_, head + hw_.window);
    for (std::size_t i = head; i < limit; ++i) {
      if (!issued_[i] && pending_[i] == 0) consider(est_[i]);
    }
    for (const auto& us : units_) {
      for (auto u : us) consider(u);
    }
    consider(dram_free_);
    return next == kNever ? now + 1 : next;
  }

  std::size_t peak_fifo() const {
    std::vector<std::pair<std::uint64_t, int>> ev;
    for (std::size_t i = 0; i < n_; ++i) {
      for (const auto& o : t_.code[i].dst) {
        if (o.kind != OperandKind::Fifo) continue;
        const auto cons = fifo_consumer_[i];
        ev.emplace_back(start_[i], +1);
        ev.emplace_back(cons == kNone ? end_[i] : end_[cons], -1);
      }
    }
    std::sort(ev.begin(), ev.end());
    std::size_t peak = 0;
    std::ptrdiff_t cur = 0;
    for (const auto& [time, d] : ev) {
      cur += d;
      peak = std::max(peak, static_cast<std::size_t>(std::max<std::ptrdiff_t>(cur, 0)));
    }
    return peak;
  }

  SimReport report() const {
    SimReport r;
    r.n = t_.n;
    r.instructions = n_;
    for (std::size_t i = 0; i < n_; ++i) r.cycles = std::max(r.cycles, end_[i]);
    r.critical_path = compiler::critical_path(t_, g_, hw_).makespan;
    r.dram = traffic_;
    r.dram.busy_cycles = dram_busy_;
    r.dram_bound = static_cast<std::uint64_t>(
        std::ceil(static_cast<double>(r.dram.total()) / hw_.dram_bw));
    std::uint64_t busy_total = 0, capacity = 0;
    for (auto c : kCompute) {
      FuStats f;
      f.unit = c;
      f.count = hw_.fu_count(c);
      f.busy = busy_[idx(c)];
      if (r.cycles) {
        f.utilization = std::min(1.0, static_cast<double>(f.busy) /
                                          (static_cast<double>(r.cycles) * f.count));
      }
      busy_total += f.busy;
      capacity += f.count;
      r.fu.push_back(f);
    }
    if (r.cycles) {
      r.fu_utilization = std::min(1.0, static_cast<double>(busy_total) /
                                           (static_cast<double>(r.cycles) * capacity));
      r.dram.utilization =
          std::min(1.0, static_cast<double>(dram_busy_) / static_cast<double>(r.cycles));
    }
    r.bank_conflicts = conflicts_;
    r.peak_fifo = peak_fifo();
    r.macs_on_ntt = macs_on_ntt_;
    if (opt_.trace) {
      r.trace.reserve(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        r.trace.push_back({i, t_.code[i].op, unit_of_[i], start_[i], end_[i]});
      }
    }
    return r;
  }

  const Program& t_;
  const HardwareDescription& hw_;
  const SimOptions& opt_;
  compiler::DepGraph g_;
  std::size_t n_;
  std::vector<std::vector<std::size_t>> succ_;
  std::vector<std::size_t> pending_;
  std::vector<std::uint64_t> lat_, start_, end_, est_;
  std::vector<bool> issued_;
  std::vector<FuClass> unit_of_;
  std::vector<std::size_t> fifo_consumer_;
  std::vector<std::size_t> open_fifos_;
  std::vector<std::uint64_t> units_[6];
  std::uint64_t busy_[6] = {};
  std::uint64_t dram_free_ = 0, dram_busy_ = 0, dram_ii_ = 0;
  std::map<std::size_t, std::size_t> bank_use_;
  std::uint64_t conflicts_ = 0;
  std::uint64_t scratch_ = 0;
  std::size_t macs_on_ntt_ = 0;
  int last_side_ = 1;
  DramTraffic traffic_;
};

}  // namespace

SimReport simulate(const Program& p, const HardwareDescription& hw, const SimOptions& opt) {
  try {
    hw.validate();
  } catch (const Error& e) {
    throw SimError(std::string("hardware: ") + e.what());
  }
  Program t;
  try {
    isa::validate(p);
    t = expand_trace(p, opt.max_steps);
  } catch (const SimError&) {
    throw;
  } catch (const Error& e) {
    throw SimError(e.what());
  }
  check_resources(t, hw);
  return Scoreboard(t, hw, opt).run();
}

std::string to_json(const SimReport& r, int indent) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["instructions"] = r.instructions;
  j["cycles"] = r.cycles;
  j["critical_path"] = r.critical_path;
  j["dram_bound"] = r.dram_bound;
  auto fu = nlohmann::ordered_json::object();
  for (const auto& f : r.fu) {
    fu[compiler::to_string(f.unit)] = {
        {"count", f.count}, {"busy", f.busy}, {"utilization", f.utilization}};
  }
  j["fu"] = fu;
  j["fu_utilization"] = r.fu_utilization;
  j["dram"] = {{"load_bytes", r.dram.load_bytes},
               {"store_bytes", r.dram.store_bytes},
               {"stream_bytes", r.dram.stream_bytes},
               {"spill_bytes", r.dram.spill_bytes},
               {"total_bytes", r.dram.total()},
               {"busy_cycles", r.dram.busy_cycles},
               {"utilization", r.dram.utilization}};
  j["bank_conflicts"] = r.bank_conflicts;
  j["peak_fifo"] = r.peak_fifo;
  j["macs_on_ntt"] = r.macs_on_ntt;
  if (!r.trace.empty()) {
    auto tr = nlohmann::ordered_json::array();
    for (const auto& e : r.trace) {
      tr.push_back({{"index", e.index},
                    {"op", isa::mnemonic(e.op)},
                    {"unit", compiler::to_string(e.unit)},
                    {"issue", e.issue},
                    {"complete", e.complete}});
    }
    j["trace"] = std::move(tr);
  }
  return j.dump(indent);
}

std::string to_text(const SimReport& r) {
  std::ostringstream os;
  os << "instructions   " << r.instructions << "\n"
     << "cycles         " << r.cycles << "\n"
     << "critical path  " << r.critical_path << "\n"
     << "dram bound     " << r.dram_bound << "\n";
  for (const auto& f : r.fu) {
    os << "fu " << std::left << std::setw(12) << compiler::to_string(f.unit) << f.count << " x, busy " << f.busy << ", util " << f.utilization << "\n";
  }
  os << "fu util        " << r.fu_utilization << "\n"
     << "dram bytes     " << r.dram.total() << " (load " << r.dram.load_bytes << ", store "
     << r.dram.store_bytes << ", stream " << r.dram.stream_bytes << ", spill "
     << r.dram.spill_bytes << ")\n"
     << "dram util      " << r.dram.utilization << "\n"
     << "bank conflicts " << r.bank_conflicts << "\n"
     << "peak fifo      " << r.peak_fifo << "\n"
     << "macs on ntt    " << r.macs_on_ntt << "\n";
  return os.str();
}

std::string trace_csv(const SimReport& r) {
  std::ostringstream os;
  os << "index,op,unit,issue,complete\n";
  for (const auto& e : r.trace) {
    os << e.index << ',' << isa::mnemonic(e.op) << ',' << compiler::to_string(e.unit) << ','
       << e.issue << ',' << e.complete << "\n";
  }
  return os.str();
}

}  // namespace effact::sim
