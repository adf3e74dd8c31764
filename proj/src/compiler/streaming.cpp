// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>

#include "effact/compiler/passes.hpp"

namespace effact::compiler {

using isa::Address;
using isa::OperandKind;

namespace {

bool may_alias(const Address& a, const Address& b) {
  if (a.symbol != b.symbol) return false;
  if (a.sreg < 0 && b.sreg < 0) return a.offset == b.offset;
  if (a.sreg == b.sreg && a.scale == b.scale) return a.offset == b.offset;
  return true;
}

std::uint64_t reg_key(const Operand& o) {
  return (static_cast<std::uint64_t>(o.kind) << 32) | o.index;
}

struct Value {
  std::size_t def = 0;
  std::size_t dst = 0;
  std::vector<std::pair<std::size_t, std::size_t>> uses;
};

class Streamer {
 public:
  Streamer(Program& p, const HardwareDescription& hw, StreamStats& st)
      : p_(p), hw_(hw), st_(st), dead_(p.code.size(), false) {}

  void loads() {
    analyze();
    std::vector<bool> streamed(p_.code.size(), false);
    for (std::size_t i = 0; i < p_.code.size(); ++i) {
      for (const auto& o : p_.code[i].src) streamed[i] = streamed[i] || o.kind == OperandKind::Mem;
    }
    for (const auto& v : values_) {
      const auto& ld = p_.code[v.def];
      if (dead_[v.def] || ld.op != Opcode::LOAD || v.uses.size() != 1) continue;
      const auto [x, k] = v.uses[0];
      const auto& use = p_.code[x];
      if (use.op == Opcode::LOAD || use.op == Opcode::STORE || streamed[x]) continue;
      const Address& a = ld.src[0].addr;
      if (!clear_between(v.def, x, a, false)) continue;
      p_.code[x].src[k] = ld.src[0];
      streamed[x] = true;
      dead_[v.def] = true;
      ++st_.loads;
    }
  }

  void stores() {
    analyze();
    for (const auto& v : values_) {
      const auto& prod = p_.code[v.def];
      if (dead_[v.def] || v.uses.size() != 1) continue;
      const auto [s, k] = v.uses[0];
      const auto& st = p_.code[s];
      if (st.op != Opcode::STORE || prod.op == Opcode::LOAD || prod.dst.size() != 1) continue;
      if (prod.op == Opcode::BCONV) continue;
      const Address& b = st.dst[0].addr;
      if (!clear_between(v.def, s, b, true)) continue;
      p_.code[v.def].dst[0] = st.dst[0];
      dead_[s] = true;
      ++st_.stores;
    }
  }

  void fifos() {
    analyze();
    std::vector<std::size_t> busy_until(hw_.fifo_depth, 0);
    std::vector<bool> has_any(hw_.fifo_depth, false);
    for (const auto& v : values_) {
      const auto& prod = p_.code[v.def];
      if (dead_[v.def] || v.uses.size() != 1 || prod.dst.size() != 1) continue;
      if (prod.dst[0].kind != OperandKind::VReg) continue;
      if (prod.op == Opcode::LOAD || prod.op == Opcode::BCONV) continue;
      const auto [y, k] = v.uses[0];
      const auto& cons = p_.code[y];
      if (cons.op == Opcode::STORE || cons.op == Opcode::BCONV) continue;
      if (y - v.def > hw_.window) continue;
      std::size_t ch = hw_.fifo_depth;
      for (std::size_t c = 0; c < hw_.fifo_depth; ++c) {
        if (!has_any[c] || busy_until[c] <= v.def) {
          ch = c;
          break;
        }
      }
      if (ch == hw_.fifo_depth) continue;
      busy_until[ch] = y;
      has_any[ch] = true;
      const Operand f = Operand::fifo(static_cast<std::uint32_t>(ch));
      p_.code[v.def].dst[0] = f;
      p_.code[y].src[k] = f;
      ++st_.fifos;
    }
  }

  void finish() { erase_marked(p_, dead_); }

 private:
  void analyze() {
    values_.clear();
    std::map<std::uint64_t, std::size_t> current;
    for (std::size_t i = 0; i < p_.code.size(); ++i) {
      if (dead_[i]) continue;
      const auto& in = p_.code[i];
      for (std::size_t k = 0; k < in.src.size(); ++k) {
        const auto& o = in.src[k];
        if (o.kind != OperandKind::VReg && o.kind != OperandKind::Slot) continue;
        auto it = current.find(reg_key(o));
        if (it != current.end()) values_[it->second].uses.emplace_back(i, k);
      }
      for (std::size_t d = 0; d < in.dst.size(); ++d) {
        const auto& o = in.dst[d];
        if (o.is_reg()) {
          current[reg_key(o)] = values_.size();
          values_.push_back({i, d, {}});
          if (o.kind == OperandKind::Fifo) values_.back().uses.resize(2);  // never a candidate
        }
      }
    }
  }

  // No live instruction strictly between `from` and `to` touches memory that
  // may alias `a` in a conflicting way, or redefines a's scalar register.
  bool clear_between(std::size_t from, std::size_t to, const Address& a, bool moving_write) const {
    for (std::size_t i = from + 1; i < to; ++i) {
      if (dead_[i]) continue;
      const auto& in = p_.code[i];
      for (const auto& o : in.dst) {
        if (o.kind == OperandKind::Mem && may_alias(o.addr, a)) return false;
        if (o.kind == OperandKind::SReg && a.sreg >= 0 &&
            o.index == static_cast<std::uint32_t>(a.sreg)) {
          return false;
        }
      }
      if (moving_write) {
        for (const auto& o : in.src) {
          if (o.kind == OperandKind::Mem && may_alias(o.addr, a)) return false;
        }
      }
    }
    return true;
  }

  Program& p_;
  const HardwareDescription& hw_;
  StreamStats& st_;
  std::vector<bool> dead_;
  std::vector<Value> values_;
};

}  // namespace

Program merge_streaming(const Program& in, const HardwareDescription& hw, bool fifos,
                        StreamStats* stats) {
  require_straight_line(in, "merge_streaming");
  Program p = in;
  StreamStats local;
  StreamStats& st = stats ? *stats : local;
  st = {};
  Streamer s(p, hw, st);
  s.loads();
  s.stores();
  if (fifos) s.fifos();
  s.finish();
  return p;
}

}  // namespace effact::compiler
