// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <limits>
#include <map>
#include <optional>

#include "effact/compiler/passes.hpp"
#include "effact/error.hpp"

namespace effact::compiler {

using isa::OperandKind;

namespace {

constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
constexpr const char* kSpill = "__spill";

class Allocator {
 public:
  Allocator(const Program& in, const HardwareDescription& hw)
      : in_(in), slots_(hw.slots), holder_(hw.slots, kFree) {
    const std::size_t nv = in.vreg_names.size();
    uses_.resize(nv);
    for (std::size_t pc = 0; pc < in.code.size(); ++pc) {
      for (const auto& o : in.code[pc].src) {
        if (o.kind == OperandKind::VReg &&
            (uses_[o.index].empty() || uses_[o.index].back() != pc)) {
          uses_[o.index].push_back(pc);
        }
      }
    }
    cursor_.assign(nv, 0);
    slot_of_.assign(nv, kFree);
    spill_of_.assign(nv, kFree);
  }

  Program run(AllocStats& st) {
    Program p = in_;
    p.form = isa::Form::Allocated;
    p.code.clear();
    p.issue.clear();
    out_ = &p;
    const bool has_issue = in_.issue.size() == in_.code.size();
    for (std::size_t i = 0; i < in_.code.size(); ++i) {
      issue_ = has_issue ? in_.issue[i] : 0;
      Instruction ins = in_.code[i];
      std::vector<std::uint32_t> needed;
      for (const auto& o : ins.src) {
        if (o.kind == OperandKind::VReg &&
            std::find(needed.begin(), needed.end(), o.index) == needed.end()) {
          needed.push_back(o.index);
        }
      }
      if (needed.size() > slots_) {
        throw CompileError("alloc: instruction " + std::to_string(i) + " reads " +
                           std::to_string(needed.size()) + " registers but only " +
                           std::to_string(slots_) + " slots exist");
      }
      for (auto v : needed) {
        if (slot_of_[v] != kFree) continue;
        if (spill_of_[v] == kFree) {
          throw CompileError("alloc: %" + in_.vreg_names[v] + " used before definition");
        }
        const std::size_t s = take(i, needed);
        Instruction ld;
        ld.op = Opcode::LOAD;
        ld.dst = {Operand::slot(static_cast<std::uint32_t>(s))};
        ld.src = {spill_operand(v)};
        ld.modulus = modulus_of(v);
        emit(std::move(ld));
        ++st.spill_loads;
        bind(v, s);
      }
      for (auto& o : ins.src) {
        if (o.kind == OperandKind::VReg) o = Operand::slot(static_cast<std::uint32_t>(slot_of_[o.index]));
      }
      for (auto v : needed) {
        while (cursor_[v] < uses_[v].size() && uses_[v][cursor_[v]] <= i) ++cursor_[v];
        if (cursor_[v] == uses_[v].size()) release(v);
      }
      std::vector<std::uint32_t> dead_dsts;
      std::vector<std::uint32_t> mine;
      for (auto& o : ins.dst) {
        if (o.kind != OperandKind::VReg) continue;
        const auto v = o.index;
        modulus_[v] = ins.op == Opcode::BCONV ? ins.to[&o - ins.dst.data()] : ins.modulus;
        const std::size_t s = take(i, mine);
        bind(v, s);
        mine.push_back(v);
        if (uses_[v].empty()) dead_dsts.push_back(v);
        o = Operand::slot(static_cast<std::uint32_t>(s));
      }
      emit(std::move(ins));
      for (auto v : dead_dsts) release(v);
    }
    st.spill_stores = spills_;
    st.slots_used = used_;
    if (spills_) p.add_symbol(kSpill, spills_);
    return p;
  }

 private:
  static constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();

  void emit(Instruction ins) {
    out_->code.push_back(std::move(ins));
    out_->issue.push_back(issue_);
  }

  std::uint32_t modulus_of(std::uint32_t v) const { return modulus_.at(v); }

  Operand spill_operand(std::uint32_t v) {
    if (!spill_symbol_) spill_symbol_ = out_->add_symbol(kSpill, 0);
    isa::Address a;
    a.symbol = *spill_symbol_;
    a.offset = static_cast<std::int64_t>(spill_of_[v]);
    return Operand::mem(a);
  }

  void bind(std::uint32_t v, std::size_t s) {
    slot_of_[v] = s;
    holder_[s] = v;
    used_ = std::max(used_, s + 1);
  }

  void release(std::uint32_t v) {
    if (slot_of_[v] == kFree) return;
    holder_[slot_of_[v]] = kFree;
    slot_of_[v] = kFree;
  }

  std::size_t next_use(std::uint32_t v, std::size_t i) const {
    for (std::size_t k = cursor_[v]; k < uses_[v].size(); ++k) {
      if (uses_[v][k] > i) return uses_[v][k];
    }
    return kNever;
  }

  // A free slot, or one vacated by evicting the resident value whose next
  // use is furthest away (not in `keep`).
  std::size_t take(std::size_t i, const std::vector<std::uint32_t>& keep) {
    for (std::size_t s = 0; s < slots_; ++s) {
      if (holder_[s] == kFree) return s;
    }
    std::size_t victim = kFree, far = 0;
    for (std::size_t s = 0; s < slots_; ++s) {
      const auto v = static_cast<std::uint32_t>(holder_[s]);
      if (std::find(keep.begin(), keep.end(), v) != keep.end()) continue;
      const std::size_t nu = next_use(v, i);
      if (victim == kFree || nu > far) {
        victim = s;
        far = nu;
      }
    }
    if (victim == kFree) throw CompileError("alloc: no slot can be freed");
    const auto v = static_cast<std::uint32_t>(holder_[victim]);
    if (spill_of_[v] == kFree) {
      spill_of_[v] = spills_++;
      Instruction st;
      st.op = Opcode::STORE;
      st.dst = {spill_operand(v)};
      st.src = {Operand::slot(static_cast<std::uint32_t>(victim))};
      st.modulus = modulus_of(v);
      emit(std::move(st));
    }
    release(v);
    return victim;
  }

  const Program& in_;
  std::size_t slots_;
  std::vector<std::size_t> holder_;
  std::vector<std::vector<std::size_t>> uses_;
  std::vector<std::size_t> cursor_, slot_of_, spill_of_;
  std::map<std::uint32_t, std::uint32_t> modulus_;
  std::optional<std::uint32_t> spill_symbol_;
  std::size_t spills_ = 0, used_ = 0;
  std::uint64_t issue_ = 0;
  Program* out_ = nullptr;
};

}  // namespace

Program alloc_sram(const Program& in, const HardwareDescription& hw, AllocStats* stats) {
  require_straight_line(in, "alloc");
  if (hw.slots < 2) throw CompileError("alloc: slot count must be at least 2");
  AllocStats local;
  AllocStats& st = stats ? *stats : local;
  st = {};
  Program p = Allocator(in, hw).run(st);
  if (!p.find_symbol(kSpill)) return p;
  p.symbols[p.symbol_index(kSpill)].size = st.spill_stores;
  return p;
}

}  // namespace effact::compiler
