// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/compiler/passes.hpp"
#include "effact/error.hpp"
#include "effact/rns/modulus.hpp"

namespace effact::compiler {

using isa::OperandKind;
using rns::MontForm;
namespace flag = isa::flag;

namespace {

bool is_imm(const Operand& o, isa::Word v, MontForm f) {
  return o.kind == OperandKind::Imm && o.imm == v && o.form == f;
}

class Merger {
 public:
  Merger(Program& p, PeepholeStats& st) : p_(p), st_(st) { refresh(); }

  void refresh() {
    defs_ = vreg_defs(p_);
    uses_ = vreg_uses(p_);
    dead_.assign(p_.code.size(), false);
  }

  void finish() { erase_marked(p_, dead_); }

  // (a) per source limb of a conversion.
  void fold_inputs() {
    for (std::size_t k = 0; k < p_.code.size(); ++k) {
      auto& m = p_.code[k];
      if (m.op != Opcode::MMUL || !m.has(flag::kBconv1) || m.has(flag::kAbsorb)) continue;
      if (m.src[0].kind != OperandKind::VReg || m.src[1].kind != OperandKind::Imm ||
          m.src[1].form != MontForm::SM) {
        continue;
      }
      const auto conv = single_def_use(m.src[0].index);
      if (conv < 0) continue;
      auto& c = p_.code[conv];
      if (c.op != Opcode::MMUL || c.flags != 0 || c.modulus != m.modulus ||
          c.src[0].kind != OperandKind::VReg || !is_imm(c.src[1], 1, MontForm::NM)) {
        continue;
      }
      const auto intt = single_def_use(c.src[0].index);
      if (intt < 0) continue;
      auto& t = p_.code[intt];
      if (t.op != Opcode::INTT || t.has(flag::kDefer) || t.modulus != m.modulus) continue;

      const auto& q = modulus(m.modulus);
      t.flags |= flag::kDefer;
      m.src[0] = c.src[0];
      m.src[1] = Operand::immediate(rns::mul_mod(m.src[1].imm % q.q(), q.n_inv(), q.q()),
                                    MontForm::NM);
      m.flags |= flag::kAbsorb;
      dead_[conv] = true;
      ++st_.deferred;
    }
  }

  // (b) per conversion target.
  void fold_outputs() {
    for (std::size_t k = 0; k < p_.code.size(); ++k) {
      auto& s = p_.code[k];
      if (s.op != Opcode::MMUL || s.flags != 0 || s.src[0].kind != OperandKind::VReg ||
          !is_imm(s.src[1], 1, MontForm::DM) || s.dst[0].kind != OperandKind::VReg) {
        continue;
      }
      const auto root = single_def_use(s.src[0].index);
      if (root < 0 || !p_.code[root].has(flag::kBconv2) || p_.code[root].modulus != s.modulus) {
        continue;
      }
      std::vector<std::size_t> leaves;
      if (!collect(static_cast<std::size_t>(root), s.modulus, leaves)) continue;
      for (auto l : leaves) p_.code[l].src[1].form = MontForm::DM;
      // Uses of the converted value read the accumulation instead.
      const auto from = s.dst[0].index, to = s.src[0].index;
      for (const auto& [pc, idx] : uses_[from]) p_.code[pc].src[idx].index = to;
      dead_[k] = true;
      ++st_.folded_outputs;
    }
  }

  // (c) MMUL -> MMAD pairs.
  void fuse_mac() {
    for (std::size_t k = 0; k < p_.code.size(); ++k) {
      auto& a = p_.code[k];
      if (a.op != Opcode::MMAD || a.has(flag::kSub) || dead_[k]) continue;
      for (std::size_t side : {1, 0}) {
        const auto& prod_op = a.src[side];
        if (prod_op.kind != OperandKind::VReg) continue;
        if (a.src[1 - side].kind != OperandKind::VReg &&
            a.src[1 - side].kind != OperandKind::Slot) {
          continue;
        }
        const auto m = single_def_use(prod_op.index);
        if (m < 0 || dead_[m]) continue;
        const auto& mul = p_.code[m];
        if (mul.op != Opcode::MMUL || mul.has(flag::kAbsorb) || mul.modulus != a.modulus ||
            !memory_stable(mul, static_cast<std::size_t>(m), k)) {
          continue;
        }
        const Operand acc = a.src[1 - side];
        a.op = Opcode::MAC;
        a.src = {acc, mul.src[0], mul.src[1]};
        a.flags = static_cast<std::uint8_t>((a.flags & mul.flags) &
                                            (flag::kBconv1 | flag::kBconv2));
        dead_[m] = true;
        ++st_.macs;
        break;
      }
    }
  }

 private:
  // Memory sources of `mul` read the same data when moved from pc `from`
  // to pc `to`.
  bool memory_stable(const Instruction& mul, std::size_t from, std::size_t to) const {
    for (const auto& o : mul.src) {
      if (o.kind != OperandKind::Mem) continue;
      for (std::size_t i = from + 1; i < to; ++i) {
        if (dead_[i]) continue;
        for (const auto& d : p_.code[i].dst) {
          if (d.kind == OperandKind::Mem && d.addr.symbol == o.addr.symbol) return false;
          if (d.kind == OperandKind::SReg && o.addr.sreg >= 0 &&
              d.index == static_cast<std::uint32_t>(o.addr.sreg)) {
            return false;
          }
        }
      }
    }
    return true;
  }

  // Defining instruction of v when v has exactly one use, else -1.
  std::ptrdiff_t single_def_use(std::uint32_t v) const {
    if (uses_[v].size() != 1 || defs_[v] < 0 || dead_[defs_[v]]) return -1;
    const auto& d = p_.code[defs_[v]];
    if (d.dst.size() != 1) return -1;
    return defs_[v];
  }

  // Collects the product leaves of a step-2 accumulation tree rooted at k.
  bool collect(std::size_t k, std::uint32_t mod, std::vector<std::size_t>& leaves) const {
    const auto& in = p_.code[k];
    if (!in.has(flag::kBconv2) || in.modulus != mod) return false;
    if (in.op == Opcode::MMUL) {
      if (in.src[1].kind != OperandKind::Imm || in.src[1].form != MontForm::SM) return false;
      leaves.push_back(k);
      return true;
    }
    if (in.op != Opcode::MMAD || in.has(flag::kSub)) return false;
    for (const auto& o : in.src) {
      if (o.kind != OperandKind::VReg) return false;
      const auto d = single_def_use(o.index);
      if (d < 0 || !collect(static_cast<std::size_t>(d), mod, leaves)) return false;
    }
    return true;
  }

  const rns::Modulus& modulus(std::uint32_t m) {
    if (mods_.empty()) {
      for (auto q : p_.moduli) mods_.emplace_back(q, p_.n);
    }
    return mods_.at(m);
  }

  Program& p_;
  PeepholeStats& st_;
  std::vector<std::ptrdiff_t> defs_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> uses_;
  std::vector<bool> dead_;
  std::vector<rns::Modulus> mods_;
};

}  // namespace

Program peephole_merge(const Program& in, const PeepholeOptions& opt, PeepholeStats* stats) {
  require_straight_line(in, "peephole_merge");
  Program p = in;
  PeepholeStats local;
  PeepholeStats& st = stats ? *stats : local;
  st = {};
  if (opt.fold_conversions) {
    Merger m(p, st);
    m.fold_inputs();
    m.finish();
    Merger out(p, st);
    out.fold_outputs();
    out.finish();
  }
  if (opt.fuse_mac) {
    Merger m(p, st);
    m.fuse_mac();
    m.finish();
  }
  return p;
}

}  // namespace effact::compiler
