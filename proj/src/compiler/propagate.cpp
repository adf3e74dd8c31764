// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <optional>

#include "effact/compiler/passes.hpp"

namespace effact::compiler {

using isa::OperandKind;

namespace {

void rename_uses(Instruction& in, const std::vector<std::uint32_t>& alias) {
  for (auto& o : in.src) {
    if (o.kind == OperandKind::VReg) o.index = alias[o.index];
  }
}

// Removes pure instructions and scalar definitions nobody reads, to a
// fixpoint (one backward sweep suffices on straight-line code).
void remove_dead(Program& p) {
  std::vector<bool> used_vreg(p.vreg_names.size(), false);
  // Whether the value currently being walked back through is read.
  std::map<std::uint32_t, bool> sreg_live;
  std::vector<bool> dead(p.code.size(), false);
  for (std::size_t k = p.code.size(); k-- > 0;) {
    const auto& in = p.code[k];
    if (is_pure(in)) {
      bool any = false;
      for (const auto& o : in.dst) any = any || o.kind != OperandKind::VReg || used_vreg[o.index];
      if (!any) {
        dead[k] = true;
        continue;
      }
    } else if (in.op == Opcode::SET || in.op == Opcode::SADD || in.op == Opcode::SMUL) {
      const auto r = in.dst[0].index;
      auto it = sreg_live.find(r);
      if (it == sreg_live.end() || !it->second) {
        dead[k] = true;
        continue;
      }
      sreg_live[r] = false;
    }
    for (const auto& o : in.src) {
      if (o.kind == OperandKind::VReg) used_vreg[o.index] = true;
      if (o.kind == OperandKind::SReg) sreg_live[o.index] = true;
      if (o.kind == OperandKind::Mem && o.addr.sreg >= 0) {
        sreg_live[static_cast<std::uint32_t>(o.addr.sreg)] = true;
      }
    }
    for (const auto& o : in.dst) {
      if (o.kind == OperandKind::Mem && o.addr.sreg >= 0) {
        sreg_live[static_cast<std::uint32_t>(o.addr.sreg)] = true;
      }
    }
  }
  erase_marked(p, dead);
}

}  // namespace

Program propagate(const Program& in) {
  require_straight_line(in, "propagate");
  Program p = in;
  std::vector<std::uint32_t> alias(p.vreg_names.size());
  for (std::uint32_t v = 0; v < alias.size(); ++v) alias[v] = v;
  std::map<std::uint32_t, std::int64_t> known;
  std::vector<bool> dead(p.code.size(), false);

  auto fold_addr = [&](Operand& o) {
    if (o.kind != OperandKind::Mem || o.addr.sreg < 0) return;
    auto it = known.find(static_cast<std::uint32_t>(o.addr.sreg));
    if (it == known.end()) return;
    o.addr.offset += o.addr.scale * it->second;
    o.addr.sreg = -1;
    o.addr.scale = 0;
  };

  for (std::size_t k = 0; k < p.code.size(); ++k) {
    auto& ins = p.code[k];
    rename_uses(ins, alias);
    for (auto& o : ins.src) fold_addr(o);
    for (auto& o : ins.dst) fold_addr(o);
    switch (ins.op) {
      case Opcode::COPY:
        if (ins.src[0].kind == OperandKind::VReg && ins.dst[0].kind == OperandKind::VReg) {
          alias[ins.dst[0].index] = ins.src[0].index;
          dead[k] = true;
        }
        break;
      case Opcode::SET:
        known[ins.dst[0].index] = static_cast<std::int64_t>(ins.src[0].imm);
        break;
      case Opcode::SADD:
      case Opcode::SMUL: {
        const auto a = known.find(ins.src[0].index);
        std::optional<std::int64_t> b;
        if (ins.src[1].kind == OperandKind::Imm) {
          b = static_cast<std::int64_t>(ins.src[1].imm);
        } else if (auto it = known.find(ins.src[1].index); it != known.end()) {
          b = it->second;
        }
        const auto r = ins.dst[0].index;
        if (a != known.end() && b) {
          const std::int64_t v = ins.op == Opcode::SADD ? a->second + *b : a->second * *b;
          ins.op = Opcode::SET;
          ins.src = {Operand::immediate(static_cast<isa::Word>(v))};
          known[r] = v;
        } else {
          known.erase(r);
        }
        break;
      }
      default: break;
    }
  }
  erase_marked(p, dead);
  remove_dead(p);
  return p;
}

}  // namespace effact::compiler
