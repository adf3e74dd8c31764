// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <tuple>
#include <utility>

#include "effact/compiler/passes.hpp"

namespace effact::compiler {

using isa::OperandKind;
namespace flag = isa::flag;

namespace {

constexpr std::uint8_t kSemanticFlags = flag::kDefer | flag::kAbsorb | flag::kSub;

using OperandKey = std::tuple<OperandKind, std::uint32_t, isa::Word, int, std::uint32_t,
                              std::int32_t, std::int64_t, std::int64_t, std::size_t>;
using ExprKey = std::tuple<Opcode, std::uint8_t, std::uint32_t, std::vector<std::uint32_t>,
                           std::vector<std::uint32_t>, std::vector<OperandKey>>;

}  // namespace

Program pre(const Program& in) {
  require_straight_line(in, "pre");
  Program p = in;
  std::vector<std::uint32_t> alias(p.vreg_names.size());
  for (std::uint32_t v = 0; v < alias.size(); ++v) alias[v] = v;
  std::map<std::uint32_t, std::size_t> sreg_version;
  std::map<ExprKey, std::size_t> available;  // expression -> defining instruction
  // Available loads per symbol, dropped when a may-alias store is seen.
  std::map<std::uint32_t, std::vector<ExprKey>> loads_of;
  std::vector<bool> dead(p.code.size(), false);

  auto operand_key = [&](const Operand& o) {
    const auto& a = o.addr;
    const std::size_t ver =
        a.sreg >= 0 ? sreg_version[static_cast<std::uint32_t>(a.sreg)] : 0;
    if (o.kind == OperandKind::Mem) {
      return OperandKey{o.kind, 0, 0, 0, a.symbol, a.sreg, a.scale, a.offset, ver};
    }
    if (o.kind == OperandKind::Imm) {
      return OperandKey{o.kind, 0, o.imm, static_cast<int>(o.form), 0, -1, 0, 0, 0};
    }
    return OperandKey{o.kind, o.index, 0, 0, 0, -1, 0, 0, 0};
  };

  for (std::size_t k = 0; k < p.code.size(); ++k) {
    auto& ins = p.code[k];
    for (auto& o : ins.src) {
      if (o.kind == OperandKind::VReg) o.index = alias[o.index];
    }
    const bool is_load = ins.op == Opcode::LOAD && ins.dst[0].kind == OperandKind::VReg;
    const bool candidate = is_load || (is_pure(ins) && ins.dst[0].kind == OperandKind::VReg);

    // Stores and streaming sinks invalidate may-alias loads.
    for (const auto& o : ins.dst) {
      if (o.kind != OperandKind::Mem) continue;
      auto& list = loads_of[o.addr.symbol];
      for (const auto& key : list) available.erase(key);
      list.clear();
    }
    if (candidate) {
      std::vector<OperandKey> srcs;
      for (const auto& o : ins.src) srcs.push_back(operand_key(o));
      const bool commutes = ins.op == Opcode::MMUL ||
                            (ins.op == Opcode::MMAD && !ins.has(flag::kSub));
      if (commutes && srcs[1] < srcs[0]) std::swap(srcs[0], srcs[1]);
      if (ins.op == Opcode::MAC && srcs[2] < srcs[1]) std::swap(srcs[1], srcs[2]);
      ExprKey key{ins.op, static_cast<std::uint8_t>(ins.flags & kSemanticFlags), ins.modulus,
                  ins.from, ins.to, std::move(srcs)};
      auto it = available.find(key);
      if (it != available.end()) {
        const auto& orig = p.code[it->second];
        for (std::size_t d = 0; d < ins.dst.size(); ++d) {
          alias[ins.dst[d].index] = orig.dst[d].index;
        }
        dead[k] = true;
        continue;
      }
      bool all_vregs = true;
      for (const auto& o : ins.dst) all_vregs = all_vregs && o.kind == OperandKind::VReg;
      if (all_vregs) {
        available.emplace(key, k);
        if (is_load) loads_of[ins.src[0].addr.symbol].push_back(key);
      }
    }
    for (const auto& o : ins.dst) {
      if (o.kind == OperandKind::SReg) ++sreg_version[o.index];
    }
  }
  erase_marked(p, dead);
  return p;
}

}  // namespace effact::compiler
