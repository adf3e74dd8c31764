// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <string>

#include "effact/compiler/passes.hpp"
#include "effact/error.hpp"
#include "effact/kernels/bconv.hpp"

namespace effact::compiler {

using isa::OperandKind;
namespace flag = isa::flag;

namespace {

std::string base_name(const Program& p, const Operand& o, std::size_t group) {
  if (o.kind == OperandKind::VReg && !p.vreg_names[o.index].empty()) {
    return p.vreg_names[o.index];
  }
  return "g" + std::to_string(group);
}

}  // namespace

Program lower(const Program& in) {
  require_straight_line(in, "lower");
  Program p = in;
  p.code.clear();
  p.issue.clear();
  std::vector<rns::Modulus> mods;
  std::map<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>,
           kernels::BconvTables>
      tables;

  for (const auto& ins : in.code) {
    if (ins.op != Opcode::BCONV) {
      p.code.push_back(ins);
      continue;
    }
    if (mods.empty()) {
      for (auto q : p.moduli) mods.emplace_back(q, p.n);
    }
    auto key = std::make_pair(ins.from, ins.to);
    auto it = tables.find(key);
    if (it == tables.end()) {
      std::vector<rns::Modulus> f, t;
      for (auto m : ins.from) f.push_back(mods.at(m));
      for (auto m : ins.to) t.push_back(mods.at(m));
      try {
        it = tables.emplace(key, kernels::BconvTables(rns::RnsBasis(std::move(f)),
                                                      rns::RnsBasis(std::move(t))))
                 .first;
      } catch (const Error& e) {
        throw CompileError(std::string("lower: bconv: ") + e.what());
      }
    }
    const auto& tb = it->second;
    const auto group = static_cast<std::int32_t>(p.groups.size());
    p.groups.push_back({ins.from, ins.to});
    const std::string base = base_name(in, ins.dst[0], p.groups.size() - 1);

    auto emit = [&](Opcode op, Operand dst, std::vector<Operand> src, std::uint32_t m,
                    std::uint8_t f) {
      isa::Instruction x;
      x.op = op;
      x.dst = {dst};
      x.src = std::move(src);
      x.modulus = m;
      x.flags = f;
      x.group = group;
      p.code.push_back(std::move(x));
    };

    std::vector<Operand> t(ins.src.size());
    for (std::size_t j = 0; j < ins.src.size(); ++j) {
      const auto& qj = tb.from[j];
      t[j] = Operand::vreg(p.add_vreg(base + ".t" + std::to_string(j)));
      emit(Opcode::MMUL, t[j],
           {ins.src[j], Operand::immediate(qj.sm_decode(tb.qhat_inv_sm[j]), rns::MontForm::SM)},
           ins.from[j], flag::kBconv1);
    }
    for (std::size_t i = 0; i < ins.dst.size(); ++i) {
      const auto& pi = tb.to[i];
      const std::uint32_t m = ins.to[i];
      auto constant = [&](std::size_t j) {
        return Operand::immediate(pi.sm_decode(tb.qhat_mod_p_sm[i][j]), rns::MontForm::SM);
      };
      const std::size_t nc = ins.src.size();
      const std::string prefix = base + ".o" + std::to_string(i);
      Operand acc = nc == 1 ? ins.dst[i] : Operand::vreg(p.add_vreg(prefix + ".a0"));
      emit(Opcode::MMUL, acc, {t[0], constant(0)}, m, flag::kBconv2);
      for (std::size_t j = 1; j < nc; ++j) {
        const Operand prod = Operand::vreg(p.add_vreg(prefix + ".m" + std::to_string(j)));
        emit(Opcode::MMUL, prod, {t[j], constant(j)}, m, flag::kBconv2);
        const Operand next =
            j + 1 == nc ? ins.dst[i] : Operand::vreg(p.add_vreg(prefix + ".a" + std::to_string(j)));
        emit(Opcode::MMAD, next, {acc, prod}, m, flag::kBconv2);
        acc = next;
      }
    }
  }
  return p;
}

}  // namespace effact::compiler
