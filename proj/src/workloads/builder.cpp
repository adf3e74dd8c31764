// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/workloads/builder.hpp"

#include "effact/error.hpp"

namespace effact::workloads {

using isa::Instruction;
using isa::Opcode;

IrBuilder::IrBuilder(std::size_t n, std::vector<Word> moduli) {
  p_.form = isa::Form::SsaIr;
  p_.n = n;
  p_.moduli = std::move(moduli);
}

std::uint32_t IrBuilder::symbol(const std::string& name, std::size_t size) {
  if (auto s = p_.find_symbol(name)) {
    auto& sym = p_.symbols[*s];
    sym.size = std::max(sym.size, size);
    return *s;
  }
  return p_.add_symbol(name, size);
}

Operand IrBuilder::mem(std::uint32_t symbol, std::int64_t offset) {
  isa::Address a;
  a.symbol = symbol;
  a.offset = offset;
  return Operand::mem(a);
}

Operand IrBuilder::fresh() {
  return Operand::vreg(p_.add_vreg(prefix_ + "." + std::to_string(counter_++)));
}

Operand IrBuilder::unary(Opcode op, std::uint32_t mod, std::vector<Operand> src,
                         std::uint8_t flags) {
  if (mod >= p_.moduli.size()) throw InvalidArgument("modulus index out of range");
  Instruction in;
  in.op = op;
  in.modulus = mod;
  in.src = std::move(src);
  in.flags = flags;
  Operand d = fresh();
  in.dst = {d};
  p_.code.push_back(std::move(in));
  return d;
}

Operand IrBuilder::load(std::uint32_t mod, std::uint32_t symbol, std::int64_t offset) {
  return unary(Opcode::LOAD, mod, {mem(symbol, offset)});
}

void IrBuilder::store(std::uint32_t mod, const Operand& v, std::uint32_t symbol,
                      std::int64_t offset) {
  Instruction in;
  in.op = Opcode::STORE;
  in.modulus = mod;
  in.src = {v};
  in.dst = {mem(symbol, offset)};
  p_.code.push_back(std::move(in));
}

Operand IrBuilder::copy(std::uint32_t mod, const Operand& v) {
  return unary(Opcode::COPY, mod, {v});
}
Operand IrBuilder::ntt(std::uint32_t mod, const Operand& v) {
  return unary(Opcode::NTT, mod, {v});
}
Operand IrBuilder::intt(std::uint32_t mod, const Operand& v) {
  return unary(Opcode::INTT, mod, {v});
}
Operand IrBuilder::mul(std::uint32_t mod, const Operand& a, const Operand& b) {
  return unary(Opcode::MMUL, mod, {a, b});
}
Operand IrBuilder::mul_imm(std::uint32_t mod, const Operand& a, Word value, MontForm form) {
  return unary(Opcode::MMUL, mod, {a, Operand::immediate(value, form)});
}
Operand IrBuilder::add(std::uint32_t mod, const Operand& a, const Operand& b) {
  return unary(Opcode::MMAD, mod, {a, b});
}
Operand IrBuilder::sub(std::uint32_t mod, const Operand& a, const Operand& b) {
  return unary(Opcode::MMAD, mod, {a, b}, isa::flag::kSub);
}
Operand IrBuilder::add_imm(std::uint32_t mod, const Operand& a, Word value, MontForm form) {
  return unary(Opcode::MMAD, mod, {a, Operand::immediate(value, form)});
}
Operand IrBuilder::sub_imm(std::uint32_t mod, const Operand& a, Word value, MontForm form) {
  return unary(Opcode::MMAD, mod, {a, Operand::immediate(value, form)}, isa::flag::kSub);
}
Operand IrBuilder::mac(std::uint32_t mod, const Operand& acc, const Operand& a,
                       const Operand& b) {
  return unary(Opcode::MAC, mod, {acc, a, b});
}
Operand IrBuilder::automorphism(std::uint32_t mod, const Operand& v, std::int64_t step) {
  return unary(Opcode::AUTO, mod, {v, Operand::immediate(static_cast<Word>(step))});
}

std::vector<Operand> IrBuilder::bconv(const std::vector<Operand>& src,
                                      const std::vector<std::uint32_t>& from,
                                      const std::vector<std::uint32_t>& to) {
  if (src.size() != from.size() || src.empty() || to.empty()) {
    throw InvalidArgument("bconv: operand and basis sizes disagree");
  }
  Instruction in;
  in.op = Opcode::BCONV;
  in.modulus = to.front();
  in.src = src;
  in.from = from;
  in.to = to;
  std::vector<Operand> out;
  for (std::size_t i = 0; i < to.size(); ++i) out.push_back(fresh());
  in.dst = out;
  p_.code.push_back(std::move(in));
  return out;
}

}  // namespace effact::workloads
