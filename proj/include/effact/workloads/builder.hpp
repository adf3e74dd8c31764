// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "effact/isa/program.hpp"

namespace effact::workloads {

using isa::MontForm;
using isa::Operand;
using isa::Word;

/// Appends SSA IR instructions to a program. Every vector method takes the
/// program modulus index it runs under and returns the fresh destination.
class IrBuilder {
 public:
  IrBuilder(std::size_t n, std::vector<Word> moduli);

  isa::Program& program() { return p_; }
  isa::Program take() { return std::move(p_); }

  /// Declares `name` with at least `size` entries and returns its index.
  std::uint32_t symbol(const std::string& name, std::size_t size);
  static Operand mem(std::uint32_t symbol, std::int64_t offset);

  Operand load(std::uint32_t mod, std::uint32_t symbol, std::int64_t offset);
  void store(std::uint32_t mod, const Operand& v, std::uint32_t symbol, std::int64_t offset);
  Operand copy(std::uint32_t mod, const Operand& v);
  Operand ntt(std::uint32_t mod, const Operand& v);
  Operand intt(std::uint32_t mod, const Operand& v);
  Operand mul(std::uint32_t mod, const Operand& a, const Operand& b);
  Operand mul_imm(std::uint32_t mod, const Operand& a, Word value, MontForm form);
  Operand add(std::uint32_t mod, const Operand& a, const Operand& b);
  Operand sub(std::uint32_t mod, const Operand& a, const Operand& b);
  Operand add_imm(std::uint32_t mod, const Operand& a, Word value, MontForm form);
  Operand sub_imm(std::uint32_t mod, const Operand& a, Word value, MontForm form);
  Operand mac(std::uint32_t mod, const Operand& acc, const Operand& a, const Operand& b);
  Operand automorphism(std::uint32_t mod, const Operand& v, std::int64_t step);
  std::vector<Operand> bconv(const std::vector<Operand>& src,
                             const std::vector<std::uint32_t>& from,
                             const std::vector<std::uint32_t>& to);

  /// NM <-> SM conversions as multiplications by 1.
  Operand to_nm(std::uint32_t mod, const Operand& v) { return mul_imm(mod, v, 1, MontForm::NM); }
  Operand to_sm(std::uint32_t mod, const Operand& v) { return mul_imm(mod, v, 1, MontForm::DM); }

  /// Name prefix for subsequently created registers.
  void set_prefix(std::string prefix) { prefix_ = std::move(prefix); }
  void emit(isa::Instruction in) { p_.code.push_back(std::move(in)); }

 private:
  Operand fresh();
  Operand unary(isa::Opcode op, std::uint32_t mod, std::vector<Operand> src,
                std::uint8_t flags = 0);

  isa::Program p_;
  std::string prefix_ = "v";
  std::size_t counter_ = 0;
};

/// Limbs of one polynomial held in registers, with their modulus indices.
struct LimbVec {
  std::vector<Operand> v;
  std::vector<std::uint32_t> mod;
  std::size_t size() const { return v.size(); }
};

}  // namespace effact::workloads
