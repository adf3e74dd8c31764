// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "effact/rns/modulus.hpp"

namespace effact::isa {

using rns::MontForm;
using rns::Word;

enum class Opcode : std::uint8_t {
  MMUL,
  MMAD,
  MAC,
  NTT,
  INTT,
  AUTO,
  LOAD,
  STORE,
  COPY,
  BCONV,  // IR only; lowered to MMUL/MMAD
  SET,
  SADD,
  SMUL,
  BLT,
  BGE,
  JMP,
};

const char* mnemonic(Opcode op);
std::optional<Opcode> opcode_from_mnemonic(const std::string& s);
bool is_scalar(Opcode op);
bool is_vector(Opcode op);

namespace flag {
inline constexpr std::uint8_t kDefer = 1;    // INTT: skip the N^-1 scaling
inline constexpr std::uint8_t kAbsorb = 2;   // MMUL: may consume deferred data
inline constexpr std::uint8_t kSub = 4;      // MMAD: src0 - src1
inline constexpr std::uint8_t kBconv1 = 8;   // provenance: conversion step 1
inline constexpr std::uint8_t kBconv2 = 16;  // provenance: conversion step 2
}  // namespace flag

enum class OperandKind : std::uint8_t { None, VReg, Slot, Fifo, Mem, Imm, SReg, Label };

/// DRAM residue address: symbol base + sreg*scale + offset (sreg < 0: none).
struct Address {
  std::uint32_t symbol = 0;
  std::int32_t sreg = -1;
  std::int64_t scale = 0;
  std::int64_t offset = 0;
  bool operator==(const Address&) const = default;
};

struct Operand {
  OperandKind kind = OperandKind::None;
  std::uint32_t index = 0;  // vreg id, slot, fifo channel, sreg, label target
  Word imm = 0;             // logical value; AUTO steps stored two's complement
  MontForm form = MontForm::NM;
  Address addr;

  static Operand make(OperandKind k, std::uint32_t i = 0) {
    Operand o;
    o.kind = k;
    o.index = i;
    return o;
  }
  static Operand vreg(std::uint32_t id) { return make(OperandKind::VReg, id); }
  static Operand slot(std::uint32_t s) { return make(OperandKind::Slot, s); }
  static Operand fifo(std::uint32_t f) { return make(OperandKind::Fifo, f); }
  static Operand sreg(std::uint32_t r) { return make(OperandKind::SReg, r); }
  static Operand label(std::uint32_t target) { return make(OperandKind::Label, target); }
  static Operand immediate(Word v, MontForm f = MontForm::NM) {
    Operand o = make(OperandKind::Imm);
    o.imm = v;
    o.form = f;
    return o;
  }
  static Operand mem(Address a) {
    Operand o = make(OperandKind::Mem);
    o.addr = a;
    return o;
  }

  bool is_reg() const {
    return kind == OperandKind::VReg || kind == OperandKind::Slot ||
           kind == OperandKind::Fifo;
  }
  bool operator==(const Operand&) const = default;
};

struct Instruction {
  Opcode op = Opcode::MMUL;
  std::vector<Operand> dst;
  std::vector<Operand> src;
  std::uint32_t modulus = 0;
  /// BCONV only: source moduli (one per src) and target moduli (one per dst).
  std::vector<std::uint32_t> from, to;
  std::uint8_t flags = 0;
  /// Conversion group this micro-op was lowered from (-1: none).
  std::int32_t group = -1;

  bool has(std::uint8_t f) const { return (flags & f) != 0; }
  bool operator==(const Instruction&) const = default;
};

enum class Form : std::uint8_t { SsaIr, Scheduled, Allocated, Machine };
const char* to_string(Form f);

struct Symbol {
  std::string name;
  std::size_t size = 0;  // residue polynomials
  bool operator==(const Symbol&) const = default;
};

/// Source and target moduli of one lowered base conversion.
struct BconvGroup {
  std::vector<std::uint32_t> from, to;
  bool operator==(const BconvGroup&) const = default;
};

struct Program {
  Form form = Form::SsaIr;
  std::size_t n = 0;
  std::vector<Word> moduli;
  std::vector<Symbol> symbols;
  std::vector<Instruction> code;
  std::vector<std::string> vreg_names;
  std::vector<BconvGroup> groups;
  /// Optional issue cycle per instruction (scheduled form and later).
  std::vector<std::uint64_t> issue;

  std::uint32_t add_vreg(const std::string& name);
  std::uint32_t symbol_index(const std::string& name) const;  // throws
  std::optional<std::uint32_t> find_symbol(const std::string& name) const;
  std::uint32_t add_symbol(const std::string& name, std::size_t size);
  std::size_t vector_count() const;
  bool operator==(const Program&) const = default;
};

/// Checks arity per opcode, modulus indices, symbol indices and, for
/// programs containing virtual registers, single definition and
/// definition before use. Throws StructuralError.
void validate(const Program& p);

/// Def/use helpers over register-like operands.
std::vector<const Operand*> reads(const Instruction& in);
std::vector<const Operand*> writes(const Instruction& in);

}  // namespace effact::isa
