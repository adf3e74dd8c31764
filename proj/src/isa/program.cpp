// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/isa/program.hpp"

#include <array>
#include <string>

#include "effact/error.hpp"

namespace effact::isa {

namespace {

struct OpInfo {
  Opcode op;
  const char* name;
};

constexpr std::array<OpInfo, 16> kOps{{
    {Opcode::MMUL, "mmul"},
    {Opcode::MMAD, "mmad"},
    {Opcode::MAC, "mac"},
    {Opcode::NTT, "ntt"},
    {Opcode::INTT, "intt"},
    {Opcode::AUTO, "auto"},
    {Opcode::LOAD, "load"},
    {Opcode::STORE, "store"},
    {Opcode::COPY, "copy"},
    {Opcode::BCONV, "bconv"},
    {Opcode::SET, "set"},
    {Opcode::SADD, "sadd"},
    {Opcode::SMUL, "smul"},
    {Opcode::BLT, "blt"},
    {Opcode::BGE, "bge"},
    {Opcode::JMP, "jmp"},
}};

[[noreturn]] void fail(std::size_t pc, const std::string& msg) {
  throw StructuralError("instruction " + std::to_string(pc) + ": " + msg);
}

bool vector_value(OperandKind k) {
  return k == OperandKind::VReg || k == OperandKind::Slot ||
         k == OperandKind::Fifo || k == OperandKind::Mem;
}

void check_arity(const Instruction& in, std::size_t pc, std::size_t nd,
                 std::size_t ns) {
  if (in.dst.size() != nd || in.src.size() != ns) {
    fail(pc, std::string(mnemonic(in.op)) + " expects " + std::to_string(nd) +
                 " destination(s) and " + std::to_string(ns) + " source(s)");
  }
}

void check_kind(bool ok, std::size_t pc, const Instruction& in, const char* what) {
  if (!ok) fail(pc, std::string(mnemonic(in.op)) + ": bad " + what + " operand");
}

}  // namespace

const char* mnemonic(Opcode op) {
  for (const auto& o : kOps) {
    if (o.op == op) return o.name;
  }
  return "?";
}

std::optional<Opcode> opcode_from_mnemonic(const std::string& s) {
  for (const auto& o : kOps) {
    if (s == o.name) return o.op;
  }
  if (s == "loadres") return Opcode::LOAD;
  if (s == "storeres") return Opcode::STORE;
  if (s == "veccopy") return Opcode::COPY;
  return std::nullopt;
}

bool is_scalar(Opcode op) {
  return op == Opcode::SET || op == Opcode::SADD || op == Opcode::SMUL ||
         op == Opcode::BLT || op == Opcode::BGE || op == Opcode::JMP;
}

bool is_vector(Opcode op) { return !is_scalar(op); }

const char* to_string(Form f) {
  switch (f) {
    case Form::SsaIr: return "ssa-ir";
    case Form::Scheduled: return "scheduled";
    case Form::Allocated: return "allocated";
    case Form::Machine: return "machine";
  }
  return "?";
}

std::uint32_t Program::add_vreg(const std::string& name) {
  vreg_names.push_back(name);
  return static_cast<std::uint32_t>(vreg_names.size() - 1);
}

std::optional<std::uint32_t> Program::find_symbol(const std::string& name) const {
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i].name == name) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

std::uint32_t Program::symbol_index(const std::string& name) const {
  if (auto i = find_symbol(name)) return *i;
  throw StructuralError("unknown symbol @" + name);
}

std::uint32_t Program::add_symbol(const std::string& name, std::size_t size) {
  if (auto i = find_symbol(name)) {
    if (symbols[*i].size < size) symbols[*i].size = size;
    return *i;
  }
  symbols.push_back({name, size});
  return static_cast<std::uint32_t>(symbols.size() - 1);
}

std::size_t Program::vector_count() const {
  std::size_t c = 0;
  for (const auto& in : code) c += is_vector(in.op);
  return c;
}

std::vector<const Operand*> reads(const Instruction& in) {
  std::vector<const Operand*> r;
  for (const auto& o : in.src) {
    if (o.is_reg()) r.push_back(&o);
  }
  return r;
}

std::vector<const Operand*> writes(const Instruction& in) {
  std::vector<const Operand*> w;
  for (const auto& o : in.dst) {
    if (o.is_reg()) w.push_back(&o);
  }
  return w;
}

void validate(const Program& p) {
  const std::size_t nv = p.vreg_names.size();
  std::vector<std::ptrdiff_t> def(nv, -1);
  auto check_mod = [&](std::size_t pc, std::uint32_t m) {
    if (m >= p.moduli.size()) fail(pc, "unknown modulus q" + std::to_string(m));
  };
  auto check_mem = [&](std::size_t pc, const Operand& o) {
    if (o.kind == OperandKind::Mem && o.addr.symbol >= p.symbols.size()) {
      fail(pc, "unknown symbol index " + std::to_string(o.addr.symbol));
    }
  };
  for (std::size_t pc = 0; pc < p.code.size(); ++pc) {
    const auto& in = p.code[pc];
    const auto sv = [&](std::size_t i) { return vector_value(in.src[i].kind); };
    const auto dv = [&](std::size_t i) {
      return in.dst[i].is_reg() || in.dst[i].kind == OperandKind::Mem;
    };
    switch (in.op) {
      case Opcode::MMUL:
      case Opcode::MMAD:
        check_arity(in, pc, 1, 2);
        check_kind(dv(0) && sv(0), pc, in, "vector");
        check_kind(sv(1) || in.src[1].kind == OperandKind::Imm, pc, in, "second");
        break;
      case Opcode::MAC:
        check_arity(in, pc, 1, 3);
        check_kind(dv(0) && sv(0) && sv(1), pc, in, "vector");
        check_kind(sv(2) || in.src[2].kind == OperandKind::Imm, pc, in, "third");
        break;
      case Opcode::NTT:
      case Opcode::INTT:
      case Opcode::COPY:
        check_arity(in, pc, 1, 1);
        check_kind(dv(0) && sv(0), pc, in, "vector");
        break;
      case Opcode::AUTO:
        check_arity(in, pc, 1, 2);
        check_kind(dv(0) && sv(0) && in.src[1].kind == OperandKind::Imm, pc, in,
                   "vector");
        break;
      case Opcode::LOAD:
        check_arity(in, pc, 1, 1);
        check_kind(in.dst[0].is_reg() && in.src[0].kind == OperandKind::Mem, pc, in,
                   "load");
        break;
      case Opcode::STORE:
        check_arity(in, pc, 1, 1);
        check_kind(in.dst[0].kind == OperandKind::Mem && in.src[0].is_reg(), pc, in,
                   "store");
        break;
      case Opcode::BCONV:
        if (in.dst.empty() || in.src.empty() || in.from.size() != in.src.size() ||
            in.to.size() != in.dst.size()) {
          fail(pc, "bconv needs one source modulus per source and one target per "
                   "destination");
        }
        for (std::size_t i = 0; i < in.src.size(); ++i) {
          check_kind(sv(i), pc, in, "source");
          check_mod(pc, in.from[i]);
        }
        for (std::size_t i = 0; i < in.dst.size(); ++i) {
          check_kind(dv(i), pc, in, "destination");
          check_mod(pc, in.to[i]);
        }
        break;
      case Opcode::SET:
        check_arity(in, pc, 1, 1);
        check_kind(in.dst[0].kind == OperandKind::SReg &&
                       in.src[0].kind == OperandKind::Imm,
                   pc, in, "scalar");
        break;
      case Opcode::SADD:
      case Opcode::SMUL:
        check_arity(in, pc, 1, 2);
        check_kind(in.dst[0].kind == OperandKind::SReg &&
                       in.src[0].kind == OperandKind::SReg &&
                       (in.src[1].kind == OperandKind::SReg ||
                        in.src[1].kind == OperandKind::Imm),
                   pc, in, "scalar");
        break;
      case Opcode::BLT:
      case Opcode::BGE:
        check_arity(in, pc, 0, 3);
        check_kind(in.src[0].kind == OperandKind::SReg &&
                       (in.src[1].kind == OperandKind::SReg ||
                        in.src[1].kind == OperandKind::Imm) &&
                       in.src[2].kind == OperandKind::Label,
                   pc, in, "branch");
        break;
      case Opcode::JMP:
        check_arity(in, pc, 0, 1);
        check_kind(in.src[0].kind == OperandKind::Label, pc, in, "jump");
        break;
    }
    if (is_vector(in.op) && in.op != Opcode::BCONV) check_mod(pc, in.modulus);
    for (const auto& o : in.src) {
      check_mem(pc, o);
      if (o.kind == OperandKind::Label && o.index > p.code.size()) {
        fail(pc, "branch target out of range");
      }
      if (o.kind == OperandKind::VReg) {
        if (o.index >= nv) fail(pc, "unknown virtual register");
        if (def[o.index] < 0) {
          fail(pc, "%" + p.vreg_names[o.index] + " used before definition");
        }
      }
    }
    for (const auto& o : in.dst) {
      check_mem(pc, o);
      if (o.kind == OperandKind::VReg) {
        if (o.index >= nv) fail(pc, "unknown virtual register");
        if (def[o.index] >= 0) {
          fail(pc, "%" + p.vreg_names[o.index] + " redefined (first defined at " +
                       std::to_string(def[o.index]) + ")");
        }
        def[o.index] = static_cast<std::ptrdiff_t>(pc);
      }
    }
  }
}

}  // namespace effact::isa
