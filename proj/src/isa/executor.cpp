// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/isa/executor.hpp"

#include <map>

#include "effact/error.hpp"
#include "effact/isa/text.hpp"
#include "effact/kernels/automorphism.hpp"
#include "effact/kernels/bconv.hpp"
#include "effact/kernels/ntt.hpp"
#include "effact/kernels/vector_ops.hpp"

namespace effact::isa {

namespace {

using kernels::ResiduePoly;

class Machine {
 public:
  Machine(const Program& p, MemoryImage& img, const ExecOptions& opt)
      : p_(p), img_(img), opt_(opt) {
    if (img_.n == 0) img_.n = p.n;
    if (p.n != 0 && img_.n != p.n) {
      throw ExecError("program n=" + std::to_string(p.n) + " but image n=" +
                      std::to_string(img_.n));
    }
    for (Word q : p.moduli) mods_.emplace_back(q, img_.n);
    if (opt.slots) img_.sram.resize(opt.slots);
    bounded_ = !img_.sram.empty();
    for (const auto& s : p.symbols) {
      auto& reg = img_.dram[s.name];
      if (reg.size() < s.size) reg.resize(s.size);
    }
  }

  void run() {
    std::size_t pc = 0, steps = 0;
    while (pc < p_.code.size()) {
      if (++steps > opt_.max_steps) throw ExecError("step limit exceeded");
      const Instruction& in = p_.code[pc];
      std::size_t next = pc + 1;
      try {
        next = step(in, pc);
      } catch (const ExecError& e) {
        throw ExecError(where(pc) + e.what());
      } catch (const Error& e) {
        throw ExecError(where(pc) + e.what());
      }
      pc = next;
    }
    img_.fifo.clear();
    for (auto& [key, v] : regs_) {
      if (key.first == OperandKind::Fifo) img_.fifo[key.second] = v;
    }
  }

 private:
  std::string where(std::size_t pc) const {
    return "instruction " + std::to_string(pc) + " (" +
           print_instruction(p_, p_.code[pc]) + "): ";
  }

  const rns::Modulus& mod(std::uint32_t m) const { return mods_.at(m); }

  std::pair<std::string, std::size_t> resolve(const Address& a) const {
    std::int64_t off = a.offset;
    if (a.sreg >= 0) off += a.scale * sreg(static_cast<std::uint32_t>(a.sreg));
    const auto& sym = p_.symbols.at(a.symbol);
    if (off < 0 || static_cast<std::size_t>(off) >= sym.size) {
      throw ExecError("address @" + sym.name + "[" + std::to_string(off) +
                      "] out of range (size " + std::to_string(sym.size) + ")");
    }
    return {sym.name, static_cast<std::size_t>(off)};
  }

  std::int64_t sreg(std::uint32_t r) const {
    auto it = sregs_.find(r);
    return it == sregs_.end() ? 0 : it->second;
  }

  std::int64_t scalar(const Operand& o) const {
    return o.kind == OperandKind::SReg ? sreg(o.index) : static_cast<std::int64_t>(o.imm);
  }

  void check_slot(const Operand& o) const {
    if (o.kind == OperandKind::Slot && bounded_ && o.index >= img_.sram.size()) {
      throw ExecError("slot s" + std::to_string(o.index) + " out of range (" +
                      std::to_string(img_.sram.size()) + " slots)");
    }
  }

  ResiduePoly read(const Operand& o) {
    if (o.kind == OperandKind::Mem) {
      const auto [name, off] = resolve(o.addr);
      const auto& reg = img_.dram[name];
      if (off >= reg.size() || !reg[off]) {
        throw ExecError("read of empty @" + name + "[" + std::to_string(off) + "]");
      }
      return *reg[off];
    }
    check_slot(o);
    auto it = regs_.find({o.kind, o.index});
    if (it == regs_.end()) {
      throw ExecError("read of empty " + print_operand(p_, o));
    }
    if (o.kind == OperandKind::Fifo) {
      ResiduePoly v = std::move(it->second);
      regs_.erase(it);
      return v;
    }
    return it->second;
  }

  void write(const Operand& o, ResiduePoly v) {
    if (o.kind == OperandKind::Mem) {
      const auto [name, off] = resolve(o.addr);
      img_.dram[name][off] = std::move(v);
      return;
    }
    check_slot(o);
    if (o.kind == OperandKind::Slot && bounded_) img_.sram[o.index] = v;
    regs_[{o.kind, o.index}] = std::move(v);
  }

  void same_modulus(const ResiduePoly& v, std::uint32_t m) const {
    if (v.q() != mod(m).q()) {
      throw ExecError("modulus mismatch: operand is mod " + std::to_string(v.q()) +
                      ", instruction is q" + std::to_string(m) + " = " +
                      std::to_string(mod(m).q()));
    }
  }

  static void no_deferred(const ResiduePoly& v) {
    if (v.scale_deferred) {
      throw ExecError("consuming scale-deferred data outside an absorbing multiply");
    }
  }

  // Cross-modulus feed: reinterpret the words of `v` under modulus m.
  ResiduePoly relabel(ResiduePoly v, std::uint32_t m) const {
    v.modulus = mod(m);
    return v;
  }

  Word imm_word(const Operand& o, std::uint32_t m) const {
    return mod(m).encode(o.imm, o.form);
  }

  ResiduePoly multiply(const Instruction& in, const ResiduePoly& a0,
                       const Operand& b_op, bool allow_absorb) {
    ResiduePoly a = a0;
    if (a.scale_deferred) {
      if (!allow_absorb || !in.has(flag::kAbsorb) || b_op.kind != OperandKind::Imm) {
        no_deferred(a);
      }
      a.scale_deferred = false;
    }
    if (a.q() != mod(in.modulus).q()) a = relabel(std::move(a), in.modulus);
    if (b_op.kind == OperandKind::Imm) {
      return kernels::vec_mmul(a, imm_word(b_op, in.modulus), b_op.form);
    }
    ResiduePoly b = read(b_op);
    same_modulus(b, in.modulus);
    no_deferred(b);
    return kernels::vec_mmul(a, b);
  }

  std::size_t step(const Instruction& in, std::size_t pc) {
    switch (in.op) {
      case Opcode::LOAD:
      case Opcode::STORE:
      case Opcode::COPY: {
        ResiduePoly v = read(in.src[0]);
        same_modulus(v, in.modulus);
        write(in.dst[0], std::move(v));
        break;
      }
      case Opcode::NTT:
      case Opcode::INTT: {
        ResiduePoly v = read(in.src[0]);
        same_modulus(v, in.modulus);
        no_deferred(v);
        write(in.dst[0], in.op == Opcode::NTT
                             ? kernels::ntt_fwd(v)
                             : kernels::ntt_inv(v, in.has(flag::kDefer)));
        break;
      }
      case Opcode::AUTO: {
        ResiduePoly v = read(in.src[0]);
        same_modulus(v, in.modulus);
        no_deferred(v);
        const auto s = static_cast<std::int64_t>(in.src[1].imm);
        write(in.dst[0], v.domain == kernels::Domain::Ntt
                             ? kernels::automorphism_ntt(v, s, opt_.lanes)
                             : kernels::automorphism_apply(v, s));
        break;
      }
      case Opcode::MMUL: {
        ResiduePoly a = read(in.src[0]);
        write(in.dst[0], multiply(in, a, in.src[1], true));
        break;
      }
      case Opcode::MMAD: {
        ResiduePoly a = read(in.src[0]);
        same_modulus(a, in.modulus);
        no_deferred(a);
        const bool sub = in.has(flag::kSub);
        if (in.src[1].kind == OperandKind::Imm) {
          if (in.src[1].form != a.repr) {
            throw ExecError("immediate form differs from operand representation");
          }
          Word c = imm_word(in.src[1], in.modulus);
          if (sub) c = mod(in.modulus).neg(c);
          write(in.dst[0], kernels::vec_madd(a, c));
        } else {
          ResiduePoly b = read(in.src[1]);
          same_modulus(b, in.modulus);
          no_deferred(b);
          write(in.dst[0], sub ? kernels::vec_msub(a, b) : kernels::vec_madd(a, b));
        }
        break;
      }
      case Opcode::MAC: {
        ResiduePoly acc = read(in.src[0]);
        same_modulus(acc, in.modulus);
        no_deferred(acc);
        ResiduePoly a = read(in.src[1]);
        no_deferred(a);
        if (a.q() != acc.q()) a = relabel(std::move(a), in.modulus);
        if (in.src[2].kind == OperandKind::Imm) {
          const auto form = rns::compose(a.repr, in.src[2].form);
          if (!form || *form != acc.repr) {
            throw ExecError("mac: product representation differs from accumulator");
          }
          ResiduePoly out = acc;
          kernels::mac_scalar(acc.coeffs, a.coeffs, imm_word(in.src[2], in.modulus),
                              out.coeffs, mod(in.modulus));
          write(in.dst[0], std::move(out));
        } else {
          ResiduePoly b = read(in.src[2]);
          same_modulus(b, in.modulus);
          no_deferred(b);
          write(in.dst[0], kernels::mac_fused(acc, a, b));
        }
        break;
      }
      case Opcode::BCONV: {
        std::vector<rns::Modulus> from, to;
        std::vector<ResiduePoly> limbs;
        for (std::size_t i = 0; i < in.src.size(); ++i) {
          ResiduePoly v = read(in.src[i]);
          same_modulus(v, in.from[i]);
          limbs.push_back(std::move(v));
          from.push_back(mod(in.from[i]));
        }
        for (auto m : in.to) to.push_back(mod(m));
        const kernels::RnsPoly src(rns::RnsBasis(std::move(from)), std::move(limbs));
        const auto key = std::make_pair(in.from, in.to);
        auto it = tables_.find(key);
        if (it == tables_.end()) {
          it = tables_.emplace(key, kernels::BconvTables(src.basis,
                                                         rns::RnsBasis(std::move(to))))
                   .first;
        }
        kernels::RnsPoly out = kernels::bconv(src, it->second);
        for (std::size_t i = 0; i < in.dst.size(); ++i) write(in.dst[i], out[i]);
        break;
      }
      case Opcode::SET:
        sregs_[in.dst[0].index] = static_cast<std::int64_t>(in.src[0].imm);
        break;
      case Opcode::SADD:
        sregs_[in.dst[0].index] = sreg(in.src[0].index) + scalar(in.src[1]);
        break;
      case Opcode::SMUL:
        sregs_[in.dst[0].index] = sreg(in.src[0].index) * scalar(in.src[1]);
        break;
      case Opcode::BLT:
        if (sreg(in.src[0].index) < scalar(in.src[1])) return in.src[2].index;
        break;
      case Opcode::BGE:
        if (sreg(in.src[0].index) >= scalar(in.src[1])) return in.src[2].index;
        break;
      case Opcode::JMP:
        return in.src[0].index;
    }
    return pc + 1;
  }

  const Program& p_;
  MemoryImage& img_;
  const ExecOptions& opt_;
  std::vector<rns::Modulus> mods_;
  bool bounded_ = false;
  std::map<std::pair<OperandKind, std::uint32_t>, ResiduePoly> regs_;
  std::map<std::uint32_t, std::int64_t> sregs_;
  std::map<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>,
           kernels::BconvTables>
      tables_;
};

}  // namespace

MemoryImage execute_program(const Program& p, MemoryImage img, const ExecOptions& opt) {
  validate(p);
  Machine m(p, img, opt);
  m.run();
  return img;
}

}  // namespace effact::isa
