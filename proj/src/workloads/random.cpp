// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/workloads/random.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "effact/error.hpp"
#include "effact/workloads/builder.hpp"

namespace effact::workloads {

using isa::Opcode;
using isa::OperandKind;
using kernels::Domain;
using kernels::Order;
using kernels::ResiduePoly;

namespace {

struct Typed {
  Operand v;
  std::uint32_t mod = 0;
  Domain dom = Domain::Coefficient;
  MontForm repr = MontForm::NM;
};

ResiduePoly random_residue(const rns::Modulus& m, Domain d, MontForm r, std::mt19937_64& rng) {
  std::uniform_int_distribution<Word> dist(0, m.q() - 1);
  std::vector<Word> c(m.n());
  for (auto& x : c) x = dist(rng);
  return ResiduePoly(m, std::move(c), d, d == Domain::Ntt ? Order::BitReversed : Order::Natural,
                     r);
}

class Generator {
 public:
  Generator(std::uint64_t seed, const RandomProgramOptions& opt)
      : opt_(opt), rng_(seed), mods_(rns::make_modulus_chain(opt.n, opt.moduli, opt.bits)),
        b_(opt.n, values()) {}

  RandomCase run() {
    in_ = b_.symbol("in", opt_.inputs);
    out_ = b_.symbol("out", 0);
    b_.set_prefix("r");
    for (std::size_t k = 0; k < opt_.inputs; ++k) {
      const auto m = static_cast<std::uint32_t>(pick(mods_.size()));
      const std::size_t t = pick(5);
      const Domain d = t < 3 ? Domain::Ntt : Domain::Coefficient;
      const MontForm r = t == 3 ? MontForm::NM : MontForm::SM;
      img_.put("in", k, random_residue(mods_[m], d, r, rng_));
      inputs_.push_back({Operand{}, m, d, r});
    }
    img_.n = opt_.n;
    for (std::size_t k = 0; k < 3; ++k) load_input();
    while (b_.program().code.size() < opt_.ops) step();
    finish();
    auto& p = b_.program();
    p.symbols[out_].size = std::max<std::size_t>(stored_, 1);
    return {b_.take(), std::move(img_)};
  }

 private:
  std::vector<Word> values() const {
    std::vector<Word> v;
    for (const auto& m : mods_) v.push_back(m.q());
    return v;
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
  Word rand_word(std::uint32_t m) {
    return std::uniform_int_distribution<Word>(0, mods_[m].q() - 1)(rng_);
  }

  template <typename Pred>
  const Typed* choose(Pred&& pred) {
    std::vector<const Typed*> c;
    for (const auto& v : vals_) {
      if (pred(v)) c.push_back(&v);
    }
    return c.empty() ? nullptr : c[pick(c.size())];
  }

  void add(Operand v, std::uint32_t m, Domain d, MontForm r) {
    vals_.push_back({v, m, d, r});
    used_.push_back(false);
  }
  void use(const Typed* t) { used_[static_cast<std::size_t>(t - vals_.data())] = true; }

  void load_input() {
    const std::size_t k = pick(opt_.inputs);
    const auto& t = inputs_[k];
    add(b_.load(t.mod, in_, static_cast<std::int64_t>(k)), t.mod, t.dom, t.repr);
  }

  void step() {
    switch (pick(15)) {
      case 0: load_input(); break;
      case 1: ntt(); break;
      case 2: intt(); break;
      case 3: mul(); break;
      case 4: mul_imm(); break;
      case 5: addsub(); break;
      case 6: add_imm(); break;
      case 7: automorphism(); break;
      case 8: copy(); break;
      case 9: repeat(); break;
      case 10: conversion_chain(); break;
      case 11: mul_add(); break;
      case 12: store_reload(); break;
      case 13: cross_modulus(); break;
      default: mul(); break;
    }
  }

  void ntt() {
    if (const auto* a = choose([](const Typed& t) { return t.dom == Domain::Coefficient; })) {
      use(a);
      const Typed t = *a;
      add(b_.ntt(t.mod, t.v), t.mod, Domain::Ntt, t.repr);
    }
  }
  void intt() {
    if (const auto* a = choose([](const Typed& t) { return t.dom == Domain::Ntt; })) {
      use(a);
      const Typed t = *a;
      add(b_.intt(t.mod, t.v), t.mod, Domain::Coefficient, t.repr);
    }
  }
  void mul() {
    const auto* a = choose([](const Typed&) { return true; });
    if (!a) return;
    const Typed x = *a;
    const auto* c = choose([&](const Typed& t) {
      return t.mod == x.mod && t.dom == x.dom && rns::compose(x.repr, t.repr).has_value();
    });
    if (!c) return;
    const Typed y = *c;
    use(a);
    use(c);
    add(b_.mul(x.mod, x.v, y.v), x.mod, x.dom, *rns::compose(x.repr, y.repr));
  }
  MontForm imm_form(MontForm r) {
    std::vector<MontForm> ok;
    for (auto f : {MontForm::NM, MontForm::SM, MontForm::DM}) {
      if (rns::compose(r, f)) ok.push_back(f);
    }
    return ok[pick(ok.size())];
  }
  void mul_imm() {
    const auto* a = choose([](const Typed&) { return true; });
    if (!a) return;
    use(a);
    const Typed x = *a;
    const MontForm f = imm_form(x.repr);
    const Word c = coin(0.3) ? 1 : rand_word(x.mod);
    add(b_.mul_imm(x.mod, x.v, c, f), x.mod, x.dom, *rns::compose(x.repr, f));
  }
  void addsub() {
    const auto* a = choose([](const Typed&) { return true; });
    if (!a) return;
    const Typed x = *a;
    const auto* c = choose([&](const Typed& t) {
      return t.mod == x.mod && t.dom == x.dom && t.repr == x.repr;
    });
    if (!c) return;
    const Typed y = *c;
    use(a);
    use(c);
    add(coin(0.5) ? b_.add(x.mod, x.v, y.v) : b_.sub(x.mod, x.v, y.v), x.mod, x.dom, x.repr);
  }
  void add_imm() {
    const auto* a = choose([](const Typed&) { return true; });
    if (!a) return;
    use(a);
    const Typed x = *a;
    const Word c = rand_word(x.mod);
    add(coin(0.5) ? b_.add_imm(x.mod, x.v, c, x.repr) : b_.sub_imm(x.mod, x.v, c, x.repr),
        x.mod, x.dom, x.repr);
  }
  void automorphism() {
    const auto* a = choose([](const Typed&) { return true; });
    if (!a) return;
    use(a);
    const Typed x = *a;
    const auto s = static_cast<std::int64_t>(1 + pick(opt_.n / 2 - 1));
    add(b_.automorphism(x.mod, x.v, s), x.mod, x.dom, x.repr);
  }
  void copy() {
    const auto* a = choose([](const Typed&) { return true; });
    if (!a) return;
    use(a);
    const Typed x = *a;
    add(b_.copy(x.mod, x.v), x.mod, x.dom, x.repr);
  }
  // Re-emits an earlier pure instruction verbatim with a fresh result.
  void repeat() {
    auto& code = b_.program().code;
    std::vector<std::size_t> c;
    for (std::size_t i = 0; i < code.size(); ++i) {
      const auto& in = code[i];
      if (in.dst.size() == 1 && in.dst[0].kind == OperandKind::VReg && in.op != Opcode::BCONV &&
          in.op != Opcode::STORE) {
        c.push_back(i);
      }
    }
    if (c.empty()) return;
    const std::size_t i = c[pick(c.size())];
    const auto orig = std::find_if(vals_.begin(), vals_.end(), [&](const Typed& t) {
      return t.v == code[i].dst[0];
    });
    if (orig == vals_.end()) return;
    const Typed t = *orig;
    isa::Instruction in = code[i];
    const Operand d = Operand::vreg(b_.program().add_vreg("r.dup" + std::to_string(dups_++)));
    in.dst = {d};
    b_.emit(std::move(in));
    add(d, t.mod, t.dom, t.repr);
  }
  // INTT -> to NM -> BCONV -> to SM -> NTT over NTT-domain SM limbs.
  void conversion_chain() {
    std::vector<const Typed*> src;
    std::set<std::uint32_t> from;
    for (std::size_t tries = 0; tries < 6 && src.size() < 3; ++tries) {
      const auto* a = choose([&](const Typed& t) {
        return t.dom == Domain::Ntt && t.repr == MontForm::SM && !from.count(t.mod);
      });
      if (!a) break;
      from.insert(a->mod);
      src.push_back(a);
    }
    if (src.empty() || from.size() == mods_.size()) return;
    std::vector<Operand> in;
    std::vector<std::uint32_t> fm, to;
    for (const auto* a : src) {
      use(a);
      const Typed x = *a;
      in.push_back(b_.to_nm(x.mod, b_.intt(x.mod, x.v)));
      fm.push_back(x.mod);
    }
    for (std::uint32_t m = 0; m < mods_.size(); ++m) {
      if (!from.count(m) && (to.empty() || coin(0.7))) to.push_back(m);
    }
    const auto out = b_.bconv(in, fm, to);
    for (std::size_t i = 0; i < out.size(); ++i) {
      add(b_.ntt(to[i], b_.to_sm(to[i], out[i])), to[i], Domain::Ntt, MontForm::SM);
    }
  }
  void mul_add() {
    const auto* a = choose([](const Typed&) { return true; });
    if (!a) return;
    const Typed x = *a;
    const auto* c = choose([&](const Typed& t) {
      return t.mod == x.mod && t.dom == x.dom && rns::compose(x.repr, t.repr).has_value();
    });
    if (!c) return;
    const Typed y = *c;
    const MontForm r = *rns::compose(x.repr, y.repr);
    const auto* acc = choose([&](const Typed& t) {
      return t.mod == x.mod && t.dom == x.dom && t.repr == r;
    });
    if (!acc) return;
    const Typed z = *acc;
    use(a);
    use(c);
    use(acc);
    const Operand prod = b_.mul(x.mod, x.v, y.v);
    add(b_.add(x.mod, z.v, prod), x.mod, x.dom, r);
  }
  void store_reload() {
    const auto* a = choose([](const Typed&) { return true; });
    if (!a) return;
    use(a);
    const Typed x = *a;
    const std::size_t slot = stored_ > 0 && coin(0.3) ? pick(stored_) : stored_++;
    b_.store(x.mod, x.v, out_, static_cast<std::int64_t>(slot));
    out_type_[slot] = x;
    if (coin(0.5)) {
      const std::size_t k = pick(stored_);
      if (auto it = out_type_.find(k); it != out_type_.end()) {
        const Typed t = it->second;
        add(b_.load(t.mod, out_, static_cast<std::int64_t>(k)), t.mod, t.dom, t.repr);
      }
    }
  }
  // NM coefficient words reinterpreted under another modulus and brought
  // to SM there, as rescaling does.
  void cross_modulus() {
    const auto* a = choose([](const Typed& t) {
      return t.dom == Domain::Coefficient && t.repr == MontForm::NM;
    });
    if (!a || mods_.size() < 2) return;
    use(a);
    const Typed x = *a;
    auto m = static_cast<std::uint32_t>(pick(mods_.size() - 1));
    if (m >= x.mod) ++m;
    add(b_.mul_imm(m, x.v, 1, MontForm::DM), m, Domain::Coefficient, MontForm::SM);
  }

  void finish() {
    for (std::size_t i = 0; i < vals_.size(); ++i) {
      if (used_[i] || !coin(0.6)) continue;
      const Typed x = vals_[i];
      b_.store(x.mod, x.v, out_, static_cast<std::int64_t>(stored_++));
    }
    if (!vals_.empty()) {
      const Typed x = vals_.back();
      b_.store(x.mod, x.v, out_, static_cast<std::int64_t>(stored_++));
    }
  }

  RandomProgramOptions opt_;
  std::mt19937_64 rng_;
  std::vector<rns::Modulus> mods_;
  IrBuilder b_;
  isa::MemoryImage img_;
  std::uint32_t in_ = 0, out_ = 0;
  std::vector<Typed> inputs_, vals_;
  std::vector<bool> used_;
  std::map<std::size_t, Typed> out_type_;
  std::size_t stored_ = 0, dups_ = 0;
};

}  // namespace

RandomCase gen_random_program(std::uint64_t seed, const RandomProgramOptions& opt) {
  if (opt.n < 8 || opt.moduli == 0 || opt.inputs == 0) {
    throw InvalidArgument("random program needs n >= 8, moduli and inputs");
  }
  return Generator(seed, opt).run();
}

isa::MemoryImage random_inputs(const isa::Program& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  isa::MemoryImage img;
  img.n = p.n;
  std::vector<rns::Modulus> mods;
  for (auto q : p.moduli) mods.emplace_back(q, p.n);
  std::set<std::pair<std::uint32_t, std::int64_t>> written, filled;
  for (const auto& in : p.code) {
    for (const auto& o : in.src) {
      if (o.kind != OperandKind::Mem || o.addr.sreg >= 0) continue;
      const auto key = std::make_pair(o.addr.symbol, o.addr.offset);
      if (written.count(key) || !filled.insert(key).second) continue;
      img.put(p.symbols[o.addr.symbol].name, static_cast<std::size_t>(o.addr.offset),
              random_residue(mods[in.modulus], Domain::Ntt, MontForm::SM, rng));
    }
    for (const auto& o : in.dst) {
      if (o.kind == OperandKind::Mem && o.addr.sreg < 0) {
        written.insert({o.addr.symbol, o.addr.offset});
      }
    }
  }
  for (const auto& s : p.symbols) {
    if (!img.dram.count(s.name)) img.dram[s.name];
  }
  return img;
}

std::size_t inject_duplicates(isa::Program& p, std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < p.code.size(); ++i) {
    const auto& in = p.code[i];
    bool mem = false;
    for (const auto& o : in.src) mem = mem || o.kind == OperandKind::Mem;
    if (isa::is_vector(in.op) && in.op != Opcode::STORE && in.op != Opcode::BCONV && !mem &&
        in.dst.size() == 1 && in.dst[0].kind == OperandKind::VReg) {
      cand.push_back(i);
    }
  }
  std::shuffle(cand.begin(), cand.end(), rng);
  cand.resize(std::min(cand.size(), count));
  std::sort(cand.begin(), cand.end());
  std::vector<isa::Instruction> code;
  code.reserve(p.code.size() + cand.size());
  std::map<std::uint32_t, std::uint32_t> redirect;  // original -> copy
  std::map<std::uint32_t, std::size_t> seen;
  std::size_t next = 0;
  for (std::size_t i = 0; i < p.code.size(); ++i) {
    isa::Instruction in = p.code[i];
    for (auto& o : in.src) {
      if (o.kind != OperandKind::VReg) continue;
      auto it = redirect.find(o.index);
      if (it != redirect.end() && seen[o.index]++ % 2 == 0) o.index = it->second;
    }
    code.push_back(in);
    if (next < cand.size() && cand[next] == i) {
      ++next;
      isa::Instruction dup = in;
      const auto orig = in.dst[0].index;
      const auto copy = p.add_vreg(p.vreg_names[orig] + ".dup");
      dup.dst[0] = Operand::vreg(copy);
      code.push_back(std::move(dup));
      redirect[orig] = copy;
    }
  }
  p.code = std::move(code);
  p.issue.clear();
  return cand.size();
}

isa::MemoryImage keyswitch_image(const he::Context& ctx, const kernels::RnsPoly& d2,
                                 const he::SwitchKey& key) {
  isa::MemoryImage img;
  img.n = ctx.n();
  img.put("d2", 0, d2);
  const std::size_t stride = ctx.max_level() + 1 + ctx.special_count();
  for (std::size_t d = 0; d < key.dnum(); ++d) {
    img.put("kb", d * stride, key.digits[d].first);
    img.put("ka", d * stride, key.digits[d].second);
  }
  img.dram["k0"];
  img.dram["k1"];
  return img;
}

isa::MemoryImage hoisted_image(const he::Context& ctx, const he::Ciphertext& ct,
                               const std::vector<const he::SwitchKey*>& keys) {
  isa::MemoryImage img;
  img.n = ctx.n();
  img.put("ct", 0, ct.c0);
  img.put("ct", ct.level + 1, ct.c1);
  const std::size_t stride = ctx.max_level() + 1 + ctx.special_count();
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::size_t dnum = keys[i]->dnum();
    for (std::size_t d = 0; d < dnum; ++d) {
      img.put("rkb", (i * dnum + d) * stride, keys[i]->digits[d].first);
      img.put("rka", (i * dnum + d) * stride, keys[i]->digits[d].second);
    }
  }
  img.dram["out"];
  return img;
}

}  // namespace effact::workloads
