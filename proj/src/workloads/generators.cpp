// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/workloads/generators.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <optional>

#include "effact/error.hpp"
#include "effact/isa/text.hpp"
#include "effact/workloads/emit.hpp"

namespace effact::workloads {

namespace {

using Ct = HeEmitter::Ct;

IrBuilder make_builder(const WorkloadParams& prm) {
  prm.validate();
  return IrBuilder(prm.n, make_chain(prm).all());
}

std::size_t key_entries(const WorkloadParams& prm, const HeEmitter& he, std::size_t keys) {
  return keys * prm.dnum * he.key_stride();
}

std::int64_t normalize_step(std::int64_t s, std::size_t slots) {
  const auto m = static_cast<std::int64_t>(slots);
  return ((s % m) + m) % m;
}

// Rotation keys live in one region; ids are handed out per distinct step.
class KeyTable {
 public:
  KeyTable(HeEmitter& he, std::uint32_t b_sym, std::uint32_t a_sym)
      : he_(he), b_(b_sym), a_(a_sym) {}
  KeyFetch relin() { return id_for(kRelin); }
  KeyFetch rotation(std::int64_t step) { return id_for(step); }
  std::size_t count() const { return ids_.size(); }

 private:
  static constexpr std::int64_t kRelin = -1;
  KeyFetch id_for(std::int64_t k) {
    auto [it, fresh] = ids_.emplace(k, ids_.size());
    (void)fresh;
    return he_.key_from_memory(b_, a_, it->second);
  }
  HeEmitter& he_;
  std::uint32_t b_, a_;
  std::map<std::int64_t, std::size_t> ids_;
};

// Plaintext constants drawn from one region with a running offset.
class PlainPool {
 public:
  PlainPool(std::uint32_t sym, std::size_t stride) : sym_(sym), stride_(stride) {}
  std::size_t next() { return stride_ * count_++; }
  std::uint32_t symbol() const { return sym_; }
  std::size_t entries() const { return stride_ * count_; }

 private:
  std::uint32_t sym_;
  std::size_t stride_;
  std::size_t count_ = 0;
};

}  // namespace

isa::Program gen_keyswitch(const WorkloadParams& prm) {
  IrBuilder b = make_builder(prm);
  HeEmitter he(b, prm);
  const std::size_t l = prm.l;
  const auto d2 = b.symbol("d2", l + 1);
  const auto kb = b.symbol("kb", key_entries(prm, he, 1));
  const auto ka = b.symbol("ka", key_entries(prm, he, 1));
  const auto k0 = b.symbol("k0", l + 1);
  const auto k1 = b.symbol("k1", l + 1);
  b.set_prefix("ks");
  const LimbVec a = he.load_poly(d2, 0, l);
  auto [r0, r1] = he.key_switch(a, he.key_with_loads(kb, ka, 0));
  he.store_poly(r0, k0, 0);
  he.store_poly(r1, k1, 0);
  return b.take();
}

isa::Program gen_hoisted_rotations(const WorkloadParams& prm,
                                   const std::vector<std::int64_t>& steps) {
  if (steps.empty()) throw InvalidArgument("hoisted rotations need at least one step");
  IrBuilder b = make_builder(prm);
  HeEmitter he(b, prm);
  const std::size_t l = prm.l;
  const auto ct = b.symbol("ct", 2 * (l + 1));
  const auto rkb = b.symbol("rkb", key_entries(prm, he, steps.size()));
  const auto rka = b.symbol("rka", key_entries(prm, he, steps.size()));
  const auto out = b.symbol("out", steps.size() * 2 * (l + 1));
  b.set_prefix("hr");
  const Ct in = he.load_ct(ct, l);
  std::vector<KeyFetch> keys;
  for (std::size_t i = 0; i < steps.size(); ++i) keys.push_back(he.key_with_loads(rkb, rka, i));
  const auto rotated = he.hrot_hoisted(in, steps, keys);
  for (std::size_t i = 0; i < rotated.size(); ++i) {
    he.store_poly(rotated[i].c0, out, i * 2 * (l + 1));
    he.store_poly(rotated[i].c1, out, i * 2 * (l + 1) + l + 1);
  }
  return b.take();
}

isa::Program gen_helr_iteration(const WorkloadParams& prm, std::size_t batches,
                                std::size_t features) {
  if (prm.l < 4) throw InvalidArgument("HELR iteration consumes four levels; need l >= 4");
  if (batches == 0) throw InvalidArgument("HELR needs at least one batch");
  if (features < 2 || !std::has_single_bit(features) || features > prm.slots) {
    throw InvalidArgument("feature count must be a power of two in [2, slots]");
  }
  IrBuilder b = make_builder(prm);
  HeEmitter he(b, prm);
  const std::size_t l = prm.l, ctw = 2 * (l + 1);
  const auto xs = b.symbol("x", batches * ctw);
  const auto w_sym = b.symbol("w", ctw);
  const auto evkb = b.symbol("evkb", 0);
  const auto evka = b.symbol("evka", 0);
  const auto pt = b.symbol("pt", 0);
  const auto w_out = b.symbol("w_out", 0);
  KeyTable keys(he, evkb, evka);
  PlainPool plain(pt, prm.L + 1);
  b.set_prefix("helr");

  auto rotate_sum = [&](Ct c) {
    for (std::size_t s = 1; s < features; s <<= 1) {
      c = he.hadd(c, he.hrot(c, static_cast<std::int64_t>(s), keys.rotation(
                                                                 static_cast<std::int64_t>(s))));
    }
    return c;
  };

  const Ct w = he.load_ct(w_sym, l);
  std::vector<Ct> x, sig;
  for (std::size_t k = 0; k < batches; ++k) {
    Ct xb{he.load_poly(xs, k * ctw, l), he.load_poly(xs, k * ctw + l + 1, l)};
    x.push_back(xb);
    // z = <x_b, w> spread over the feature block.
    const Ct z = rotate_sum(he.hmult(xb, w, keys.relin()));
    // sigma(z) ~ z * (c1 + c3 z^2).
    const Ct z2 = he.hmult(z, z, keys.relin());
    Ct u = z2;
    u.c0 = he.add_plain(u.c0, pt, plain.next());
    sig.push_back(he.hmult(HeEmitter::drop_to(z, z2.level()), u, keys.relin()));
  }
  // Gradient: sum_b x_b * sigma_b with one relinearization.
  const std::size_t gl = sig[0].level();
  HeEmitter::Tensor acc = he.tensor(HeEmitter::drop_to(x[0], gl), sig[0]);
  for (std::size_t k = 1; k < batches; ++k) {
    acc = he.tensor_add(acc, HeEmitter::drop_to(x[k], gl), sig[k]);
  }
  Ct g = rotate_sum(he.rescale(he.relinearize(acc, keys.relin())));
  // w <- w - lr * g, lr folded into a plaintext scaling of g.
  g.c0 = he.mul_plain(g.c0, pt, plain.next());
  g.c1 = he.mul_plain(g.c1, pt, plain.next());
  const Ct wd = HeEmitter::drop_to(w, g.level());
  he.store_ct({he.sub(wd.c0, g.c0), he.sub(wd.c1, g.c1)}, w_out);

  auto& p = b.program();
  p.symbols[evkb].size = p.symbols[evka].size = key_entries(prm, he, keys.count());
  p.symbols[pt].size = plain.entries();
  p.symbols[w_out].size = 2 * (g.level() + 1);
  return b.take();
}

isa::Program gen_bootstrap_skeleton(const WorkloadParams& prm) {
  if (!prm.has_boot_budget()) throw InvalidArgument("bootstrap skeleton needs a level budget");
  IrBuilder b = make_builder(prm);
  HeEmitter he(b, prm);
  const std::size_t L = prm.L;
  const auto in = b.symbol("ct", 2 * (L + 1));
  const auto evkb = b.symbol("evkb", 0);
  const auto evka = b.symbol("evka", 0);
  const auto diag = b.symbol("diag", 0);
  const auto out = b.symbol("out", 0);
  KeyTable keys(he, evkb, evka);
  PlainPool plain(diag, L + 1);
  const std::size_t log_slots = static_cast<std::size_t>(std::countr_zero(prm.slots));

  // Homomorphic DFT factor of radix 2^e: 2r-1 diagonals evaluated with
  // hoisted baby steps and key-switched giant steps.
  auto linear_transform = [&](const Ct& c, std::size_t e, std::size_t stride) {
    const std::size_t r = std::size_t{1} << e;
    const std::size_t g = 2 * r - 1;
    const auto bs = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(g))));
    const std::size_t gs = (g + bs - 1) / bs;
    std::vector<Ct> baby{c};
    if (bs > 1) {
      std::vector<std::int64_t> steps;
      std::vector<KeyFetch> fetch;
      for (std::size_t j = 1; j < bs; ++j) {
        steps.push_back(normalize_step(static_cast<std::int64_t>(j * stride), prm.slots));
        fetch.push_back(keys.rotation(steps.back()));
      }
      for (auto& rc : he.hrot_hoisted(c, steps, fetch)) baby.push_back(std::move(rc));
    }
    std::optional<Ct> acc;
    for (std::size_t i = 0; i < gs; ++i) {
      std::optional<Ct> inner;
      for (std::size_t j = 0; j < bs && i * bs + j < g; ++j) {
        const std::size_t off0 = plain.next(), off1 = plain.next();
        if (!inner) {
          inner = Ct{he.mul_plain(baby[j].c0, diag, off0), he.mul_plain(baby[j].c1, diag, off1)};
        } else {
          inner->c0 = he.mul_plain_add(inner->c0, baby[j].c0, diag, off0);
          inner->c1 = he.mul_plain_add(inner->c1, baby[j].c1, diag, off1);
        }
      }
      const std::int64_t giant = normalize_step(
          (static_cast<std::int64_t>(i * bs) - static_cast<std::int64_t>(r - 1)) *
              static_cast<std::int64_t>(stride),
          prm.slots);
      if (giant != 0) *inner = he.hrot(*inner, giant, keys.rotation(giant));
      acc = acc ? he.hadd(*acc, *inner) : *inner;
    }
    return he.rescale(*acc);
  };

  // Spreads log_slots radix-2 stages over `levels` factors.
  auto dft = [&](Ct c, std::size_t levels, bool forward) {
    std::size_t done = 0;
    for (std::size_t k = 0; k < levels; ++k) {
      const std::size_t e = (log_slots - done) / (levels - k) +
                            ((log_slots - done) % (levels - k) != 0 ? 1 : 0);
      const std::size_t stage = forward ? done : log_slots - done - e;
      c = linear_transform(c, std::max<std::size_t>(e, 1), std::size_t{1} << stage);
      done += e;
    }
    return c;
  };

  b.set_prefix("boot");
  Ct ct = he.load_ct(in, L);
  b.set_prefix("cts");
  ct = dft(ct, prm.L_cts, true);
  // Fully packed: real and imaginary halves run EvalMod separately; the
  // split is one extra key switch.
  b.set_prefix("evalmod");
  const std::int64_t half = normalize_step(static_cast<std::int64_t>(prm.slots / 2), prm.slots);
  std::vector<Ct> parts{ct};
  parts.push_back(half ? he.hrot(ct, half, keys.rotation(half)) : ct);
  for (auto& x : parts) {
    Ct y = x;
    for (std::size_t k = 0; k < prm.L_evalmod; ++k) {
      Ct sq = he.hmult(x, x, keys.relin());
      Ct cross = he.hmult(x, y, keys.relin());
      y = he.hadd(cross, sq);
      x = sq;
    }
    x = he.hadd(x, y);
  }
  b.set_prefix("stc");
  ct = dft(he.hadd(parts[0], parts[1]), prm.L_stc, false);
  b.set_prefix("boot");
  he.store_ct(ct, out);

  auto& p = b.program();
  p.symbols[evkb].size = p.symbols[evka].size = key_entries(prm, he, keys.count());
  p.symbols[diag].size = plain.entries();
  p.symbols[out].size = 2 * (ct.level() + 1);
  return b.take();
}

std::string to_ir_text(const isa::Program& p) { return isa::print(p); }

}  // namespace effact::workloads
