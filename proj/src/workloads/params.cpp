// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/workloads/params.hpp"

#include <bit>
#include <string>

#include "effact/error.hpp"

namespace effact::workloads {

void WorkloadParams::validate() const {
  if (n < 8 || !std::has_single_bit(n)) {
    throw InvalidArgument("n must be a power of two >= 8, got " + std::to_string(n));
  }
  if (l > L) throw InvalidArgument("working level l exceeds L");
  if (dnum == 0 || dnum > L + 1) throw InvalidArgument("dnum must be in [1, L+1]");
  if (slots < 2 || !std::has_single_bit(slots) || slots > n / 2) {
    throw InvalidArgument("slots must be a power of two in [2, n/2]");
  }
  if (L_boot != 0 || L_cts != 0 || L_stc != 0 || L_evalmod != 0) {
    if (L_boot != L_cts + L_stc + L_evalmod) {
      throw InvalidArgument("L_boot must equal L_CtS + L_StC + L_EvalMod");
    }
    if (L_cts == 0 || L_stc == 0 || L_evalmod == 0) {
      throw InvalidArgument("every bootstrapping phase needs at least one level");
    }
    if (L_boot >= L) throw InvalidArgument("L_boot must leave at least one level");
  }
}

WorkloadParams WorkloadParams::table3() {
  WorkloadParams p;
  p.n = 1 << 16;
  p.L = 24;
  p.l = 24;
  p.dnum = 4;
  p.slots = 1 << 15;
  p.L_boot = 15;
  p.L_cts = 4;
  p.L_evalmod = 8;
  p.L_stc = 3;
  p.q0_bits = 58;
  p.q_bits = 54;
  p.p_bits = 59;
  return p;
}

WorkloadParams WorkloadParams::desk_boot() {
  WorkloadParams p;
  p.n = 64;
  p.L = 9;
  p.l = 9;
  p.dnum = 2;
  p.slots = 32;
  p.L_boot = 7;
  p.L_cts = 2;
  p.L_evalmod = 3;
  p.L_stc = 2;
  p.q0_bits = 50;
  p.q_bits = 40;
  p.p_bits = 52;
  return p;
}

std::vector<rns::Word> ModulusChain::all() const {
  std::vector<rns::Word> v = q;
  v.insert(v.end(), p.begin(), p.end());
  return v;
}

ModulusChain make_chain(const WorkloadParams& prm) {
  prm.validate();
  ModulusChain c;
  const auto q0 = rns::make_modulus_chain(prm.n, 1, prm.q0_bits);
  c.q.push_back(q0[0].q());
  for (const auto& m : rns::make_modulus_chain(prm.n, prm.L, prm.q_bits, 64, c.q)) {
    c.q.push_back(m.q());
  }
  const std::size_t alpha = (prm.L + 1 + prm.dnum - 1) / prm.dnum;
  for (const auto& m : rns::make_modulus_chain(prm.n, alpha, prm.p_bits, 64, c.q)) {
    c.p.push_back(m.q());
  }
  return c;
}

namespace {

std::size_t digit_start(std::size_t d, std::size_t limbs, std::size_t dnum) {
  const std::size_t base = limbs / dnum, extra = limbs % dnum;
  return d * base + std::min(d, extra);
}

}  // namespace

std::size_t digit_count(std::size_t level, std::size_t limbs, std::size_t dnum) {
  std::size_t d = 0;
  while (d < dnum && digit_start(d, limbs, dnum) <= level) ++d;
  return d;
}

std::pair<std::size_t, std::size_t> digit_range(std::size_t d, std::size_t level,
                                                std::size_t limbs, std::size_t dnum) {
  if (d >= digit_count(level, limbs, dnum)) throw InvalidArgument("digit index out of range");
  return {digit_start(d, limbs, dnum),
          std::min(digit_start(d + 1, limbs, dnum), level + 1)};
}

}  // namespace effact::workloads
