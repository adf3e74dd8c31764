// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "effact/rns/modulus.hpp"

namespace effact::workloads {

struct WorkloadParams {
  std::size_t n = 1024;
  std::size_t L = 4;     // top level; the chain has L+1 ciphertext primes
  std::size_t l = 4;     // working level, l <= L
  std::size_t dnum = 2;  // key-switching digits
  std::size_t slots = 64;
  // Bootstrapping level budget.
  std::size_t L_boot = 0;
  std::size_t L_cts = 0;
  std::size_t L_stc = 0;
  std::size_t L_evalmod = 0;
  unsigned q0_bits = 58;
  unsigned q_bits = 40;
  unsigned p_bits = 59;

  /// Throws InvalidArgument: n not a power of two >= 8, l > L, dnum == 0,
  /// or a level budget that does not add up or exceeds L.
  void validate() const;
  bool has_boot_budget() const { return L_boot != 0; }

  /// Fully-packed bootstrapping setting: N=2^16, L=24, dnum=4, log q=54,
  /// L_boot=15 split 4/8/3 over CtS/EvalMod/StC.
  static WorkloadParams table3();
  /// Small bootstrapping setting that runs through the golden executor.
  static WorkloadParams desk_boot();
};

/// Prime chain matching the CKKS context: q_0 (q0_bits), q_1..q_L
/// (q_bits), then alpha = ceil((L+1)/dnum) special primes (p_bits).
struct ModulusChain {
  std::vector<rns::Word> q;
  std::vector<rns::Word> p;
  std::size_t alpha() const { return p.size(); }
  /// Program modulus index of q_j and p_k.
  std::uint32_t qi(std::size_t j) const { return static_cast<std::uint32_t>(j); }
  std::uint32_t pi(std::size_t k) const { return static_cast<std::uint32_t>(q.size() + k); }
  std::vector<rns::Word> all() const;
};
ModulusChain make_chain(const WorkloadParams& p);

/// Digit layout of a key switch at `level` with `limbs` = L+1 chain
/// primes: the first (L+1) mod dnum digits are one limb longer; digits
/// starting above `level` are absent and the last is clipped.
std::size_t digit_count(std::size_t level, std::size_t limbs, std::size_t dnum);
std::pair<std::size_t, std::size_t> digit_range(std::size_t d, std::size_t level,
                                                std::size_t limbs, std::size_t dnum);

}  // namespace effact::workloads
