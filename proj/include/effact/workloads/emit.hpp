// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "effact/workloads/builder.hpp"
#include "effact/workloads/params.hpp"

namespace effact::workloads {

/// Switching-key limb source: digit d, part 0 (b) or 1 (a), position m in
/// the full extended chain (q_0..q_L, p_0..p_{K-1}) and the modulus index.
/// Returns a register or a memory operand.
using KeyFetch =
    std::function<Operand(std::size_t d, int part, std::size_t m, std::uint32_t mod)>;

/// Ciphertext-level IR emission over a fixed chain. Every polynomial is a
/// LimbVec in the NTT domain with SM representation; ciphertext polynomials
/// hold limbs q_0..q_level, extended ones q_0..q_level then p_0..p_{K-1}.
class HeEmitter {
 public:
  HeEmitter(IrBuilder& b, const WorkloadParams& prm);

  IrBuilder& builder() { return b_; }
  const ModulusChain& chain() const { return chain_; }
  std::size_t limbs() const { return prm_.L + 1; }
  /// Stride of one key digit in the full extended chain.
  std::size_t key_stride() const { return prm_.L + 1 + chain_.alpha(); }

  LimbVec load_poly(std::uint32_t symbol, std::size_t offset, std::size_t level);
  void store_poly(const LimbVec& a, std::uint32_t symbol, std::size_t offset);

  /// Per digit: slice, exact INTT, to NM, base conversion to the
  /// complement, to SM, NTT, then reassembly over the extended basis.
  std::vector<LimbVec> mod_up(const LimbVec& a);
  /// Sum over digits of ext_d * key_d restricted to the level.
  std::pair<LimbVec, LimbVec> inner_product(const std::vector<LimbVec>& ext,
                                            const KeyFetch& key);
  /// (a_Q - NTT(conv(INTT(a_P)))) * P^-1.
  LimbVec mod_down(const LimbVec& ext);
  std::pair<LimbVec, LimbVec> key_switch(const LimbVec& a, const KeyFetch& key);

  /// Divides by the last prime with rounding; drops one limb.
  LimbVec rescale(const LimbVec& a);
  LimbVec add(const LimbVec& a, const LimbVec& b);
  LimbVec sub(const LimbVec& a, const LimbVec& b);
  LimbVec mul(const LimbVec& a, const LimbVec& b);
  /// Multiply by a plaintext stored limb by limb at symbol[offset + j],
  /// read directly as a memory operand.
  LimbVec mul_plain(const LimbVec& a, std::uint32_t symbol, std::size_t offset);
  LimbVec add_plain(const LimbVec& a, std::uint32_t symbol, std::size_t offset);
  /// acc + a*b with the product as a separate multiply.
  LimbVec mul_add(const LimbVec& acc, const LimbVec& a, const LimbVec& b);
  LimbVec mul_plain_add(const LimbVec& acc, const LimbVec& a, std::uint32_t symbol,
                        std::size_t offset);
  LimbVec automorphism(const LimbVec& a, std::int64_t step);
  /// Keeps limbs q_0..q_level.
  static LimbVec drop_to(const LimbVec& a, std::size_t level);
  static std::size_t level_of(const LimbVec& a) { return a.size() - 1; }

  struct Ct {
    LimbVec c0, c1;
    std::size_t level() const { return c0.size() - 1; }
  };
  struct Tensor {
    LimbVec d0, d1, d2;
  };
  Ct load_ct(std::uint32_t symbol, std::size_t level);
  void store_ct(const Ct& ct, std::uint32_t symbol);
  Tensor tensor(const Ct& a, const Ct& b);
  /// acc + tensor(a, b), products fused with the accumulation.
  Tensor tensor_add(const Tensor& acc, const Ct& a, const Ct& b);
  Ct relinearize(const Tensor& t, const KeyFetch& relin);
  Ct hmult(const Ct& a, const Ct& b, const KeyFetch& relin, bool do_rescale = true);
  Ct hadd(const Ct& a, const Ct& b);
  Ct hrot(const Ct& a, std::int64_t step, const KeyFetch& key);
  /// Rotations sharing one decomposition of c1; keys[i] belongs to steps[i].
  std::vector<Ct> hrot_hoisted(const Ct& a, const std::vector<std::int64_t>& steps,
                               const std::vector<KeyFetch>& keys);
  Ct rescale(const Ct& a) { return {rescale(a.c0), rescale(a.c1)}; }
  static Ct drop_to(const Ct& a, std::size_t level) {
    return {drop_to(a.c0, level), drop_to(a.c1, level)};
  }

  /// Key fetch reading limbs straight from memory at
  /// b_sym/a_sym[(id*dnum + d)*key_stride + m].
  KeyFetch key_from_memory(std::uint32_t b_sym, std::uint32_t a_sym, std::size_t id) const;
  /// Same layout but each limb is loaded into a register first.
  KeyFetch key_with_loads(std::uint32_t b_sym, std::uint32_t a_sym, std::size_t id);

 private:
  std::uint32_t q(std::size_t j) const { return chain_.qi(j); }
  std::uint32_t p(std::size_t k) const { return chain_.pi(k); }

  IrBuilder& b_;
  WorkloadParams prm_;
  ModulusChain chain_;
};

}  // namespace effact::workloads
