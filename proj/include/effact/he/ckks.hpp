// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "effact/kernels/bconv.hpp"
#include "effact/kernels/residue_poly.hpp"

namespace effact::he {

using kernels::RnsPoly;
using rns::Word;
using Complex = std::complex<double>;

/// Desk-scale RNS-CKKS parameters. The ciphertext chain has L+1 primes
/// (q_0 wide, q_1..q_L near the scale); the special chain has alpha =
/// ceil((L+1)/dnum) primes.
struct CkksParams {
  std::size_t n = 1024;
  std::size_t L = 4;
  std::size_t dnum = 2;
  unsigned q0_bits = 58;
  unsigned q_bits = 40;
  unsigned p_bits = 59;
  double scale = 1099511627776.0;  // 2^40

  /// Throws InvalidArgument outside n <= 2^12, L <= 8, dnum in {1, 2, 4}.
  void validate() const;
};

/// Moduli, bases and cached conversion tables for one parameter set.
class Context {
 public:
  explicit Context(const CkksParams& p);

  const CkksParams& params() const { return params_; }
  std::size_t n() const { return params_.n; }
  std::size_t max_level() const { return params_.L; }
  /// Limbs per digit.
  std::size_t alpha() const { return alpha_; }
  std::size_t special_count() const { return p_.size(); }

  const rns::RnsBasis& q_basis() const { return q_; }
  const rns::RnsBasis& p_basis() const { return p_; }
  /// q_0 .. q_level.
  rns::RnsBasis level_basis(std::size_t level) const;
  /// q_0 .. q_level followed by p_0 .. p_{K-1}.
  rns::RnsBasis extended_basis(std::size_t level) const;

  /// Number of digits at `level` and the half-open limb range of digit d.
  std::size_t digit_count(std::size_t level) const;
  std::pair<std::size_t, std::size_t> digit_range(std::size_t d,
                                                  std::size_t level) const;
  /// Ciphertext limbs outside digit d, then the special primes.
  rns::RnsBasis digit_complement(std::size_t d, std::size_t level) const;

  const kernels::BconvTables& modup_tables(std::size_t d,
                                           std::size_t level) const;
  const kernels::BconvTables& moddown_tables(std::size_t level) const;
  /// SM(P^-1 mod q_j).
  Word p_inv_sm(std::size_t j) const { return p_inv_sm_[j]; }

 private:
  CkksParams params_;
  std::size_t alpha_ = 1;
  rns::RnsBasis q_;
  rns::RnsBasis p_;
  std::vector<Word> p_inv_sm_;
  mutable std::map<std::pair<std::size_t, std::size_t>,
                   std::unique_ptr<kernels::BconvTables>>
      modup_;
  mutable std::map<std::size_t, std::unique_ptr<kernels::BconvTables>> moddown_;
};

/// All polynomials below live in the NTT domain with SM representation.

struct SecretKey {
  std::vector<std::int64_t> coeffs;  // ternary
  RnsPoly s;                         // over extended_basis(L)
};

/// Switching key from some s' to s: per digit (b_d, a_d) over
/// extended_basis(L) with b_d = -a_d s + e_d + P*Qtilde_d*s'.
struct SwitchKey {
  std::vector<std::pair<RnsPoly, RnsPoly>> digits;
  std::size_t dnum() const { return digits.size(); }
};

struct KeySet {
  SecretKey secret;
  SwitchKey relin;                        // s^2 -> s
  std::map<std::int64_t, SwitchKey> rot;  // sigma_{5^k}(s) -> s
};

struct Plaintext {
  RnsPoly m;
  std::size_t level = 0;
  double scale = 1.0;
};

struct Ciphertext {
  RnsPoly c0;
  RnsPoly c1;
  std::size_t level = 0;
  double scale = 1.0;
};

/// Deterministic under `seed`. Rotation keys are generated for `rot_steps`.
KeySet keygen_small(const Context& ctx, std::span<const std::int64_t> rot_steps,
                    std::uint64_t seed);

/// Switching key for an arbitrary target secret s' (NTT/SM over
/// extended_basis(L)).
SwitchKey make_switch_key(const Context& ctx, const SecretKey& sk,
                          const RnsPoly& s_from, std::mt19937_64& rng);

/// Canonical-embedding encoding of up to n/2 complex slots.
Plaintext encode(const Context& ctx, std::span<const Complex> slots,
                 std::size_t level, double scale);
std::vector<Complex> decode(const Context& ctx, const Plaintext& pt);

/// Signed integer coefficients of a coefficient-domain plaintext, CRT
/// reconstructed over its level basis and centered.
std::vector<long double> plaintext_coefficients(const Context& ctx,
                                                const Plaintext& pt);

Ciphertext encrypt(const Context& ctx, const SecretKey& sk, const Plaintext& pt,
                   std::mt19937_64& rng);
Plaintext decrypt(const Context& ctx, const SecretKey& sk, const Ciphertext& ct);
/// Decrypts (d0, d1, d2) under (1, s, s^2).
Plaintext decrypt3(const Context& ctx, const SecretKey& sk, const RnsPoly& d0,
                   const RnsPoly& d1, const RnsPoly& d2, std::size_t level,
                   double scale);

Ciphertext hadd(const Ciphertext& a, const Ciphertext& b);

struct Tensor {
  RnsPoly d0, d1, d2;
};
/// d0 = a0 b0, d1 = a1 b0 + a0 b1, d2 = a1 b1.
Tensor tensor(const Ciphertext& a, const Ciphertext& b);

/// Returns (k0, k1) with k0 + k1 s ~= d2 s'. d2 is on level_basis(level).
std::pair<RnsPoly, RnsPoly> key_switch(const Context& ctx, const RnsPoly& d2,
                                       const SwitchKey& key);
/// Same pipeline with exact inverse NTTs, explicit SM/NM conversions and
/// the plain conversion kernel. Bit-identical to key_switch.
std::pair<RnsPoly, RnsPoly> key_switch_unmerged(const Context& ctx,
                                                const RnsPoly& d2,
                                                const SwitchKey& key);

/// Raised-modulus decomposition of `a`: per digit, the limbs over
/// extended_basis(level) (NTT/SM).
std::vector<RnsPoly> mod_up(const Context& ctx, const RnsPoly& a);
/// Inner product of decomposed digits with a switching key, before ModDown.
std::pair<RnsPoly, RnsPoly> key_inner_product(const Context& ctx,
                                              const std::vector<RnsPoly>& ext,
                                              const SwitchKey& key);
/// Division by P of an extended-basis polynomial (floor-style, see docs).
RnsPoly mod_down(const Context& ctx, const RnsPoly& a);

Ciphertext hmult(const Context& ctx, const Ciphertext& a, const Ciphertext& b,
                 const SwitchKey& relin, bool do_rescale = true);
Ciphertext rescale(const Context& ctx, const Ciphertext& ct);
Ciphertext hrot(const Context& ctx, const Ciphertext& ct, std::int64_t step,
                const KeySet& keys);
/// Rotations sharing one decomposition of c1.
std::vector<Ciphertext> hrot_hoisted(const Context& ctx, const Ciphertext& ct,
                                     std::span<const std::int64_t> steps,
                                     const KeySet& keys);

/// Slot-wise left rotation of a plain vector (oracle).
std::vector<Complex> rotate_slots(std::span<const Complex> v, std::int64_t s);

// Serialization: 32-byte header followed by little-endian 64-bit words.
std::vector<std::uint8_t> serialize(const Ciphertext& ct);
Ciphertext deserialize_ciphertext(const Context& ctx,
                                  std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize(const SwitchKey& key);
SwitchKey deserialize_switch_key(const Context& ctx,
                                 std::span<const std::uint8_t> bytes);

}  // namespace effact::he
