// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "effact/error.hpp"

namespace effact::rns {

using Word = std::uint64_t;
using DWord = unsigned __int128;

/// Largest supported modulus width. Products of two words then fit in a
/// 128-bit double word together with the Montgomery correction term.
inline constexpr unsigned kMaxModulusBits = 59;

/// Montgomery representation of a word.
///   NM: X          SM: X*R mod q          DM: X*R^2 mod q
enum class MontForm : std::uint8_t { NM = 0, SM = 1, DM = 2 };

const char* to_string(MontForm f);

/// Representation of MontMult(a, b) = a*b*R^-1: the R exponents add and one
/// is removed. Returns nullopt for NM*NM, which would leave R^-1.
std::optional<MontForm> compose(MontForm a, MontForm b);

/// Montgomery arithmetic context for an odd modulus q with radix R = 2^k.
/// No NTT structure is required; see Modulus for that.
class Montgomery {
 public:
  Montgomery() = default;
  explicit Montgomery(Word q, unsigned r_bits = 64);

  Word q() const { return q_; }
  unsigned r_bits() const { return r_bits_; }
  Word q_inv_neg() const { return q_inv_neg_; }
  Word r_mod_q() const { return r_mod_q_; }
  Word r2() const { return r2_; }

  /// x*y*R^-1 mod q. Requires x*y < q*R; in particular any x < R with y < q.
  Word mul(Word x, Word y) const {
    const DWord t = static_cast<DWord>(x) * y;
    const Word m = (static_cast<Word>(t) * q_inv_neg_) & mask_;
    DWord u = (t + static_cast<DWord>(m) * q_) >> r_bits_;
    Word r = static_cast<Word>(u);
    return r >= q_ ? r - q_ : r;
  }

  Word add(Word x, Word y) const {
    Word s = x + y;
    return s >= q_ ? s - q_ : s;
  }
  Word sub(Word x, Word y) const { return x >= y ? x - y : x + q_ - y; }
  Word neg(Word x) const { return x == 0 ? 0 : q_ - x; }

  Word sm_encode(Word x) const { return mul(x, r2_); }
  Word sm_decode(Word x) const { return mul(x, 1); }
  Word dm_encode(Word x) const { return mul(sm_encode(x), r2_); }
  /// Encodes a plain value into the requested representation.
  Word encode(Word x, MontForm f) const;

 private:
  Word q_ = 0;
  unsigned r_bits_ = 64;
  Word mask_ = ~Word{0};
  Word q_inv_neg_ = 0;
  Word r_mod_q_ = 0;
  Word r2_ = 0;
};

/// An NTT-friendly prime: q = 1 mod 2n, with a primitive 2n-th root of unity
/// and bit-reversed twiddle tables (Montgomery SM encoded).
class Modulus : public Montgomery {
 public:
  Modulus() = default;
  /// Throws InvalidArgument when q is not prime, q != 1 mod 2n, n is not a
  /// power of two, or the supplied omega is not a primitive 2n-th root.
  Modulus(Word q, std::size_t n, unsigned r_bits = 64,
          std::optional<Word> omega = std::nullopt);

  std::size_t n() const { return n_; }
  unsigned log_n() const { return log_n_; }
  Word omega() const { return omega_; }
  Word omega_inv() const { return omega_inv_; }
  Word n_inv() const { return n_inv_; }

  /// psi^brv(k), SM encoded, k in [0, n).
  std::span<const Word> twiddles() const { return tables_->fwd; }
  /// psi^-brv(k), SM encoded.
  std::span<const Word> inv_twiddles() const { return tables_->inv; }
  /// N^-1 mod q, SM encoded.
  Word n_inv_sm() const { return tables_->n_inv_sm; }

  bool operator==(const Modulus& o) const {
    return q() == o.q() && n_ == o.n_ && r_bits() == o.r_bits();
  }

 private:
  struct Tables {
    std::vector<Word> fwd;
    std::vector<Word> inv;
    Word n_inv_sm = 0;
  };
  std::size_t n_ = 0;
  unsigned log_n_ = 0;
  Word omega_ = 0;
  Word omega_inv_ = 0;
  Word n_inv_ = 0;
  std::shared_ptr<const Tables> tables_;
};

enum class BasisRole : std::uint8_t { Ciphertext, Extension };

/// Ordered set of moduli sharing one ring degree.
struct RnsBasis {
  std::vector<Modulus> moduli;
  BasisRole role = BasisRole::Ciphertext;

  RnsBasis() = default;
  /// Throws InvalidArgument on duplicate moduli or mixed ring degrees.
  explicit RnsBasis(std::vector<Modulus> m,
                    BasisRole r = BasisRole::Ciphertext);

  std::size_t size() const { return moduli.size(); }
  bool empty() const { return moduli.empty(); }
  const Modulus& operator[](std::size_t i) const { return moduli[i]; }
  std::size_t n() const { return moduli.empty() ? 0 : moduli.front().n(); }
  bool contains(Word q) const;
  /// Stable 64-bit fingerprint of the modulus values, used in file headers.
  std::uint64_t fingerprint() const;
};

// Word-level helpers.
Word pow_mod(Word base, Word exp, Word q);
Word inv_mod(Word x, Word q);
Word mul_mod(Word x, Word y, Word q);
bool is_prime(Word x);
unsigned bit_reverse(unsigned x, unsigned bits);

/// `count` distinct primes q = 1 mod 2n below 2^bits, found by downward
/// search from 2^bits and returned in ascending order. Primes listed in
/// `exclude` are skipped.
std::vector<Modulus> make_modulus_chain(std::size_t n, std::size_t count,
                                        unsigned bits, unsigned r_bits = 64,
                                        std::span<const Word> exclude = {});

}  // namespace effact::rns
