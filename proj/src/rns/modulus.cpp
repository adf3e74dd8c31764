// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/rns/modulus.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace effact::rns {

const char* to_string(MontForm f) {
  switch (f) {
    case MontForm::NM: return "NM";
    case MontForm::SM: return "SM";
    case MontForm::DM: return "DM";
  }
  return "?";
}

std::optional<MontForm> compose(MontForm a, MontForm b) {
  const int e = static_cast<int>(a) + static_cast<int>(b) - 1;
  if (e < 0 || e > 2) return std::nullopt;
  return static_cast<MontForm>(e);
}

Word mul_mod(Word x, Word y, Word q) {
  return static_cast<Word>((static_cast<DWord>(x) * y) % q);
}

Word pow_mod(Word base, Word exp, Word q) {
  Word result = 1 % q;
  base %= q;
  while (exp) {
    if (exp & 1) result = mul_mod(result, base, q);
    base = mul_mod(base, base, q);
    exp >>= 1;
  }
  return result;
}

Word inv_mod(Word x, Word q) {
  // Extended Euclid on signed 128-bit values.
  __int128 a = x % q, m = q, x0 = 0, x1 = 1;
  if (a == 0) throw InvalidArgument("inv_mod: zero has no inverse");
  while (a > 1) {
    if (m == 0) throw InvalidArgument("inv_mod: value not invertible");
    __int128 t = a / m;
    __int128 tmp = m;
    m = a % m;
    a = tmp;
    tmp = x0;
    x0 = x1 - t * x0;
    x1 = tmp;
  }
  if (a != 1) throw InvalidArgument("inv_mod: value not invertible");
  if (x1 < 0) x1 += q;
  return static_cast<Word>(x1);
}

bool is_prime(Word x) {
  if (x < 2) return false;
  static constexpr std::array<Word, 12> kBases = {2,  3,  5,  7,  11, 13,
                                                  17, 19, 23, 29, 31, 37};
  for (Word p : kBases) {
    if (x % p == 0) return x == p;
  }
  Word d = x - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (Word a : kBases) {
    Word y = pow_mod(a, d, x);
    if (y == 1 || y == x - 1) continue;
    bool composite = true;
    for (unsigned r = 1; r < s; ++r) {
      y = mul_mod(y, y, x);
      if (y == x - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

unsigned bit_reverse(unsigned x, unsigned bits) {
  unsigned r = 0;
  for (unsigned i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

Montgomery::Montgomery(Word q, unsigned r_bits) : q_(q), r_bits_(r_bits) {
  if (q < 3 || (q & 1) == 0) {
    throw InvalidArgument("Montgomery modulus must be odd and >= 3, got " +
                          std::to_string(q));
  }
  if (r_bits == 0 || r_bits > 64) {
    throw InvalidArgument("Montgomery radix exponent must be in [1, 64]");
  }
  if (r_bits < 64 && (Word{1} << r_bits) <= q) {
    throw InvalidArgument("Montgomery radix 2^" + std::to_string(r_bits) +
                          " must exceed q=" + std::to_string(q));
  }
  if (q >> kMaxModulusBits) {
    throw InvalidArgument("modulus " + std::to_string(q) + " exceeds " +
                          std::to_string(kMaxModulusBits) + " bits");
  }
  mask_ = r_bits == 64 ? ~Word{0} : (Word{1} << r_bits) - 1;
  // Newton iteration doubles the number of correct low bits each step.
  Word inv = q;
  for (int i = 0; i < 6; ++i) inv *= 2 - q * inv;
  q_inv_neg_ = (~inv + 1) & mask_;
  const DWord r = static_cast<DWord>(1) << r_bits;
  r_mod_q_ = static_cast<Word>(r % q);
  r2_ = mul_mod(r_mod_q_, r_mod_q_, q);
}

Word Montgomery::encode(Word x, MontForm f) const {
  switch (f) {
    case MontForm::NM: return x % q_;
    case MontForm::SM: return sm_encode(x % q_);
    case MontForm::DM: return dm_encode(x % q_);
  }
  return x;
}

Modulus::Modulus(Word q, std::size_t n, unsigned r_bits,
                 std::optional<Word> omega)
    : Montgomery(q, r_bits), n_(n) {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw InvalidArgument("ring degree must be a power of two, got " +
                          std::to_string(n));
  }
  if (!is_prime(q)) {
    throw InvalidArgument("modulus " + std::to_string(q) + " is not prime");
  }
  const Word two_n = 2 * static_cast<Word>(n);
  if ((q - 1) % two_n != 0) {
    throw InvalidArgument("modulus " + std::to_string(q) + " is not 1 mod " +
                          std::to_string(two_n));
  }
  while ((std::size_t{1} << log_n_) < n) ++log_n_;

  auto primitive = [&](Word w) {
    return pow_mod(w, n, q) == q - 1;  // order exactly 2n since 2n is 2^k
  };
  if (omega) {
    if (*omega >= q || !primitive(*omega)) {
      throw InvalidArgument("omega " + std::to_string(*omega) +
                            " is not a primitive " + std::to_string(two_n) +
                            "-th root mod " + std::to_string(q));
    }
    omega_ = *omega;
  } else {
    const Word e = (q - 1) / two_n;
    for (Word g = 2; g < q; ++g) {
      Word w = pow_mod(g, e, q);
      if (primitive(w)) {
        omega_ = w;
        break;
      }
    }
  }
  omega_inv_ = inv_mod(omega_, q);
  n_inv_ = inv_mod(static_cast<Word>(n % q), q);

  auto t = std::make_shared<Tables>();
  t->fwd.resize(n);
  t->inv.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const unsigned e = bit_reverse(static_cast<unsigned>(k), log_n_);
    t->fwd[k] = sm_encode(pow_mod(omega_, e, q));
    t->inv[k] = sm_encode(pow_mod(omega_inv_, e, q));
  }
  t->n_inv_sm = sm_encode(n_inv_);
  tables_ = std::move(t);
}

RnsBasis::RnsBasis(std::vector<Modulus> m, BasisRole r)
    : moduli(std::move(m)), role(r) {
  std::set<Word> seen;
  for (const auto& q : moduli) {
    if (!seen.insert(q.q()).second) {
      throw InvalidArgument("duplicate modulus " + std::to_string(q.q()) +
                            " in basis");
    }
    if (q.n() != moduli.front().n()) {
      throw InvalidArgument("basis moduli disagree on ring degree");
    }
  }
}

bool RnsBasis::contains(Word q) const {
  return std::any_of(moduli.begin(), moduli.end(),
                     [q](const Modulus& m) { return m.q() == q; });
}

std::uint64_t RnsBasis::fingerprint() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& m : moduli) {
    Word v = m.q();
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::vector<Modulus> make_modulus_chain(std::size_t n, std::size_t count,
                                        unsigned bits, unsigned r_bits,
                                        std::span<const Word> exclude) {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw InvalidArgument("ring degree must be a power of two");
  }
  if (bits > kMaxModulusBits || bits < 2) {
    throw InvalidArgument("modulus width must be in [2, " +
                          std::to_string(kMaxModulusBits) + "] bits");
  }
  std::vector<Modulus> out;
  if (count == 0) return out;
  const Word two_n = 2 * static_cast<Word>(n);
  const Word top = Word{1} << bits;
  // Largest candidate below 2^bits congruent to 1 mod 2n.
  Word cand = top - 1 - ((top - 2) % two_n);
  std::vector<Word> found;
  while (found.size() < count) {
    if (cand <= two_n) {
      throw InvalidArgument(
          "only " + std::to_string(found.size()) + " of " +
          std::to_string(count) + " primes = 1 mod " + std::to_string(two_n) +
          " exist in [" + std::to_string(two_n + 1) + ", 2^" +
          std::to_string(bits) + ")");
    }
    if (is_prime(cand) &&
        std::find(exclude.begin(), exclude.end(), cand) == exclude.end()) {
      found.push_back(cand);
    }
    cand -= two_n;
  }
  std::sort(found.begin(), found.end());
  out.reserve(found.size());
  for (Word q : found) out.emplace_back(q, n, r_bits);
  return out;
}

}  // namespace effact::rns
