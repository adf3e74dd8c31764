// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/he/ckks.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include "effact/kernels/ntt.hpp"
#include "effact/kernels/rns_ops.hpp"
#include "effact/kernels/vector_ops.hpp"

namespace effact::he {

using boost::multiprecision::cpp_int;
using kernels::Domain;
using kernels::Order;
using kernels::ResiduePoly;
using rns::MontForm;

void CkksParams::validate() const {
  if (n < 2 || n > 4096 || (n & (n - 1)) != 0) {
    throw InvalidArgument("CKKS ring degree must be a power of two in [2, 4096]");
  }
  if (L > 8) throw InvalidArgument("CKKS depth L must be at most 8");
  if (dnum != 1 && dnum != 2 && dnum != 4) {
    throw InvalidArgument("dnum must be 1, 2 or 4");
  }
  if (dnum > L + 1) {
    throw InvalidArgument("dnum exceeds the number of ciphertext primes");
  }
  if (q_bits < 20 || q0_bits < q_bits || p_bits < q_bits ||
      p_bits > rns::kMaxModulusBits || q0_bits > rns::kMaxModulusBits) {
    throw InvalidArgument("unsupported modulus widths");
  }
  if (!(scale > 1.0)) throw InvalidArgument("scale must exceed 1");
}

namespace {

std::vector<Word> values_of(const rns::RnsBasis& b) {
  std::vector<Word> v;
  for (const auto& m : b.moduli) v.push_back(m.q());
  return v;
}

// Digit d covers limbs [start(d), start(d+1)) of the full chain; the first
// (L+1) mod dnum digits are one limb longer.
std::size_t digit_start(std::size_t d, std::size_t limbs, std::size_t dnum) {
  const std::size_t base = limbs / dnum, extra = limbs % dnum;
  return d * base + std::min(d, extra);
}

RnsPoly restrict_to_level(const Context& ctx, const RnsPoly& full,
                          std::size_t level) {
  const std::size_t nq = ctx.max_level() + 1;
  if (full.size() == level + 1) return full;
  if (full.size() == nq) return kernels::rns_slice(full, 0, level + 1);
  return kernels::rns_concat(kernels::rns_slice(full, 0, level + 1),
                             kernels::rns_slice(full, nq, ctx.special_count()));
}

// Secret limbs q_0 .. q_level.
RnsPoly secret_at(const SecretKey& sk, std::size_t level) {
  return kernels::rns_slice(sk.s, 0, level + 1);
}

// Signed coefficients -> NTT/SM polynomial.
RnsPoly from_signed(const rns::RnsBasis& b, std::span<const std::int64_t> c) {
  std::vector<ResiduePoly> limbs;
  for (const auto& m : b.moduli) {
    std::vector<Word> w(c.size());
    const auto q = static_cast<std::int64_t>(m.q());
    for (std::size_t i = 0; i < c.size(); ++i) {
      std::int64_t v = c[i] % q;
      if (v < 0) v += q;
      w[i] = m.sm_encode(static_cast<Word>(v));
    }
    limbs.push_back(kernels::ntt_fwd(ResiduePoly(m, std::move(w), Domain::Coefficient,
                                                 Order::Natural, MontForm::SM)));
  }
  return RnsPoly(b, std::move(limbs));
}

RnsPoly sample_uniform(const rns::RnsBasis& b, std::mt19937_64& rng) {
  std::vector<ResiduePoly> limbs;
  for (const auto& m : b.moduli) {
    std::uniform_int_distribution<Word> dist(0, m.q() - 1);
    std::vector<Word> w(m.n());
    for (auto& x : w) x = dist(rng);
    limbs.emplace_back(m, std::move(w), Domain::Ntt, Order::BitReversed,
                       MontForm::SM);
  }
  return RnsPoly(b, std::move(limbs));
}

// Centered binomial with 21 coin pairs (standard deviation ~3.24).
std::vector<std::int64_t> sample_error(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::int64_t> e(n);
  for (auto& x : e) {
    const std::uint64_t r = rng();
    x = std::popcount(r & 0x1fffff) - std::popcount((r >> 21) & 0x1fffff);
  }
  return e;
}

void check_same_level(const Ciphertext& a, const Ciphertext& b, const char* op) {
  if (a.level != b.level) {
    throw InvalidArgument(std::string(op) + ": level mismatch (" +
                          std::to_string(a.level) + " vs " +
                          std::to_string(b.level) + ")");
  }
}

}  // namespace

Context::Context(const CkksParams& p) : params_(p) {
  p.validate();
  auto q0 = rns::make_modulus_chain(p.n, 1, p.q0_bits);
  std::vector<Word> used{q0[0].q()};
  auto rest = rns::make_modulus_chain(p.n, p.L, p.q_bits, 64, used);
  std::vector<rns::Modulus> qs = q0;
  qs.insert(qs.end(), rest.begin(), rest.end());
  q_ = rns::RnsBasis(std::move(qs), rns::BasisRole::Ciphertext);
  alpha_ = (p.L + 1 + p.dnum - 1) / p.dnum;
  p_ = rns::RnsBasis(rns::make_modulus_chain(p.n, alpha_, p.p_bits, 64, values_of(q_)),
                     rns::BasisRole::Extension);
  for (const auto& q : q_.moduli) {
    Word pm = 1;
    for (const auto& pi : p_.moduli) pm = rns::mul_mod(pm, pi.q() % q.q(), q.q());
    p_inv_sm_.push_back(q.sm_encode(rns::inv_mod(pm, q.q())));
  }
}

rns::RnsBasis Context::level_basis(std::size_t level) const {
  if (level > params_.L) throw InvalidArgument("level exceeds L");
  return rns::RnsBasis(std::vector<rns::Modulus>(q_.moduli.begin(),
                                                 q_.moduli.begin() + level + 1),
                       rns::BasisRole::Ciphertext);
}

rns::RnsBasis Context::extended_basis(std::size_t level) const {
  auto m = level_basis(level).moduli;
  m.insert(m.end(), p_.moduli.begin(), p_.moduli.end());
  return rns::RnsBasis(std::move(m), rns::BasisRole::Ciphertext);
}

std::size_t Context::digit_count(std::size_t level) const {
  std::size_t d = 0;
  while (d < params_.dnum &&
         digit_start(d, params_.L + 1, params_.dnum) <= level) {
    ++d;
  }
  return d;
}

std::pair<std::size_t, std::size_t> Context::digit_range(std::size_t d,
                                                         std::size_t level) const {
  if (d >= digit_count(level)) throw InvalidArgument("digit index out of range");
  const std::size_t lo = digit_start(d, params_.L + 1, params_.dnum);
  const std::size_t hi = std::min(digit_start(d + 1, params_.L + 1, params_.dnum),
                                  level + 1);
  return {lo, hi};
}

rns::RnsBasis Context::digit_complement(std::size_t d, std::size_t level) const {
  const auto [lo, hi] = digit_range(d, level);
  std::vector<rns::Modulus> m;
  for (std::size_t j = 0; j <= level; ++j) {
    if (j < lo || j >= hi) m.push_back(q_[j]);
  }
  m.insert(m.end(), p_.moduli.begin(), p_.moduli.end());
  return rns::RnsBasis(std::move(m), rns::BasisRole::Extension);
}

const kernels::BconvTables& Context::modup_tables(std::size_t d,
                                                  std::size_t level) const {
  auto& slot = modup_[{d, level}];
  if (!slot) {
    const auto [lo, hi] = digit_range(d, level);
    rns::RnsBasis from(std::vector<rns::Modulus>(q_.moduli.begin() + lo,
                                                 q_.moduli.begin() + hi));
    slot = std::make_unique<kernels::BconvTables>(std::move(from),
                                                  digit_complement(d, level));
  }
  return *slot;
}

const kernels::BconvTables& Context::moddown_tables(std::size_t level) const {
  auto& slot = moddown_[level];
  if (!slot) {
    slot = std::make_unique<kernels::BconvTables>(p_, level_basis(level));
  }
  return *slot;
}

SwitchKey make_switch_key(const Context& ctx, const SecretKey& sk,
                          const RnsPoly& s_from, std::mt19937_64& rng) {
  const std::size_t L = ctx.max_level();
  const auto ext = ctx.extended_basis(L);
  SwitchKey key;
  for (std::size_t d = 0; d < ctx.digit_count(L); ++d) {
    const auto [lo, hi] = ctx.digit_range(d, L);
    RnsPoly a = sample_uniform(ext, rng);
    const auto e = sample_error(ctx.n(), rng);
    RnsPoly b = kernels::rns_add(kernels::rns_neg(kernels::rns_mul(a, sk.s)),
                                 from_signed(ext, e));
    for (std::size_t j = lo; j < hi; ++j) {
      const auto& q = ext[j];
      Word pm = 1;
      for (const auto& pi : ctx.p_basis().moduli) {
        pm = rns::mul_mod(pm, pi.q() % q.q(), q.q());
      }
      b[j] = kernels::vec_madd(
          b[j], kernels::vec_mmul(s_from[j], q.sm_encode(pm), MontForm::SM));
    }
    key.digits.emplace_back(std::move(b), std::move(a));
  }
  return key;
}

KeySet keygen_small(const Context& ctx, std::span<const std::int64_t> rot_steps,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  KeySet ks;
  ks.secret.coeffs.resize(ctx.n());
  std::uniform_int_distribution<int> tern(-1, 1);
  for (auto& c : ks.secret.coeffs) c = tern(rng);
  const auto ext = ctx.extended_basis(ctx.max_level());
  ks.secret.s = from_signed(ext, ks.secret.coeffs);
  ks.relin = make_switch_key(ctx, ks.secret,
                             kernels::rns_mul(ks.secret.s, ks.secret.s), rng);
  for (std::int64_t step : rot_steps) {
    if (ks.rot.count(step)) continue;
    ks.rot[step] = make_switch_key(
        ctx, ks.secret, kernels::rns_automorphism(ks.secret.s, step), rng);
  }
  return ks;
}

namespace {

std::vector<Complex> root_table(std::size_t n) {
  std::vector<Complex> t(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) {
    const double a = std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    t[k] = Complex(std::cos(a), std::sin(a));
  }
  return t;
}

std::vector<std::size_t> slot_exponents(std::size_t n) {
  std::vector<std::size_t> e(n / 2);
  std::size_t g = 1;
  for (auto& x : e) {
    x = g;
    g = g * 5 % (2 * n);
  }
  return e;
}

}  // namespace

Plaintext encode(const Context& ctx, std::span<const Complex> slots,
                 std::size_t level, double scale) {
  const std::size_t n = ctx.n();
  if (slots.size() > n / 2) throw InvalidArgument("too many slots for ring degree");
  const auto roots = root_table(n);
  const auto ex = slot_exponents(n);
  std::vector<std::int64_t> coeffs(n);
  for (std::size_t i = 0; i < n; ++i) {
    long double acc = 0;
    for (std::size_t j = 0; j < slots.size(); ++j) {
      // z_j * zeta_j^-i, zeta_j = zeta^(5^j)
      const Complex w = roots[(2 * n - (ex[j] * i) % (2 * n)) % (2 * n)];
      acc += slots[j].real() * w.real() - slots[j].imag() * w.imag();
    }
    const long double v = std::round(acc * 2.0L / n * scale);
    if (std::fabs(v) > 9.0e18L) throw InvalidArgument("encoded value overflows");
    coeffs[i] = static_cast<std::int64_t>(v);
  }
  return {from_signed(ctx.level_basis(level), coeffs), level, scale};
}

std::vector<long double> plaintext_coefficients(const Context& ctx,
                                                const Plaintext& pt) {
  const auto basis = ctx.level_basis(pt.level);
  RnsPoly m = pt.m;
  if (m.domain() == Domain::Ntt) m = kernels::rns_ntt_inv(m);
  m = kernels::rns_to_form(m, MontForm::NM);
  cpp_int big_q = 1;
  for (const auto& q : basis.moduli) big_q *= q.q();
  std::vector<cpp_int> basis_terms;
  for (const auto& q : basis.moduli) {
    const cpp_int qhat = big_q / q.q();
    const Word inv = rns::inv_mod(cpp_int(qhat % q.q()).convert_to<Word>(), q.q());
    basis_terms.push_back(qhat * inv);
  }
  const cpp_int half = big_q / 2;
  std::vector<long double> out(ctx.n());
  for (std::size_t i = 0; i < ctx.n(); ++i) {
    cpp_int v = 0;
    for (std::size_t j = 0; j < basis.size(); ++j) v += basis_terms[j] * m[j].coeffs[i];
    v %= big_q;
    if (v > half) v -= big_q;
    out[i] = v.convert_to<long double>();
  }
  return out;
}

std::vector<Complex> decode(const Context& ctx, const Plaintext& pt) {
  const std::size_t n = ctx.n();
  const auto coeffs = plaintext_coefficients(ctx, pt);
  const auto roots = root_table(n);
  const auto ex = slot_exponents(n);
  std::vector<Complex> z(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    long double re = 0, im = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex w = roots[(ex[j] * i) % (2 * n)];
      re += coeffs[i] * w.real();
      im += coeffs[i] * w.imag();
    }
    z[j] = Complex(static_cast<double>(re / pt.scale),
                   static_cast<double>(im / pt.scale));
  }
  return z;
}

Ciphertext encrypt(const Context& ctx, const SecretKey& sk, const Plaintext& pt,
                   std::mt19937_64& rng) {
  const auto basis = ctx.level_basis(pt.level);
  RnsPoly a = sample_uniform(basis, rng);
  const auto e = sample_error(ctx.n(), rng);
  const RnsPoly s = secret_at(sk, pt.level);
  RnsPoly c0 = kernels::rns_add(
      kernels::rns_add(kernels::rns_neg(kernels::rns_mul(a, s)), from_signed(basis, e)),
      pt.m);
  return {std::move(c0), std::move(a), pt.level, pt.scale};
}

Plaintext decrypt(const Context& ctx, const SecretKey& sk, const Ciphertext& ct) {
  const RnsPoly s = secret_at(sk, ct.level);
  return {kernels::rns_add(ct.c0, kernels::rns_mul(ct.c1, s)), ct.level, ct.scale};
}

Plaintext decrypt3(const Context& ctx, const SecretKey& sk, const RnsPoly& d0,
                   const RnsPoly& d1, const RnsPoly& d2, std::size_t level,
                   double scale) {
  const RnsPoly s = secret_at(sk, level);
  const RnsPoly s2 = kernels::rns_mul(s, s);
  return {kernels::rns_add(kernels::rns_add(d0, kernels::rns_mul(d1, s)),
                           kernels::rns_mul(d2, s2)),
          level, scale};
}

Ciphertext hadd(const Ciphertext& a, const Ciphertext& b) {
  check_same_level(a, b, "hadd");
  if (std::fabs(a.scale - b.scale) > 1e-9 * a.scale) {
    throw InvalidArgument("hadd: scale mismatch");
  }
  return {kernels::rns_add(a.c0, b.c0), kernels::rns_add(a.c1, b.c1), a.level,
          a.scale};
}

Tensor tensor(const Ciphertext& a, const Ciphertext& b) {
  check_same_level(a, b, "hmult");
  return {kernels::rns_mul(a.c0, b.c0),
          kernels::rns_add(kernels::rns_mul(a.c1, b.c0), kernels::rns_mul(a.c0, b.c1)),
          kernels::rns_mul(a.c1, b.c1)};
}

namespace {

std::size_t level_of(const Context& ctx, const RnsPoly& a) {
  if (a.size() == 0 || a.size() > ctx.max_level() + 1) {
    throw StructuralError("polynomial is not on a ciphertext level basis");
  }
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a.basis[j].q() != ctx.q_basis()[j].q()) {
      throw StructuralError("polynomial basis does not match the modulus chain");
    }
  }
  if (a.domain() != Domain::Ntt || a.repr() != MontForm::SM) {
    throw ContractError("key switching expects NTT-domain SM input");
  }
  return a.size() - 1;
}

// Reassembles digit d of `a` over extended_basis(level): its own limbs are
// taken verbatim, the rest come from the converted polynomial `conv`.
RnsPoly assemble_digit(const Context& ctx, const RnsPoly& a, const RnsPoly& conv,
                       std::size_t d, std::size_t level) {
  const auto [lo, hi] = ctx.digit_range(d, level);
  std::vector<ResiduePoly> limbs;
  std::size_t k = 0;
  for (std::size_t j = 0; j <= level; ++j) {
    if (j >= lo && j < hi) {
      limbs.push_back(a[j]);
    } else {
      limbs.push_back(conv[k++]);
    }
  }
  for (; k < conv.size(); ++k) limbs.push_back(conv[k]);
  return RnsPoly(ctx.extended_basis(level), std::move(limbs));
}

template <typename Conv>
std::vector<RnsPoly> mod_up_with(const Context& ctx, const RnsPoly& a, Conv&& conv) {
  const std::size_t level = level_of(ctx, a);
  std::vector<RnsPoly> out;
  for (std::size_t d = 0; d < ctx.digit_count(level); ++d) {
    const auto [lo, hi] = ctx.digit_range(d, level);
    const RnsPoly digit = kernels::rns_slice(a, lo, hi - lo);
    const RnsPoly y = kernels::rns_ntt_fwd(conv(digit, ctx.modup_tables(d, level)));
    out.push_back(assemble_digit(ctx, a, y, d, level));
  }
  return out;
}

template <typename Conv>
RnsPoly mod_down_with(const Context& ctx, const RnsPoly& a, Conv&& conv) {
  const std::size_t K = ctx.special_count();
  if (a.size() <= K) throw StructuralError("mod_down: missing ciphertext limbs");
  const std::size_t level = a.size() - K - 1;
  const RnsPoly ac = kernels::rns_slice(a, 0, level + 1);
  const RnsPoly ap = kernels::rns_slice(a, level + 1, K);
  const RnsPoly z = kernels::rns_ntt_fwd(conv(ap, ctx.moddown_tables(level)));
  std::vector<Word> pinv(level + 1);
  for (std::size_t j = 0; j <= level; ++j) pinv[j] = ctx.p_inv_sm(j);
  RnsPoly diff = kernels::rns_sub(ac, z);
  return kernels::rns_mul_scalar(diff, pinv, MontForm::SM);
}

RnsPoly merged_conv(const RnsPoly& x, const kernels::BconvTables& t) {
  return kernels::bconv_merged(kernels::rns_ntt_inv(x, true), t);
}

RnsPoly unmerged_conv(const RnsPoly& x, const kernels::BconvTables& t) {
  const RnsPoly nm = kernels::rns_to_form(kernels::rns_ntt_inv(x, false), MontForm::NM);
  return kernels::rns_to_form(kernels::bconv(nm, t), MontForm::SM);
}

}  // namespace

std::vector<RnsPoly> mod_up(const Context& ctx, const RnsPoly& a) {
  return mod_up_with(ctx, a, merged_conv);
}

RnsPoly mod_down(const Context& ctx, const RnsPoly& a) {
  return mod_down_with(ctx, a, merged_conv);
}

std::pair<RnsPoly, RnsPoly> key_inner_product(const Context& ctx,
                                              const std::vector<RnsPoly>& ext,
                                              const SwitchKey& key) {
  if (ext.empty()) throw StructuralError("key switching needs at least one digit");
  if (ext.size() > key.dnum()) {
    throw StructuralError("switching key has " + std::to_string(key.dnum()) +
                          " digits, input needs " + std::to_string(ext.size()));
  }
  const std::size_t level = ext[0].size() - ctx.special_count() - 1;
  RnsPoly acc0, acc1;
  for (std::size_t d = 0; d < ext.size(); ++d) {
    const RnsPoly b = restrict_to_level(ctx, key.digits[d].first, level);
    const RnsPoly a = restrict_to_level(ctx, key.digits[d].second, level);
    if (d == 0) {
      acc0 = kernels::rns_mul(ext[d], b);
      acc1 = kernels::rns_mul(ext[d], a);
    } else {
      acc0 = kernels::rns_mac(acc0, ext[d], b);
      acc1 = kernels::rns_mac(acc1, ext[d], a);
    }
  }
  return {std::move(acc0), std::move(acc1)};
}

std::pair<RnsPoly, RnsPoly> key_switch(const Context& ctx, const RnsPoly& d2,
                                       const SwitchKey& key) {
  auto [a0, a1] = key_inner_product(ctx, mod_up(ctx, d2), key);
  return {mod_down(ctx, a0), mod_down(ctx, a1)};
}

std::pair<RnsPoly, RnsPoly> key_switch_unmerged(const Context& ctx,
                                                const RnsPoly& d2,
                                                const SwitchKey& key) {
  auto [a0, a1] =
      key_inner_product(ctx, mod_up_with(ctx, d2, unmerged_conv), key);
  return {mod_down_with(ctx, a0, unmerged_conv),
          mod_down_with(ctx, a1, unmerged_conv)};
}

Ciphertext rescale(const Context& ctx, const Ciphertext& ct) {
  if (ct.level == 0) throw InvalidArgument("rescale: level exhausted");
  const std::size_t l = ct.level;
  const rns::Modulus& ql = ctx.q_basis()[l];
  const Word h = ql.q() >> 1;
  auto drop = [&](const RnsPoly& c) {
    // Last limb to coefficients, shifted by q_l/2 so truncation rounds.
    ResiduePoly last = kernels::to_form(
        kernels::vec_madd(kernels::ntt_inv(c[l]), ql.sm_encode(h)), MontForm::NM);
    std::vector<ResiduePoly> limbs;
    for (std::size_t j = 0; j < l; ++j) {
      const rns::Modulus& qj = ctx.q_basis()[j];
      ResiduePoly w(qj, std::vector<Word>(ctx.n()), Domain::Coefficient,
                    Order::Natural, MontForm::SM);
      kernels::mmul_scalar(last.coeffs, qj.r2(), w.coeffs, qj);
      w = kernels::ntt_fwd(kernels::vec_madd(w, qj.neg(qj.sm_encode(h % qj.q()))));
      const Word inv = qj.sm_encode(rns::inv_mod(ql.q() % qj.q(), qj.q()));
      limbs.push_back(kernels::vec_mmul(kernels::vec_msub(c[j], w), inv, MontForm::SM));
    }
    return RnsPoly(ctx.level_basis(l - 1), std::move(limbs));
  };
  return {drop(ct.c0), drop(ct.c1), l - 1, ct.scale / static_cast<double>(ql.q())};
}

Ciphertext hmult(const Context& ctx, const Ciphertext& a, const Ciphertext& b,
                 const SwitchKey& relin, bool do_rescale) {
  if (do_rescale && a.level == 0) throw InvalidArgument("hmult: level exhausted");
  const Tensor t = tensor(a, b);
  auto [k0, k1] = key_switch(ctx, t.d2, relin);
  Ciphertext r{kernels::rns_add(t.d0, k0), kernels::rns_add(t.d1, k1), a.level,
               a.scale * b.scale};
  return do_rescale ? rescale(ctx, r) : r;
}

namespace {

const SwitchKey& rotation_key(const KeySet& keys, std::int64_t step) {
  auto it = keys.rot.find(step);
  if (it == keys.rot.end()) {
    throw InvalidArgument("no rotation key for step " + std::to_string(step));
  }
  return it->second;
}

}  // namespace

Ciphertext hrot(const Context& ctx, const Ciphertext& ct, std::int64_t step,
                const KeySet& keys) {
  if (step == 0 && !keys.rot.count(0)) return ct;
  const SwitchKey& key = rotation_key(keys, step);
  const RnsPoly c0 = kernels::rns_automorphism(ct.c0, step);
  const RnsPoly c1 = kernels::rns_automorphism(ct.c1, step);
  auto [k0, k1] = key_switch(ctx, c1, key);
  return {kernels::rns_add(c0, k0), std::move(k1), ct.level, ct.scale};
}

std::vector<Ciphertext> hrot_hoisted(const Context& ctx, const Ciphertext& ct,
                                     std::span<const std::int64_t> steps,
                                     const KeySet& keys) {
  const std::vector<RnsPoly> ext = mod_up(ctx, ct.c1);
  std::vector<Ciphertext> out;
  for (std::int64_t step : steps) {
    const SwitchKey& key = rotation_key(keys, step);
    std::vector<RnsPoly> rotated;
    for (const auto& e : ext) rotated.push_back(kernels::rns_automorphism(e, step));
    auto [a0, a1] = key_inner_product(ctx, rotated, key);
    out.push_back({kernels::rns_add(kernels::rns_automorphism(ct.c0, step),
                                    mod_down(ctx, a0)),
                   mod_down(ctx, a1), ct.level, ct.scale});
  }
  return out;
}

std::vector<Complex> rotate_slots(std::span<const Complex> v, std::int64_t s) {
  const auto n = static_cast<std::int64_t>(v.size());
  std::vector<Complex> r(v.size());
  for (std::int64_t j = 0; j < n; ++j) r[j] = v[((j + s) % n + n) % n];
  return r;
}

// Serialization.

namespace {

constexpr std::uint32_t kMagic = 0x54434645;  // "EFCT"
constexpr std::uint8_t kVersion = 1;
constexpr std::uint8_t kKindCiphertext = 1;
constexpr std::uint8_t kKindSwitchKey = 2;

struct Header {
  std::uint32_t magic;
  std::uint8_t version;
  std::uint8_t kind;
  std::uint16_t limbs;
  std::uint32_t n;
  std::uint16_t level;
  std::uint16_t components;
  double scale;
  std::uint64_t fingerprint;
};
static_assert(sizeof(Header) == 32);

void put_poly(std::vector<std::uint8_t>& out, const RnsPoly& p) {
  for (const auto& l : p.limbs) {
    for (Word w : l.coeffs) {
      for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(w >> (8 * b)));
    }
  }
}

RnsPoly get_poly(const rns::RnsBasis& basis, std::span<const std::uint8_t> in,
                 std::size_t& off) {
  std::vector<ResiduePoly> limbs;
  for (const auto& m : basis.moduli) {
    std::vector<Word> w(m.n());
    for (auto& x : w) {
      x = 0;
      for (int b = 0; b < 8; ++b) x |= static_cast<Word>(in[off + b]) << (8 * b);
      off += 8;
    }
    ResiduePoly r(m, std::move(w), Domain::Ntt, Order::BitReversed, MontForm::SM);
    r.validate();
    limbs.push_back(std::move(r));
  }
  return RnsPoly(basis, std::move(limbs));
}

std::vector<std::uint8_t> write_header(const Header& h) {
  std::vector<std::uint8_t> out(sizeof(Header));
  // Field-wise little-endian write keeps the layout independent of the host.
  std::size_t o = 0;
  auto put = [&](std::uint64_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) out[o++] = static_cast<std::uint8_t>(v >> (8 * b));
  };
  std::uint64_t scale_bits;
  std::memcpy(&scale_bits, &h.scale, 8);
  put(h.magic, 4);
  put(h.version, 1);
  put(h.kind, 1);
  put(h.limbs, 2);
  put(h.n, 4);
  put(h.level, 2);
  put(h.components, 2);
  put(scale_bits, 8);
  put(h.fingerprint, 8);
  return out;
}

Header read_header(std::span<const std::uint8_t> in, std::uint8_t kind) {
  if (in.size() < sizeof(Header)) throw ParseError(0, 0, "truncated header");
  std::size_t o = 0;
  auto get = [&](int bytes) {
    std::uint64_t v = 0;
    for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(in[o++]) << (8 * b);
    return v;
  };
  Header h{};
  h.magic = static_cast<std::uint32_t>(get(4));
  h.version = static_cast<std::uint8_t>(get(1));
  h.kind = static_cast<std::uint8_t>(get(1));
  h.limbs = static_cast<std::uint16_t>(get(2));
  h.n = static_cast<std::uint32_t>(get(4));
  h.level = static_cast<std::uint16_t>(get(2));
  h.components = static_cast<std::uint16_t>(get(2));
  const std::uint64_t sb = get(8);
  std::memcpy(&h.scale, &sb, 8);
  h.fingerprint = get(8);
  if (h.magic != kMagic || h.version != kVersion || h.kind != kind) {
    throw ParseError(0, 0, "bad magic, version or object kind");
  }
  const std::size_t need = sizeof(Header) + std::size_t{8} * h.limbs * h.n * h.components;
  if (in.size() != need) {
    throw ParseError(0, 0, "payload size " + std::to_string(in.size()) +
                               " does not match header (" + std::to_string(need) + ")");
  }
  return h;
}

}  // namespace

std::vector<std::uint8_t> serialize(const Ciphertext& ct) {
  Header h{kMagic, kVersion, kKindCiphertext, static_cast<std::uint16_t>(ct.c0.size()),
           static_cast<std::uint32_t>(ct.c0.n()), static_cast<std::uint16_t>(ct.level),
           2, ct.scale, ct.c0.basis.fingerprint()};
  auto out = write_header(h);
  put_poly(out, ct.c0);
  put_poly(out, ct.c1);
  return out;
}

Ciphertext deserialize_ciphertext(const Context& ctx,
                                  std::span<const std::uint8_t> bytes) {
  const Header h = read_header(bytes, kKindCiphertext);
  const auto basis = ctx.level_basis(h.level);
  if (h.n != ctx.n() || h.limbs != basis.size() || h.components != 2 ||
      h.fingerprint != basis.fingerprint()) {
    throw ParseError(0, 0, "ciphertext does not match the context");
  }
  std::size_t off = sizeof(Header);
  RnsPoly c0 = get_poly(basis, bytes, off);
  RnsPoly c1 = get_poly(basis, bytes, off);
  return {std::move(c0), std::move(c1), h.level, h.scale};
}

std::vector<std::uint8_t> serialize(const SwitchKey& key) {
  if (key.digits.empty()) throw InvalidArgument("empty switching key");
  const RnsPoly& f = key.digits[0].first;
  Header h{kMagic, kVersion, kKindSwitchKey, static_cast<std::uint16_t>(f.size()),
           static_cast<std::uint32_t>(f.n()), 0,
           static_cast<std::uint16_t>(2 * key.dnum()), 0.0, f.basis.fingerprint()};
  auto out = write_header(h);
  for (const auto& [b, a] : key.digits) {
    put_poly(out, b);
    put_poly(out, a);
  }
  return out;
}

SwitchKey deserialize_switch_key(const Context& ctx,
                                 std::span<const std::uint8_t> bytes) {
  const Header h = read_header(bytes, kKindSwitchKey);
  const auto basis = ctx.extended_basis(ctx.max_level());
  if (h.n != ctx.n() || h.limbs != basis.size() || h.components % 2 != 0 ||
      h.fingerprint != basis.fingerprint()) {
    throw ParseError(0, 0, "switching key does not match the context");
  }
  std::size_t off = sizeof(Header);
  SwitchKey key;
  for (std::size_t d = 0; d < h.components / 2u; ++d) {
    RnsPoly b = get_poly(basis, bytes, off);
    RnsPoly a = get_poly(basis, bytes, off);
    key.digits.emplace_back(std::move(b), std::move(a));
  }
  return key;
}

}  // namespace effact::he
