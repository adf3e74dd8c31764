// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/kernels/rns_ops.hpp"

#include <exception>
#include <string>

#include "effact/kernels/automorphism.hpp"
#include "effact/kernels/ntt.hpp"
#include "effact/kernels/vector_ops.hpp"

namespace effact::kernels {

namespace {

template <typename F>
RnsPoly limbwise(const RnsPoly& a, F&& f) {
  std::vector<ResiduePoly> out(a.size());
  const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(a.size());
  // Exceptions must not escape an OpenMP region; carry the first one out.
  std::exception_ptr err;
#pragma omp parallel for schedule(static) if (k > 1 && a.n() >= 1024)
  for (std::ptrdiff_t i = 0; i < k; ++i) {
    try {
      out[i] = f(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(effact_limbwise)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return RnsPoly(a.basis, std::move(out));
}

void same_basis(const RnsPoly& a, const RnsPoly& b, const char* op) {
  if (a.size() != b.size() || a.basis.fingerprint() != b.basis.fingerprint()) {
    throw StructuralError(std::string(op) + ": operands on different bases");
  }
}

}  // namespace

RnsPoly rns_ntt_fwd(const RnsPoly& a) {
  return limbwise(a, [&](std::size_t i) { return ntt_fwd(a[i]); });
}

RnsPoly rns_ntt_inv(const RnsPoly& a, bool defer_scale) {
  return limbwise(a, [&](std::size_t i) { return ntt_inv(a[i], defer_scale); });
}

RnsPoly rns_add(const RnsPoly& a, const RnsPoly& b) {
  same_basis(a, b, "rns_add");
  return limbwise(a, [&](std::size_t i) { return vec_madd(a[i], b[i]); });
}

RnsPoly rns_sub(const RnsPoly& a, const RnsPoly& b) {
  same_basis(a, b, "rns_sub");
  return limbwise(a, [&](std::size_t i) { return vec_msub(a[i], b[i]); });
}

RnsPoly rns_neg(const RnsPoly& a) {
  return limbwise(a, [&](std::size_t i) { return vec_neg(a[i]); });
}

RnsPoly rns_mul(const RnsPoly& a, const RnsPoly& b) {
  same_basis(a, b, "rns_mul");
  return limbwise(a, [&](std::size_t i) { return vec_mmul(a[i], b[i]); });
}

RnsPoly rns_mul_scalar(const RnsPoly& a, std::span<const Word> c,
                       MontForm c_form) {
  if (c.size() != a.size()) throw StructuralError("rns_mul_scalar: constant count");
  return limbwise(a, [&](std::size_t i) { return vec_mmul(a[i], c[i], c_form); });
}

RnsPoly rns_add_scalar(const RnsPoly& a, std::span<const Word> c) {
  if (c.size() != a.size()) throw StructuralError("rns_add_scalar: constant count");
  return limbwise(a, [&](std::size_t i) { return vec_madd(a[i], c[i]); });
}

RnsPoly rns_mac(const RnsPoly& acc, const RnsPoly& a, const RnsPoly& b) {
  same_basis(a, b, "rns_mac");
  same_basis(acc, a, "rns_mac");
  return limbwise(a, [&](std::size_t i) { return mac_fused(acc[i], a[i], b[i]); });
}

RnsPoly rns_to_form(const RnsPoly& a, MontForm target) {
  return limbwise(a, [&](std::size_t i) { return to_form(a[i], target); });
}

RnsPoly rns_automorphism(const RnsPoly& a, std::int64_t s) {
  if (a.domain() == Domain::Ntt) {
    return limbwise(a, [&](std::size_t i) { return automorphism_ntt(a[i], s); });
  }
  return limbwise(a, [&](std::size_t i) { return automorphism_apply(a[i], s); });
}

RnsPoly rns_slice(const RnsPoly& a, std::size_t first, std::size_t count) {
  if (first + count > a.size()) throw StructuralError("rns_slice: out of range");
  std::vector<rns::Modulus> m(a.basis.moduli.begin() + first,
                              a.basis.moduli.begin() + first + count);
  std::vector<ResiduePoly> l(a.limbs.begin() + first,
                             a.limbs.begin() + first + count);
  return RnsPoly(rns::RnsBasis(std::move(m), a.basis.role), std::move(l));
}

RnsPoly rns_concat(const RnsPoly& a, const RnsPoly& b) {
  std::vector<rns::Modulus> m = a.basis.moduli;
  m.insert(m.end(), b.basis.moduli.begin(), b.basis.moduli.end());
  std::vector<ResiduePoly> l = a.limbs;
  l.insert(l.end(), b.limbs.begin(), b.limbs.end());
  return RnsPoly(rns::RnsBasis(std::move(m), a.basis.role), std::move(l));
}

}  // namespace effact::kernels
