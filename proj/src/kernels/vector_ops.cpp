// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/kernels/vector_ops.hpp"

#include <string>

namespace effact::kernels {

namespace {

void check_len(std::size_t a, std::size_t b, std::size_t out) {
  if (a != out || b != out) {
    throw StructuralError("vector length mismatch: " + std::to_string(a) +
                          ", " + std::to_string(b) + " -> " +
                          std::to_string(out));
  }
}

// The omp variants run the same element expression as the serial ones; the
// only difference is the worksharing pragma.
#define EFFACT_ELEMENTWISE(N, EXPR)                                    \
  do {                                                                 \
    const std::ptrdiff_t n_ = static_cast<std::ptrdiff_t>(N);          \
    _Pragma("omp parallel for schedule(static) if(n_ >= static_cast<std::ptrdiff_t>(kParallelThreshold))") \
    for (std::ptrdiff_t i = 0; i < n_; ++i) { EXPR; }                  \
  } while (0)

#define EFFACT_ELEMENTWISE_SERIAL(N, EXPR)                             \
  do {                                                                 \
    const std::ptrdiff_t n_ = static_cast<std::ptrdiff_t>(N);          \
    for (std::ptrdiff_t i = 0; i < n_; ++i) { EXPR; }                  \
  } while (0)

}  // namespace

void mmul(std::span<const Word> a, std::span<const Word> b, std::span<Word> out,
          const rns::Montgomery& m) {
  check_len(a.size(), b.size(), out.size());
  EFFACT_ELEMENTWISE(out.size(), out[i] = m.mul(a[i], b[i]));
}

void mmul_scalar(std::span<const Word> a, Word c, std::span<Word> out,
                 const rns::Montgomery& m) {
  check_len(a.size(), out.size(), out.size());
  EFFACT_ELEMENTWISE(out.size(), out[i] = m.mul(a[i], c));
}

void madd(std::span<const Word> a, std::span<const Word> b, std::span<Word> out,
          const rns::Montgomery& m) {
  check_len(a.size(), b.size(), out.size());
  EFFACT_ELEMENTWISE(out.size(), out[i] = m.add(a[i], b[i]));
}

void madd_scalar(std::span<const Word> a, Word c, std::span<Word> out,
                 const rns::Montgomery& m) {
  check_len(a.size(), out.size(), out.size());
  EFFACT_ELEMENTWISE(out.size(), out[i] = m.add(a[i], c));
}

void msub(std::span<const Word> a, std::span<const Word> b, std::span<Word> out,
          const rns::Montgomery& m) {
  check_len(a.size(), b.size(), out.size());
  EFFACT_ELEMENTWISE(out.size(), out[i] = m.sub(a[i], b[i]));
}

void msub_scalar(std::span<const Word> a, Word c, std::span<Word> out,
                 const rns::Montgomery& m) {
  check_len(a.size(), out.size(), out.size());
  EFFACT_ELEMENTWISE(out.size(), out[i] = m.sub(a[i], c));
}

void mac(std::span<const Word> acc, std::span<const Word> a,
         std::span<const Word> b, std::span<Word> out,
         const rns::Montgomery& m) {
  check_len(a.size(), b.size(), out.size());
  check_len(acc.size(), out.size(), out.size());
  EFFACT_ELEMENTWISE(out.size(), out[i] = m.add(acc[i], m.mul(a[i], b[i])));
}

void mac_scalar(std::span<const Word> acc, std::span<const Word> a, Word c,
                std::span<Word> out, const rns::Montgomery& m) {
  check_len(a.size(), acc.size(), out.size());
  EFFACT_ELEMENTWISE(out.size(), out[i] = m.add(acc[i], m.mul(a[i], c)));
}

namespace serial {

void mmul(std::span<const Word> a, std::span<const Word> b, std::span<Word> out,
          const rns::Montgomery& m) {
  check_len(a.size(), b.size(), out.size());
  EFFACT_ELEMENTWISE_SERIAL(out.size(), out[i] = m.mul(a[i], b[i]));
}

void mmul_scalar(std::span<const Word> a, Word c, std::span<Word> out,
                 const rns::Montgomery& m) {
  check_len(a.size(), out.size(), out.size());
  EFFACT_ELEMENTWISE_SERIAL(out.size(), out[i] = m.mul(a[i], c));
}

void madd(std::span<const Word> a, std::span<const Word> b, std::span<Word> out,
          const rns::Montgomery& m) {
  check_len(a.size(), b.size(), out.size());
  EFFACT_ELEMENTWISE_SERIAL(out.size(), out[i] = m.add(a[i], b[i]));
}

void madd_scalar(std::span<const Word> a, Word c, std::span<Word> out,
                 const rns::Montgomery& m) {
  check_len(a.size(), out.size(), out.size());
  EFFACT_ELEMENTWISE_SERIAL(out.size(), out[i] = m.add(a[i], c));
}

void msub(std::span<const Word> a, std::span<const Word> b, std::span<Word> out,
          const rns::Montgomery& m) {
  check_len(a.size(), b.size(), out.size());
  EFFACT_ELEMENTWISE_SERIAL(out.size(), out[i] = m.sub(a[i], b[i]));
}

void msub_scalar(std::span<const Word> a, Word c, std::span<Word> out,
                 const rns::Montgomery& m) {
  check_len(a.size(), out.size(), out.size());
  EFFACT_ELEMENTWISE_SERIAL(out.size(), out[i] = m.sub(a[i], c));
}

void mac(std::span<const Word> acc, std::span<const Word> a,
         std::span<const Word> b, std::span<Word> out,
         const rns::Montgomery& m) {
  check_len(a.size(), b.size(), out.size());
  check_len(acc.size(), out.size(), out.size());
  EFFACT_ELEMENTWISE_SERIAL(out.size(),
                            out[i] = m.add(acc[i], m.mul(a[i], b[i])));
}

void mac_scalar(std::span<const Word> acc, std::span<const Word> a, Word c,
                std::span<Word> out, const rns::Montgomery& m) {
  check_len(a.size(), acc.size(), out.size());
  EFFACT_ELEMENTWISE_SERIAL(out.size(), out[i] = m.add(acc[i], m.mul(a[i], c)));
}

}  // namespace serial

void check_not_deferred(const ResiduePoly& a, const char* op) {
  if (a.scale_deferred) {
    throw ContractError(std::string(op) +
                        ": operand is scale-deferred; only bconv_merged may "
                        "consume it");
  }
}

void check_compatible(const ResiduePoly& a, const ResiduePoly& b,
                      const char* op) {
  if (!(a.modulus == b.modulus)) {
    throw StructuralError(std::string(op) + ": modulus mismatch (" +
                          std::to_string(a.q()) + " vs " +
                          std::to_string(b.q()) + ")");
  }
  if (a.size() != b.size()) {
    throw StructuralError(std::string(op) + ": length mismatch");
  }
  if (a.domain != b.domain || a.order != b.order) {
    throw ContractError(std::string(op) + ": operands in different domains");
  }
  check_not_deferred(a, op);
  check_not_deferred(b, op);
}

namespace {

MontForm product_form(MontForm a, MontForm b, const char* op) {
  auto f = rns::compose(a, b);
  if (!f) {
    throw ContractError(std::string(op) + ": " + rns::to_string(a) + " x " +
                        rns::to_string(b) +
                        " has no Montgomery representation");
  }
  return *f;
}

ResiduePoly like(const ResiduePoly& a, MontForm repr) {
  ResiduePoly r(a.modulus, std::vector<Word>(a.size()), a.domain, a.order,
                repr);
  return r;
}

}  // namespace

ResiduePoly vec_mmul(const ResiduePoly& a, const ResiduePoly& b) {
  check_compatible(a, b, "vec_mmul");
  ResiduePoly r = like(a, product_form(a.repr, b.repr, "vec_mmul"));
  mmul(a.coeffs, b.coeffs, r.coeffs, a.modulus);
  return r;
}

ResiduePoly vec_mmul(const ResiduePoly& a, Word c, MontForm c_form) {
  check_not_deferred(a, "vec_mmul");
  if (c >= a.q()) throw StructuralError("vec_mmul: scalar not reduced");
  ResiduePoly r = like(a, product_form(a.repr, c_form, "vec_mmul"));
  mmul_scalar(a.coeffs, c, r.coeffs, a.modulus);
  return r;
}

ResiduePoly vec_madd(const ResiduePoly& a, const ResiduePoly& b) {
  check_compatible(a, b, "vec_madd");
  if (a.repr != b.repr) {
    throw ContractError("vec_madd: operands in different representations");
  }
  ResiduePoly r = like(a, a.repr);
  madd(a.coeffs, b.coeffs, r.coeffs, a.modulus);
  return r;
}

ResiduePoly vec_madd(const ResiduePoly& a, Word c) {
  check_not_deferred(a, "vec_madd");
  if (c >= a.q()) throw StructuralError("vec_madd: scalar not reduced");
  ResiduePoly r = like(a, a.repr);
  madd_scalar(a.coeffs, c, r.coeffs, a.modulus);
  return r;
}

ResiduePoly vec_msub(const ResiduePoly& a, const ResiduePoly& b) {
  check_compatible(a, b, "vec_msub");
  if (a.repr != b.repr) {
    throw ContractError("vec_msub: operands in different representations");
  }
  ResiduePoly r = like(a, a.repr);
  msub(a.coeffs, b.coeffs, r.coeffs, a.modulus);
  return r;
}

ResiduePoly vec_neg(const ResiduePoly& a) {
  check_not_deferred(a, "vec_neg");
  ResiduePoly r = like(a, a.repr);
  for (std::size_t i = 0; i < a.size(); ++i) r.coeffs[i] = a.modulus.neg(a.coeffs[i]);
  return r;
}

ResiduePoly mac_fused(const ResiduePoly& acc, const ResiduePoly& a,
                      const ResiduePoly& b) {
  check_compatible(a, b, "mac_fused");
  check_compatible(acc, a, "mac_fused");
  const MontForm f = product_form(a.repr, b.repr, "mac_fused");
  if (acc.repr != f) {
    throw ContractError("mac_fused: accumulator representation differs from "
                        "the product");
  }
  ResiduePoly r = like(acc, f);
  mac(acc.coeffs, a.coeffs, b.coeffs, r.coeffs, a.modulus);
  return r;
}

ResiduePoly to_form(const ResiduePoly& a, MontForm target) {
  check_not_deferred(a, "to_form");
  if (a.repr == target) return a;
  const auto& m = a.modulus;
  if (a.repr == MontForm::SM && target == MontForm::NM) return vec_mmul(a, 1, MontForm::NM);
  if (a.repr == MontForm::NM && target == MontForm::SM) return vec_mmul(a, m.r2(), MontForm::DM);
  throw ContractError(std::string("to_form: unsupported conversion ") +
                      rns::to_string(a.repr) + " -> " + rns::to_string(target));
}

}  // namespace effact::kernels
