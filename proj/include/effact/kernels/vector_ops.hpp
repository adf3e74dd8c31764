// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "effact/kernels/residue_poly.hpp"

namespace effact::kernels {

/// Coefficient count at which the span kernels fork an OpenMP team.
inline constexpr std::size_t kParallelThreshold = 2048;

// Span kernels. `out` may alias any input. For the multiplies, `a` may hold
// words of another modulus (anything below R); every other operand must be
// reduced mod q. These are the OpenMP versions; kernels::serial holds the
// single-threaded reference with identical results.

void mmul(std::span<const Word> a, std::span<const Word> b, std::span<Word> out,
          const rns::Montgomery& m);
void mmul_scalar(std::span<const Word> a, Word c, std::span<Word> out,
                 const rns::Montgomery& m);
void madd(std::span<const Word> a, std::span<const Word> b, std::span<Word> out,
          const rns::Montgomery& m);
void madd_scalar(std::span<const Word> a, Word c, std::span<Word> out,
                 const rns::Montgomery& m);
void msub(std::span<const Word> a, std::span<const Word> b, std::span<Word> out,
          const rns::Montgomery& m);
void msub_scalar(std::span<const Word> a, Word c, std::span<Word> out,
                 const rns::Montgomery& m);
/// out = acc + MontMult(a, b): the NTT butterfly with its subtraction masked.
void mac(std::span<const Word> acc, std::span<const Word> a,
         std::span<const Word> b, std::span<Word> out, const rns::Montgomery& m);
void mac_scalar(std::span<const Word> acc, std::span<const Word> a, Word c,
                std::span<Word> out, const rns::Montgomery& m);

namespace serial {
void mmul(std::span<const Word> a, std::span<const Word> b, std::span<Word> out,
          const rns::Montgomery& m);
void mmul_scalar(std::span<const Word> a, Word c, std::span<Word> out,
                 const rns::Montgomery& m);
void madd(std::span<const Word> a, std::span<const Word> b, std::span<Word> out,
          const rns::Montgomery& m);
void madd_scalar(std::span<const Word> a, Word c, std::span<Word> out,
                 const rns::Montgomery& m);
void msub(std::span<const Word> a, std::span<const Word> b, std::span<Word> out,
          const rns::Montgomery& m);
void msub_scalar(std::span<const Word> a, Word c, std::span<Word> out,
                 const rns::Montgomery& m);
void mac(std::span<const Word> acc, std::span<const Word> a,
         std::span<const Word> b, std::span<Word> out, const rns::Montgomery& m);
void mac_scalar(std::span<const Word> acc, std::span<const Word> a, Word c,
                std::span<Word> out, const rns::Montgomery& m);
}  // namespace serial

// Metadata-checked residue polynomial operations.

/// Elementwise Montgomery product; the result representation follows
/// rns::compose. NM*NM is rejected.
ResiduePoly vec_mmul(const ResiduePoly& a, const ResiduePoly& b);
ResiduePoly vec_mmul(const ResiduePoly& a, Word c, MontForm c_form);
ResiduePoly vec_madd(const ResiduePoly& a, const ResiduePoly& b);
/// `c` must already be in a's representation.
ResiduePoly vec_madd(const ResiduePoly& a, Word c);
ResiduePoly vec_msub(const ResiduePoly& a, const ResiduePoly& b);
ResiduePoly vec_neg(const ResiduePoly& a);
/// acc + a*b, bit-exactly vec_madd(acc, vec_mmul(a, b)).
ResiduePoly mac_fused(const ResiduePoly& acc, const ResiduePoly& a,
                      const ResiduePoly& b);

/// Converts between NM and SM with one Montgomery multiply.
ResiduePoly to_form(const ResiduePoly& a, MontForm target);

/// Throws unless a and b agree on modulus, length, domain and order.
void check_compatible(const ResiduePoly& a, const ResiduePoly& b,
                      const char* op);
/// Throws ContractError if `a` is scale-deferred.
void check_not_deferred(const ResiduePoly& a, const char* op);

}  // namespace effact::kernels
