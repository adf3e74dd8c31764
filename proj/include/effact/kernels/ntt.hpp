// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "effact/kernels/residue_poly.hpp"

namespace effact::kernels {

// In-place span transforms. The forward transform takes natural order and
// leaves A_j = sum_i a_i psi^((2j+1)i) at position brv(j); the inverse takes
// that layout back to natural order. Twiddles are SM encoded, so the
// transforms preserve whatever Montgomery representation the data is in.

void ntt_forward_inplace(std::span<Word> a, const rns::Modulus& m);
/// With scale == false the final N^-1 multiply is skipped.
void ntt_inverse_inplace(std::span<Word> a, const rns::Modulus& m,
                         bool scale = true);

namespace serial {
void ntt_forward_inplace(std::span<Word> a, const rns::Modulus& m);
void ntt_inverse_inplace(std::span<Word> a, const rns::Modulus& m,
                         bool scale = true);
}  // namespace serial

/// Coefficient/natural -> NTT/bit-reversed.
ResiduePoly ntt_fwd(const ResiduePoly& a);

/// NTT/bit-reversed -> coefficient/natural. With defer_scale the output is
/// N times the exact inverse and is flagged scale_deferred.
ResiduePoly ntt_inv(const ResiduePoly& a, bool defer_scale = false);

/// a*b mod (X^n + 1). Operands must be coefficient domain; an NM*NM pair is
/// handled by lifting b to SM so the result stays NM.
ResiduePoly negacyclic_mul(const ResiduePoly& a, const ResiduePoly& b);

/// O(n^2) schoolbook negacyclic product on plain residues; test oracle and
/// fallback for tiny degrees.
std::vector<Word> schoolbook_negacyclic(std::span<const Word> a,
                                        std::span<const Word> b, Word q);

}  // namespace effact::kernels
