// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "effact/kernels/residue_poly.hpp"

namespace effact::kernels {

// Limb-wise lifts of the residue kernels. Limbs are processed by an OpenMP
// team; each limb result is independent of scheduling.

RnsPoly rns_ntt_fwd(const RnsPoly& a);
RnsPoly rns_ntt_inv(const RnsPoly& a, bool defer_scale = false);
RnsPoly rns_add(const RnsPoly& a, const RnsPoly& b);
RnsPoly rns_sub(const RnsPoly& a, const RnsPoly& b);
RnsPoly rns_neg(const RnsPoly& a);
RnsPoly rns_mul(const RnsPoly& a, const RnsPoly& b);
/// Multiplies limb k by c[k], which is taken to be in `c_form`.
RnsPoly rns_mul_scalar(const RnsPoly& a, std::span<const Word> c,
                       MontForm c_form);
/// Adds c[k] (already in a's representation) to limb k.
RnsPoly rns_add_scalar(const RnsPoly& a, std::span<const Word> c);
RnsPoly rns_mac(const RnsPoly& acc, const RnsPoly& a, const RnsPoly& b);
RnsPoly rns_to_form(const RnsPoly& a, MontForm target);
RnsPoly rns_automorphism(const RnsPoly& a, std::int64_t s);

/// Limbs [first, first + count) as a polynomial over that sub-basis.
RnsPoly rns_slice(const RnsPoly& a, std::size_t first, std::size_t count);
/// Limbs of a followed by limbs of b.
RnsPoly rns_concat(const RnsPoly& a, const RnsPoly& b);

}  // namespace effact::kernels
