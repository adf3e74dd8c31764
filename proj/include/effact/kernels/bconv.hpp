// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "effact/kernels/residue_poly.hpp"

namespace effact::kernels {

/// Precomputed constants for converting from source basis C to target B.
/// All constants are recomputed with arbitrary-precision integers and
/// compared at construction.
struct BconvTables {
  rns::RnsBasis from;
  rns::RnsBasis to;

  // Plain conversion (NM in, NM out).
  /// SM(qhat_j^-1 mod q_j), per source limb.
  std::vector<Word> qhat_inv_sm;
  /// SM(qhat_j mod p_i), indexed [i][j].
  std::vector<std::vector<Word>> qhat_mod_p_sm;

  // Merged conversion (scale-deferred SM in, SM out).
  /// NM(qhat_j^-1 * N^-1 mod q_j), per source limb.
  std::vector<Word> qhat_inv_ninv_nm;
  /// DM(qhat_j mod p_i), indexed [i][j].
  std::vector<std::vector<Word>> qhat_mod_p_dm;

  /// Throws InvalidArgument if the bases overlap, are empty, or disagree on
  /// ring degree or Montgomery radix.
  BconvTables(rns::RnsBasis from, rns::RnsBasis to);
};

/// Fast base conversion: for each p_i,
///   sum_j ((a_j * qhat_j^-1) mod q_j) * qhat_j  mod p_i,
/// evaluated as |C| + |C||B| MMUL and (|C|-1)|B| MMAD micro-ops, source
/// limbs accumulated in ascending order. Input: coefficient domain, NM.
RnsPoly bconv(const RnsPoly& a, const BconvTables& t);
RnsPoly bconv(const RnsPoly& a, const rns::RnsBasis& to);

/// Conversion fused with the deferred 1/N of an inverse NTT and the NM<->SM
/// conversions. Input: coefficient domain, SM, scale-deferred. Output: SM,
/// bit-exactly sm_encode(bconv(sm_decode(exact inverse NTT))).
RnsPoly bconv_merged(const RnsPoly& a, const BconvTables& t);

namespace serial {
RnsPoly bconv(const RnsPoly& a, const BconvTables& t);
RnsPoly bconv_merged(const RnsPoly& a, const BconvTables& t);
}  // namespace serial

}  // namespace effact::kernels
