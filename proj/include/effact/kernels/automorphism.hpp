// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "effact/kernels/residue_poly.hpp"

namespace effact::kernels {

struct AutoIndex {
  std::size_t index;
  bool negate;
};

/// 5^s mod 2n, with s taken modulo the order of 5 (negative s allowed).
std::uint64_t galois_element(std::int64_t s, std::size_t n);

/// Coefficient i of a moves to i*5^s mod n, negated iff i*5^s mod 2n >= n.
AutoIndex automorphism_map(std::size_t i, std::int64_t s, std::size_t n);

/// X -> X^(5^s) on a coefficient-domain polynomial.
ResiduePoly automorphism_apply(const ResiduePoly& a, std::int64_t s);

/// The same map on NTT/bit-reversed data, realized with the fixed transpose
/// network (see NetworkTrace). `lanes` only changes the decomposition, never
/// the result.
ResiduePoly automorphism_ntt(const ResiduePoly& a, std::int64_t s,
                             std::size_t lanes = 4);

/// Row-major matrix of `rows` x `cols` words.
struct WordMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Word> data;

  Word& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  Word at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  bool operator==(const WordMatrix& o) const = default;
};

/// The transpose network for an n-point vector held in SRAM as n/lanes rows
/// of `lanes` words in bit-reversed order: one lane permutation applied
/// identically to every row, plus a row fetch order.
struct FixedNetwork {
  std::vector<std::size_t> lane_perm;  // output lane b <- input lane lane_perm[b]
  std::vector<std::size_t> row_order;  // output row a <- input row row_order[a]
};

FixedNetwork make_fixed_network(std::size_t n, std::size_t lanes);

/// Given `m` holding a vector x in bit-reversed order (m[r][c] = x[brv(r*lanes+c)]),
/// returns T with T[a][b] = x[b*(n/lanes) + a]: the transpose of x viewed
/// as a lanes x (n/lanes) natural-order matrix. Realized as the fixed
/// network: T[a][b] = m[row_order[a]][lane_perm[b]]. The map is an
/// involution.
WordMatrix transpose_fixed_network(const WordMatrix& m, std::size_t lanes);

/// Intermediate layouts of automorphism_ntt, exposed for inspection.
struct NetworkTrace {
  WordMatrix transposed;  // after the network
  /// row_source[a]: the single input row every element of output row a is
  /// fetched from in the row-local step.
  std::vector<std::size_t> row_source;
  WordMatrix permuted;  // after the row-local step
  WordMatrix result;    // after the inverse network (bit-reversed layout)
};

NetworkTrace automorphism_ntt_trace(const ResiduePoly& a, std::int64_t s,
                                    std::size_t lanes);

}  // namespace effact::kernels
