// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/kernels/automorphism.hpp"

#include <string>

#include "effact/kernels/vector_ops.hpp"

namespace effact::kernels {

namespace {

bool is_pow2(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

unsigned log2_exact(std::size_t x) {
  unsigned l = 0;
  while ((std::size_t{1} << l) < x) ++l;
  return l;
}

}  // namespace

std::uint64_t galois_element(std::int64_t s, std::size_t n) {
  if (!is_pow2(n)) throw InvalidArgument("ring degree must be a power of two");
  const std::int64_t order = n <= 2 ? 1 : static_cast<std::int64_t>(n / 2);
  std::int64_t e = s % order;
  if (e < 0) e += order;
  return rns::pow_mod(5, static_cast<Word>(e), 2 * static_cast<Word>(n));
}

AutoIndex automorphism_map(std::size_t i, std::int64_t s, std::size_t n) {
  if (i >= n) throw InvalidArgument("automorphism index out of range");
  const std::uint64_t g = galois_element(s, n);
  const std::uint64_t k = rns::mul_mod(i, g, 2 * static_cast<Word>(n));
  return {static_cast<std::size_t>(k % n), k >= n};
}

ResiduePoly automorphism_apply(const ResiduePoly& a, std::int64_t s) {
  if (a.domain != Domain::Coefficient || a.order != Order::Natural) {
    throw ContractError("automorphism_apply expects coefficient/natural input");
  }
  check_not_deferred(a, "automorphism_apply");
  const std::size_t n = a.size();
  ResiduePoly r = a;
  for (std::size_t i = 0; i < n; ++i) {
    const AutoIndex t = automorphism_map(i, s, n);
    r.coeffs[t.index] = t.negate ? a.modulus.neg(a.coeffs[i]) : a.coeffs[i];
  }
  return r;
}

FixedNetwork make_fixed_network(std::size_t n, std::size_t lanes) {
  if (!is_pow2(n) || !is_pow2(lanes) || lanes > n) {
    throw InvalidArgument("transpose network needs power-of-two n >= lanes, got n=" +
                          std::to_string(n) + " lanes=" + std::to_string(lanes));
  }
  const unsigned l = log2_exact(lanes);
  const unsigned rbits = log2_exact(n) - l;
  FixedNetwork f;
  f.lane_perm.resize(lanes);
  f.row_order.resize(n / lanes);
  for (std::size_t b = 0; b < lanes; ++b) {
    f.lane_perm[b] = rns::bit_reverse(static_cast<unsigned>(b), l);
  }
  for (std::size_t a = 0; a < n / lanes; ++a) {
    f.row_order[a] = rns::bit_reverse(static_cast<unsigned>(a), rbits);
  }
  return f;
}

WordMatrix transpose_fixed_network(const WordMatrix& m, std::size_t lanes) {
  if (m.cols != lanes || !is_pow2(m.rows) || !is_pow2(m.cols) ||
      m.data.size() != m.rows * m.cols) {
    throw InvalidArgument("transpose network needs a power-of-two matrix with " +
                          std::to_string(lanes) + " columns");
  }
  const FixedNetwork f = make_fixed_network(m.rows * m.cols, lanes);
  WordMatrix t{m.rows, m.cols, std::vector<Word>(m.data.size())};
  for (std::size_t a = 0; a < m.rows; ++a) {
    for (std::size_t b = 0; b < m.cols; ++b) {
      t.at(a, b) = m.at(f.row_order[a], f.lane_perm[b]);
    }
  }
  return t;
}

NetworkTrace automorphism_ntt_trace(const ResiduePoly& a, std::int64_t s,
                                    std::size_t lanes) {
  if (a.domain != Domain::Ntt || a.order != Order::BitReversed) {
    throw ContractError("automorphism_ntt expects ntt/bit-reversed input");
  }
  check_not_deferred(a, "automorphism_ntt");
  const std::size_t n = a.size();
  if (lanes > n) lanes = n;
  const std::size_t rows = n / lanes;
  NetworkTrace tr;
  tr.transposed = transpose_fixed_network(WordMatrix{rows, lanes, a.coeffs}, lanes);

  // After the network, T[r][c] holds natural index c*rows + r. The target
  // index j takes its value from j' = g*j + (g-1)/2 mod n, and j' mod rows
  // depends only on j mod rows, so each output row reads one input row.
  const std::uint64_t g = galois_element(s, n);
  const std::uint64_t h = (g - 1) / 2;
  tr.row_source.resize(rows);
  tr.permuted = WordMatrix{rows, lanes, std::vector<Word>(n)};
  for (std::size_t r = 0; r < rows; ++r) {
    tr.row_source[r] = static_cast<std::size_t>((g * r + h) % rows);
    for (std::size_t c = 0; c < lanes; ++c) {
      const std::uint64_t j = c * rows + r;
      const std::uint64_t jp = (rns::mul_mod(g, j, n) + h) % n;
      tr.permuted.at(r, c) = tr.transposed.at(jp % rows, jp / rows);
    }
  }
  tr.result = transpose_fixed_network(tr.permuted, lanes);
  return tr;
}

ResiduePoly automorphism_ntt(const ResiduePoly& a, std::int64_t s,
                             std::size_t lanes) {
  NetworkTrace tr = automorphism_ntt_trace(a, s, lanes);
  ResiduePoly r = a;
  r.coeffs = std::move(tr.result.data);
  return r;
}

}  // namespace effact::kernels
