// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/kernels/ntt.hpp"

#include <string>

#include "effact/kernels/vector_ops.hpp"

namespace effact::kernels {

namespace {

void check_span(std::span<Word> a, const rns::Modulus& m) {
  if (a.size() != m.n()) {
    throw StructuralError("NTT length " + std::to_string(a.size()) +
                          " does not match ring degree " +
                          std::to_string(m.n()));
  }
}

}  // namespace

namespace serial {

void ntt_forward_inplace(std::span<Word> a, const rns::Modulus& m) {
  check_span(a, m);
  const std::size_t n = a.size();
  const auto psi = m.twiddles();
  std::size_t t = n;
  for (std::size_t blocks = 1; blocks < n; blocks <<= 1) {
    t >>= 1;
    for (std::size_t i = 0; i < blocks; ++i) {
      const Word w = psi[blocks + i];
      Word* x = a.data() + 2 * i * t;
      for (std::size_t j = 0; j < t; ++j) {
        const Word u = x[j];
        const Word v = m.mul(x[j + t], w);
        x[j] = m.add(u, v);
        x[j + t] = m.sub(u, v);
      }
    }
  }
}

void ntt_inverse_inplace(std::span<Word> a, const rns::Modulus& m, bool scale) {
  check_span(a, m);
  const std::size_t n = a.size();
  const auto psi_inv = m.inv_twiddles();
  std::size_t t = 1;
  for (std::size_t blocks = n >> 1; blocks >= 1; blocks >>= 1) {
    for (std::size_t i = 0; i < blocks; ++i) {
      const Word w = psi_inv[blocks + i];
      Word* x = a.data() + 2 * i * t;
      for (std::size_t j = 0; j < t; ++j) {
        const Word u = x[j];
        const Word v = x[j + t];
        x[j] = m.add(u, v);
        x[j + t] = m.mul(m.sub(u, v), w);
      }
    }
    t <<= 1;
  }
  if (scale) {
    const Word ninv = m.n_inv_sm();
    for (auto& x : a) x = m.mul(x, ninv);
  }
}

}  // namespace serial

void ntt_forward_inplace(std::span<Word> a, const rns::Modulus& m) {
  check_span(a, m);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
  if (a.size() < kParallelThreshold) return serial::ntt_forward_inplace(a, m);
  const auto psi = m.twiddles();
  Word* x = a.data();
#pragma omp parallel
  {
    std::ptrdiff_t t = n;
    for (std::ptrdiff_t blocks = 1; blocks < n; blocks <<= 1) {
      t >>= 1;
      // Butterflies of one stage are independent; flatten them.
#pragma omp for schedule(static)
      for (std::ptrdiff_t b = 0; b < n / 2; ++b) {
        const std::ptrdiff_t i = b / t;
        const std::ptrdiff_t j = 2 * i * t + (b % t);
        const Word u = x[j];
        const Word v = m.mul(x[j + t], psi[blocks + i]);
        x[j] = m.add(u, v);
        x[j + t] = m.sub(u, v);
      }
    }
  }
}

void ntt_inverse_inplace(std::span<Word> a, const rns::Modulus& m, bool scale) {
  check_span(a, m);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
  if (a.size() < kParallelThreshold) {
    return serial::ntt_inverse_inplace(a, m, scale);
  }
  const auto psi_inv = m.inv_twiddles();
  const Word ninv = m.n_inv_sm();
  Word* x = a.data();
#pragma omp parallel
  {
    std::ptrdiff_t t = 1;
    for (std::ptrdiff_t blocks = n >> 1; blocks >= 1; blocks >>= 1) {
#pragma omp for schedule(static)
      for (std::ptrdiff_t b = 0; b < n / 2; ++b) {
        const std::ptrdiff_t i = b / t;
        const std::ptrdiff_t j = 2 * i * t + (b % t);
        const Word u = x[j];
        const Word v = x[j + t];
        x[j] = m.add(u, v);
        x[j + t] = m.mul(m.sub(u, v), psi_inv[blocks + i]);
      }
      t <<= 1;
    }
    if (scale) {
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < n; ++i) x[i] = m.mul(x[i], ninv);
    }
  }
}

ResiduePoly ntt_fwd(const ResiduePoly& a) {
  if (a.domain != Domain::Coefficient || a.order != Order::Natural) {
    throw ContractError(std::string("ntt_fwd expects coefficient/natural input, got ") +
                        to_string(a.domain) + "/" + to_string(a.order));
  }
  check_not_deferred(a, "ntt_fwd");
  ResiduePoly r = a;
  ntt_forward_inplace(r.coeffs, r.modulus);
  r.domain = Domain::Ntt;
  r.order = Order::BitReversed;
  return r;
}

ResiduePoly ntt_inv(const ResiduePoly& a, bool defer_scale) {
  if (a.domain != Domain::Ntt || a.order != Order::BitReversed) {
    throw ContractError(std::string("ntt_inv expects ntt/bit-reversed input, got ") +
                        to_string(a.domain) + "/" + to_string(a.order));
  }
  check_not_deferred(a, "ntt_inv");
  ResiduePoly r = a;
  ntt_inverse_inplace(r.coeffs, r.modulus, !defer_scale);
  r.domain = Domain::Coefficient;
  r.order = Order::Natural;
  r.scale_deferred = defer_scale;
  return r;
}

ResiduePoly negacyclic_mul(const ResiduePoly& a, const ResiduePoly& b) {
  check_compatible(a, b, "negacyclic_mul");
  if (a.domain != Domain::Coefficient) {
    throw ContractError("negacyclic_mul expects coefficient-domain operands");
  }
  ResiduePoly rhs = b;
  if (a.repr == MontForm::NM && b.repr == MontForm::NM) rhs = to_form(b, MontForm::SM);
  return ntt_inv(vec_mmul(ntt_fwd(a), ntt_fwd(rhs)));
}

std::vector<Word> schoolbook_negacyclic(std::span<const Word> a,
                                        std::span<const Word> b, Word q) {
  if (a.size() != b.size()) throw StructuralError("schoolbook: length mismatch");
  const std::size_t n = a.size();
  std::vector<Word> r(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Word p = rns::mul_mod(a[i], b[j], q);
      const std::size_t k = i + j;
      if (k < n) {
        r[k] = (r[k] + p) % q;
      } else {
        r[k - n] = (r[k - n] + q - p) % q;
      }
    }
  }
  return r;
}

}  // namespace effact::kernels
