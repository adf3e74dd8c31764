// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "effact/rns/modulus.hpp"

namespace effact::kernels {

using rns::MontForm;
using rns::Word;

enum class Domain : std::uint8_t { Coefficient, Ntt };
enum class Order : std::uint8_t { Natural, BitReversed };

const char* to_string(Domain d);
const char* to_string(Order o);

/// One limb [m]_q of an RNS polynomial, with the metadata every kernel checks.
struct ResiduePoly {
  rns::Modulus modulus;
  std::vector<Word> coeffs;
  Domain domain = Domain::Coefficient;
  Order order = Order::Natural;
  MontForm repr = MontForm::NM;
  /// Set by ntt_inv(defer_scale=true): the content is N times the true
  /// inverse transform. Only bconv_merged may consume such a limb.
  bool scale_deferred = false;

  ResiduePoly() = default;
  ResiduePoly(rns::Modulus m, std::vector<Word> c,
              Domain d = Domain::Coefficient, Order o = Order::Natural,
              MontForm r = MontForm::NM);

  static ResiduePoly zero(const rns::Modulus& m, Domain d = Domain::Coefficient,
                          Order o = Order::Natural,
                          MontForm r = MontForm::NM);

  std::size_t size() const { return coeffs.size(); }
  Word q() const { return modulus.q(); }

  /// Throws StructuralError if length != n or a coefficient is >= q.
  void validate() const;
  bool operator==(const ResiduePoly& o) const;
};

/// A polynomial over an RNS basis: one limb per modulus, shared metadata.
struct RnsPoly {
  rns::RnsBasis basis;
  std::vector<ResiduePoly> limbs;

  RnsPoly() = default;
  RnsPoly(rns::RnsBasis b, std::vector<ResiduePoly> l);

  static RnsPoly zero(const rns::RnsBasis& b, Domain d = Domain::Coefficient,
                      Order o = Order::Natural, MontForm r = MontForm::NM);

  std::size_t size() const { return limbs.size(); }
  std::size_t n() const { return basis.n(); }
  ResiduePoly& operator[](std::size_t i) { return limbs[i]; }
  const ResiduePoly& operator[](std::size_t i) const { return limbs[i]; }

  Domain domain() const { return limbs.empty() ? Domain::Coefficient : limbs[0].domain; }
  MontForm repr() const { return limbs.empty() ? MontForm::NM : limbs[0].repr; }

  /// Limb count matches the basis, limbs carry the basis moduli in order and
  /// share domain/order/repr/scale flag.
  void validate() const;
  bool operator==(const RnsPoly& o) const;
};

}  // namespace effact::kernels
