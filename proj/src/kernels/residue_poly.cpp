// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/kernels/residue_poly.hpp"

#include <string>

namespace effact::kernels {

const char* to_string(Domain d) {
  return d == Domain::Coefficient ? "coefficient" : "ntt";
}

const char* to_string(Order o) {
  return o == Order::Natural ? "natural" : "bit-reversed";
}

ResiduePoly::ResiduePoly(rns::Modulus m, std::vector<Word> c, Domain d,
                         Order o, MontForm r)
    : modulus(std::move(m)), coeffs(std::move(c)), domain(d), order(o),
      repr(r) {}

ResiduePoly ResiduePoly::zero(const rns::Modulus& m, Domain d, Order o,
                              MontForm r) {
  return ResiduePoly(m, std::vector<Word>(m.n(), 0), d, o, r);
}

void ResiduePoly::validate() const {
  if (coeffs.size() != modulus.n()) {
    throw StructuralError("residue polynomial has " +
                          std::to_string(coeffs.size()) +
                          " coefficients, ring degree is " +
                          std::to_string(modulus.n()));
  }
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] >= modulus.q()) {
      throw StructuralError("coefficient " + std::to_string(i) +
                            " is not reduced mod " +
                            std::to_string(modulus.q()));
    }
  }
}

bool ResiduePoly::operator==(const ResiduePoly& o) const {
  return modulus == o.modulus && coeffs == o.coeffs && domain == o.domain &&
         order == o.order && repr == o.repr &&
         scale_deferred == o.scale_deferred;
}

RnsPoly::RnsPoly(rns::RnsBasis b, std::vector<ResiduePoly> l)
    : basis(std::move(b)), limbs(std::move(l)) {
  validate();
}

RnsPoly RnsPoly::zero(const rns::RnsBasis& b, Domain d, Order o, MontForm r) {
  std::vector<ResiduePoly> limbs;
  limbs.reserve(b.size());
  for (const auto& m : b.moduli) limbs.push_back(ResiduePoly::zero(m, d, o, r));
  return RnsPoly(b, std::move(limbs));
}

void RnsPoly::validate() const {
  if (limbs.size() != basis.size()) {
    throw StructuralError("RNS polynomial has " + std::to_string(limbs.size()) +
                          " limbs for a basis of " +
                          std::to_string(basis.size()));
  }
  for (std::size_t i = 0; i < limbs.size(); ++i) {
    const auto& l = limbs[i];
    if (!(l.modulus == basis[i])) {
      throw StructuralError("limb " + std::to_string(i) +
                            " modulus disagrees with basis");
    }
    const auto& f = limbs[0];
    if (l.domain != f.domain || l.order != f.order || l.repr != f.repr ||
        l.scale_deferred != f.scale_deferred) {
      throw ContractError("RNS limbs carry inconsistent metadata");
    }
  }
}

bool RnsPoly::operator==(const RnsPoly& o) const {
  return limbs == o.limbs;
}

}  // namespace effact::kernels
