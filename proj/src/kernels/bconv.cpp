// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/kernels/bconv.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

#include "effact/kernels/vector_ops.hpp"

namespace effact::kernels {

namespace {

using boost::multiprecision::cpp_int;

Word big_mod(const cpp_int& x, Word q) {
  return static_cast<Word>(cpp_int(x % q));
}

// qhat_j mod m using word arithmetic only.
Word qhat_mod(const rns::RnsBasis& c, std::size_t j, Word m) {
  Word r = 1 % m;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k != j) r = rns::mul_mod(r, c[k].q() % m, m);
  }
  return r;
}

void verify(const BconvTables& t) {
  cpp_int big_q = 1;
  for (const auto& q : t.from.moduli) big_q *= q.q();
  for (std::size_t j = 0; j < t.from.size(); ++j) {
    const auto& qj = t.from[j];
    const cpp_int qhat = big_q / qj.q();
    const Word inv = rns::inv_mod(big_mod(qhat, qj.q()), qj.q());
    const Word ninv = rns::inv_mod(qj.n() % qj.q(), qj.q());
    bool ok = qj.sm_decode(t.qhat_inv_sm[j]) == inv &&
              t.qhat_inv_ninv_nm[j] == rns::mul_mod(inv, ninv, qj.q());
    for (std::size_t i = 0; ok && i < t.to.size(); ++i) {
      const auto& p = t.to[i];
      const Word h = big_mod(qhat, p.q());
      ok = p.sm_decode(t.qhat_mod_p_sm[i][j]) == h &&
           p.sm_decode(p.sm_decode(t.qhat_mod_p_dm[i][j])) == h;
    }
    if (!ok) {
      throw Error("base conversion constant for source modulus " +
                  std::to_string(qj.q()) +
                  " disagrees with big-integer recomputation");
    }
  }
}

struct Plan {
  std::span<const Word> step1;
  const std::vector<std::vector<Word>>* step2;
};

using MmulScalar = void (*)(std::span<const Word>, Word, std::span<Word>,
                            const rns::Montgomery&);
using MacScalar = void (*)(std::span<const Word>, std::span<const Word>, Word,
                           std::span<Word>, const rns::Montgomery&);

RnsPoly convert(const RnsPoly& a, const BconvTables& t, const Plan& plan,
                MontForm out_repr, MmulScalar mmul_s, MacScalar mac_s) {
  const std::size_t n = a.n();
  std::vector<std::vector<Word>> tj(a.size(), std::vector<Word>(n));
  for (std::size_t j = 0; j < a.size(); ++j) {
    mmul_s(a[j].coeffs, plan.step1[j], tj[j], t.from[j]);
  }
  std::vector<ResiduePoly> out;
  out.reserve(t.to.size());
  for (std::size_t i = 0; i < t.to.size(); ++i) {
    const auto& p = t.to[i];
    const auto& c = (*plan.step2)[i];
    ResiduePoly r(p, std::vector<Word>(n), Domain::Coefficient, Order::Natural,
                  out_repr);
    mmul_s(tj[0], c[0], r.coeffs, p);
    for (std::size_t j = 1; j < tj.size(); ++j) {
      mac_s(r.coeffs, tj[j], c[j], r.coeffs, p);
    }
    out.push_back(std::move(r));
  }
  return RnsPoly(t.to, std::move(out));
}

void check_input(const RnsPoly& a, const BconvTables& t, const char* op) {
  a.validate();
  if (a.basis.fingerprint() != t.from.fingerprint() ||
      a.size() != t.from.size()) {
    throw StructuralError(std::string(op) +
                          ": input basis does not match the tables");
  }
  if (a.domain() != Domain::Coefficient) {
    throw ContractError(std::string(op) + ": input must be coefficient domain");
  }
}

void check_plain(const RnsPoly& a, const BconvTables& t) {
  check_input(a, t, "bconv");
  if (a.repr() != MontForm::NM) {
    throw ContractError("bconv: input must be NM");
  }
  if (a[0].scale_deferred) {
    throw ContractError("bconv: scale-deferred input requires bconv_merged");
  }
}

void check_merged(const RnsPoly& a, const BconvTables& t) {
  check_input(a, t, "bconv_merged");
  if (a.repr() != MontForm::SM) {
    throw ContractError(std::string("bconv_merged: input must be SM, got ") +
                        rns::to_string(a.repr()));
  }
  if (!a[0].scale_deferred) {
    throw ContractError("bconv_merged: input must come from a scale-deferred "
                        "inverse NTT");
  }
}

}  // namespace

BconvTables::BconvTables(rns::RnsBasis f, rns::RnsBasis t)
    : from(std::move(f)), to(std::move(t)) {
  if (from.empty() || to.empty()) {
    throw InvalidArgument("base conversion needs non-empty bases");
  }
  if (from.n() != to.n()) {
    throw InvalidArgument("base conversion bases disagree on ring degree");
  }
  for (const auto& q : from.moduli) {
    if (to.contains(q.q())) {
      throw InvalidArgument("base conversion bases overlap at modulus " +
                            std::to_string(q.q()));
    }
  }
  const unsigned rb = from[0].r_bits();
  for (const auto* b : {&from, &to}) {
    for (const auto& q : b->moduli) {
      if (q.r_bits() != rb) {
        throw InvalidArgument("base conversion moduli use different radices");
      }
    }
  }
  const std::size_t nc = from.size();
  qhat_inv_sm.resize(nc);
  qhat_inv_ninv_nm.resize(nc);
  qhat_mod_p_sm.assign(to.size(), std::vector<Word>(nc));
  qhat_mod_p_dm.assign(to.size(), std::vector<Word>(nc));
  for (std::size_t j = 0; j < nc; ++j) {
    const auto& qj = from[j];
    const Word inv = rns::inv_mod(qhat_mod(from, j, qj.q()), qj.q());
    qhat_inv_sm[j] = qj.sm_encode(inv);
    qhat_inv_ninv_nm[j] = rns::mul_mod(inv, qj.n_inv(), qj.q());
    for (std::size_t i = 0; i < to.size(); ++i) {
      const Word h = qhat_mod(from, j, to[i].q());
      qhat_mod_p_sm[i][j] = to[i].sm_encode(h);
      qhat_mod_p_dm[i][j] = to[i].dm_encode(h);
    }
  }
  verify(*this);
}

RnsPoly bconv(const RnsPoly& a, const BconvTables& t) {
  check_plain(a, t);
  return convert(a, t, {t.qhat_inv_sm, &t.qhat_mod_p_sm}, MontForm::NM,
                 &mmul_scalar, &mac_scalar);
}

RnsPoly bconv(const RnsPoly& a, const rns::RnsBasis& to) {
  return bconv(a, BconvTables(a.basis, to));
}

RnsPoly bconv_merged(const RnsPoly& a, const BconvTables& t) {
  check_merged(a, t);
  return convert(a, t, {t.qhat_inv_ninv_nm, &t.qhat_mod_p_dm}, MontForm::SM,
                 &mmul_scalar, &mac_scalar);
}

namespace serial {

RnsPoly bconv(const RnsPoly& a, const BconvTables& t) {
  check_plain(a, t);
  return convert(a, t, {t.qhat_inv_sm, &t.qhat_mod_p_sm}, MontForm::NM,
                 &serial::mmul_scalar, &serial::mac_scalar);
}

RnsPoly bconv_merged(const RnsPoly& a, const BconvTables& t) {
  check_merged(a, t);
  return convert(a, t, {t.qhat_inv_ninv_nm, &t.qhat_mod_p_dm}, MontForm::SM,
                 &serial::mmul_scalar, &serial::mac_scalar);
}

}  // namespace serial

}  // namespace effact::kernels
