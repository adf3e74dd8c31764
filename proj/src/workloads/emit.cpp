// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/workloads/emit.hpp"

#include "effact/error.hpp"

namespace effact::workloads {

HeEmitter::HeEmitter(IrBuilder& b, const WorkloadParams& prm)
    : b_(b), prm_(prm), chain_(make_chain(prm)) {
  if (b_.program().moduli != chain_.all()) {
    throw InvalidArgument("builder moduli do not match the workload chain");
  }
}

LimbVec HeEmitter::load_poly(std::uint32_t symbol, std::size_t offset, std::size_t level) {
  LimbVec r;
  for (std::size_t j = 0; j <= level; ++j) {
    r.v.push_back(b_.load(q(j), symbol, static_cast<std::int64_t>(offset + j)));
    r.mod.push_back(q(j));
  }
  return r;
}

void HeEmitter::store_poly(const LimbVec& a, std::uint32_t symbol, std::size_t offset) {
  for (std::size_t j = 0; j < a.size(); ++j) {
    b_.store(a.mod[j], a.v[j], symbol, static_cast<std::int64_t>(offset + j));
  }
}

std::vector<LimbVec> HeEmitter::mod_up(const LimbVec& a) {
  const std::size_t level = level_of(a);
  const std::size_t K = chain_.alpha();
  std::vector<LimbVec> out;
  for (std::size_t d = 0; d < digit_count(level, limbs(), prm_.dnum); ++d) {
    const auto [lo, hi] = digit_range(d, level, limbs(), prm_.dnum);
    std::vector<Operand> src;
    std::vector<std::uint32_t> from, to;
    for (std::size_t j = lo; j < hi; ++j) {
      src.push_back(b_.to_nm(q(j), b_.intt(q(j), a.v[j])));
      from.push_back(q(j));
    }
    for (std::size_t j = 0; j <= level; ++j) {
      if (j < lo || j >= hi) to.push_back(q(j));
    }
    for (std::size_t k = 0; k < K; ++k) to.push_back(p(k));
    const auto conv = b_.bconv(src, from, to);
    LimbVec ext;
    std::size_t c = 0;
    auto converted = [&] {
      const auto m = to[c];
      return b_.ntt(m, b_.to_sm(m, conv[c++]));
    };
    for (std::size_t j = 0; j <= level; ++j) {
      ext.v.push_back(j >= lo && j < hi ? a.v[j] : converted());
      ext.mod.push_back(q(j));
    }
    for (std::size_t k = 0; k < K; ++k) {
      ext.v.push_back(converted());
      ext.mod.push_back(p(k));
    }
    out.push_back(std::move(ext));
  }
  return out;
}

std::pair<LimbVec, LimbVec> HeEmitter::inner_product(const std::vector<LimbVec>& ext,
                                                     const KeyFetch& key) {
  if (ext.empty()) throw InvalidArgument("inner product needs at least one digit");
  const std::size_t K = chain_.alpha();
  const std::size_t level = ext[0].size() - K - 1;
  LimbVec acc[2];
  for (int part = 0; part < 2; ++part) {
    acc[part].mod = ext[0].mod;
    acc[part].v.resize(ext[0].size());
  }
  for (std::size_t d = 0; d < ext.size(); ++d) {
    for (std::size_t m = 0; m < ext[d].size(); ++m) {
      const std::size_t full = m <= level ? m : prm_.L + 1 + (m - level - 1);
      const auto mod = ext[d].mod[m];
      for (int part = 0; part < 2; ++part) {
        const Operand k = key(d, part, full, mod);
        const Operand prod = b_.mul(mod, ext[d].v[m], k);
        acc[part].v[m] = d == 0 ? prod : b_.add(mod, acc[part].v[m], prod);
      }
    }
  }
  return {std::move(acc[0]), std::move(acc[1])};
}

LimbVec HeEmitter::mod_down(const LimbVec& ext) {
  const std::size_t K = chain_.alpha();
  if (ext.size() <= K) throw InvalidArgument("mod_down: missing ciphertext limbs");
  const std::size_t level = ext.size() - K - 1;
  std::vector<Operand> src;
  std::vector<std::uint32_t> from, to;
  for (std::size_t k = 0; k < K; ++k) {
    src.push_back(b_.to_nm(p(k), b_.intt(p(k), ext.v[level + 1 + k])));
    from.push_back(p(k));
  }
  for (std::size_t j = 0; j <= level; ++j) to.push_back(q(j));
  const auto conv = b_.bconv(src, from, to);
  LimbVec out;
  for (std::size_t j = 0; j <= level; ++j) {
    const auto qj = chain_.q[j];
    Word pm = 1;
    for (auto pk : chain_.p) pm = rns::mul_mod(pm, pk % qj, qj);
    const Operand z = b_.ntt(q(j), b_.to_sm(q(j), conv[j]));
    const Operand diff = b_.sub(q(j), ext.v[j], z);
    out.v.push_back(b_.mul_imm(q(j), diff, rns::inv_mod(pm, qj), MontForm::SM));
    out.mod.push_back(q(j));
  }
  return out;
}

std::pair<LimbVec, LimbVec> HeEmitter::key_switch(const LimbVec& a, const KeyFetch& key) {
  auto [a0, a1] = inner_product(mod_up(a), key);
  LimbVec k0 = mod_down(a0);
  LimbVec k1 = mod_down(a1);
  return {std::move(k0), std::move(k1)};
}

LimbVec HeEmitter::rescale(const LimbVec& a) {
  const std::size_t l = level_of(a);
  if (l == 0) throw InvalidArgument("rescale: level exhausted");
  const Word ql = chain_.q[l];
  const Word h = ql >> 1;
  const Operand last = b_.to_nm(q(l), b_.add_imm(q(l), b_.intt(q(l), a.v[l]), h, MontForm::SM));
  LimbVec out;
  for (std::size_t j = 0; j < l; ++j) {
    const Word qj = chain_.q[j];
    Operand w = b_.mul_imm(q(j), last, 1, MontForm::DM);
    w = b_.ntt(q(j), b_.sub_imm(q(j), w, h % qj, MontForm::SM));
    const Operand diff = b_.sub(q(j), a.v[j], w);
    out.v.push_back(b_.mul_imm(q(j), diff, rns::inv_mod(ql % qj, qj), MontForm::SM));
    out.mod.push_back(q(j));
  }
  return out;
}

namespace {

void check_sizes(const LimbVec& a, const LimbVec& b, const char* op) {
  if (a.mod != b.mod) throw InvalidArgument(std::string(op) + ": operand bases differ");
}

}  // namespace

LimbVec HeEmitter::add(const LimbVec& a, const LimbVec& b) {
  check_sizes(a, b, "add");
  LimbVec r{{}, a.mod};
  for (std::size_t j = 0; j < a.size(); ++j) r.v.push_back(b_.add(a.mod[j], a.v[j], b.v[j]));
  return r;
}

LimbVec HeEmitter::sub(const LimbVec& a, const LimbVec& b) {
  check_sizes(a, b, "sub");
  LimbVec r{{}, a.mod};
  for (std::size_t j = 0; j < a.size(); ++j) r.v.push_back(b_.sub(a.mod[j], a.v[j], b.v[j]));
  return r;
}

LimbVec HeEmitter::mul(const LimbVec& a, const LimbVec& b) {
  check_sizes(a, b, "mul");
  LimbVec r{{}, a.mod};
  for (std::size_t j = 0; j < a.size(); ++j) r.v.push_back(b_.mul(a.mod[j], a.v[j], b.v[j]));
  return r;
}

LimbVec HeEmitter::mul_add(const LimbVec& acc, const LimbVec& a, const LimbVec& b) {
  check_sizes(a, b, "mul_add");
  check_sizes(acc, a, "mul_add");
  LimbVec r{{}, a.mod};
  for (std::size_t j = 0; j < a.size(); ++j) {
    r.v.push_back(b_.add(a.mod[j], acc.v[j], b_.mul(a.mod[j], a.v[j], b.v[j])));
  }
  return r;
}

LimbVec HeEmitter::mul_plain(const LimbVec& a, std::uint32_t symbol, std::size_t offset) {
  LimbVec r{{}, a.mod};
  for (std::size_t j = 0; j < a.size(); ++j) {
    r.v.push_back(b_.mul(a.mod[j], a.v[j],
                         IrBuilder::mem(symbol, static_cast<std::int64_t>(offset + j))));
  }
  return r;
}

LimbVec HeEmitter::add_plain(const LimbVec& a, std::uint32_t symbol, std::size_t offset) {
  LimbVec r{{}, a.mod};
  for (std::size_t j = 0; j < a.size(); ++j) {
    r.v.push_back(b_.add(a.mod[j], a.v[j],
                         IrBuilder::mem(symbol, static_cast<std::int64_t>(offset + j))));
  }
  return r;
}

LimbVec HeEmitter::mul_plain_add(const LimbVec& acc, const LimbVec& a, std::uint32_t symbol,
                                 std::size_t offset) {
  check_sizes(acc, a, "mul_plain_add");
  const LimbVec prod = mul_plain(a, symbol, offset);
  return add(acc, prod);
}

LimbVec HeEmitter::automorphism(const LimbVec& a, std::int64_t step) {
  LimbVec r{{}, a.mod};
  for (std::size_t j = 0; j < a.size(); ++j) {
    r.v.push_back(b_.automorphism(a.mod[j], a.v[j], step));
  }
  return r;
}

LimbVec HeEmitter::drop_to(const LimbVec& a, std::size_t level) {
  if (level >= a.size()) throw InvalidArgument("drop_to: level above operand");
  LimbVec r;
  r.v.assign(a.v.begin(), a.v.begin() + static_cast<std::ptrdiff_t>(level + 1));
  r.mod.assign(a.mod.begin(), a.mod.begin() + static_cast<std::ptrdiff_t>(level + 1));
  return r;
}

HeEmitter::Ct HeEmitter::load_ct(std::uint32_t symbol, std::size_t level) {
  return {load_poly(symbol, 0, level), load_poly(symbol, level + 1, level)};
}

void HeEmitter::store_ct(const Ct& ct, std::uint32_t symbol) {
  store_poly(ct.c0, symbol, 0);
  store_poly(ct.c1, symbol, ct.c0.size());
}

HeEmitter::Tensor HeEmitter::tensor(const Ct& a, const Ct& b) {
  return {mul(a.c0, b.c0), mul_add(mul(a.c1, b.c0), a.c0, b.c1), mul(a.c1, b.c1)};
}

HeEmitter::Tensor HeEmitter::tensor_add(const Tensor& acc, const Ct& a, const Ct& b) {
  return {mul_add(acc.d0, a.c0, b.c0), mul_add(mul_add(acc.d1, a.c1, b.c0), a.c0, b.c1),
          mul_add(acc.d2, a.c1, b.c1)};
}

HeEmitter::Ct HeEmitter::relinearize(const Tensor& t, const KeyFetch& relin) {
  auto [k0, k1] = key_switch(t.d2, relin);
  return {add(t.d0, k0), add(t.d1, k1)};
}

HeEmitter::Ct HeEmitter::hmult(const Ct& a, const Ct& b, const KeyFetch& relin,
                               bool do_rescale) {
  if (a.level() != b.level()) throw InvalidArgument("hmult: levels differ");
  Ct r = relinearize(tensor(a, b), relin);
  return do_rescale ? rescale(r) : r;
}

HeEmitter::Ct HeEmitter::hadd(const Ct& a, const Ct& b) {
  return {add(a.c0, b.c0), add(a.c1, b.c1)};
}

HeEmitter::Ct HeEmitter::hrot(const Ct& a, std::int64_t step, const KeyFetch& key) {
  const LimbVec c0 = automorphism(a.c0, step);
  const LimbVec c1 = automorphism(a.c1, step);
  auto [k0, k1] = key_switch(c1, key);
  return {add(c0, k0), std::move(k1)};
}

std::vector<HeEmitter::Ct> HeEmitter::hrot_hoisted(const Ct& a,
                                                   const std::vector<std::int64_t>& steps,
                                                   const std::vector<KeyFetch>& keys) {
  if (steps.size() != keys.size()) throw InvalidArgument("hoisting: one key per step");
  const std::vector<LimbVec> ext = mod_up(a.c1);
  std::vector<Ct> out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    std::vector<LimbVec> rotated;
    for (const auto& e : ext) rotated.push_back(automorphism(e, steps[i]));
    auto [a0, a1] = inner_product(rotated, keys[i]);
    const LimbVec c0 = automorphism(a.c0, steps[i]);
    LimbVec m0 = mod_down(a0);
    out.push_back({add(c0, m0), mod_down(a1)});
  }
  return out;
}

KeyFetch HeEmitter::key_from_memory(std::uint32_t b_sym, std::uint32_t a_sym,
                                    std::size_t id) const {
  const std::size_t dnum = prm_.dnum, stride = key_stride();
  return [=](std::size_t d, int part, std::size_t m, std::uint32_t) {
    return IrBuilder::mem(part == 0 ? b_sym : a_sym,
                          static_cast<std::int64_t>((id * dnum + d) * stride + m));
  };
}

KeyFetch HeEmitter::key_with_loads(std::uint32_t b_sym, std::uint32_t a_sym, std::size_t id) {
  const std::size_t dnum = prm_.dnum, stride = key_stride();
  return [=, this](std::size_t d, int part, std::size_t m, std::uint32_t mod) {
    return b_.load(mod, part == 0 ? b_sym : a_sym,
                   static_cast<std::int64_t>((id * dnum + d) * stride + m));
  };
}

}  // namespace effact::workloads
