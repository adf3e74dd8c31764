// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "effact/kernels/bconv.hpp"
#include "effact/kernels/ntt.hpp"
#include "effact/kernels/rns_ops.hpp"
#include "effact/kernels/vector_ops.hpp"
#include "effact/rns/modulus.hpp"

namespace {

using namespace effact;
using rns::Word;

std::vector<Word> random_words(std::size_t n, Word q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Word> d(0, q - 1);
  std::vector<Word> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

const rns::Modulus& modulus_for(std::size_t n) {
  static std::vector<std::pair<std::size_t, rns::Modulus>> cache;
  for (const auto& [k, m] : cache) {
    if (k == n) return m;
  }
  cache.emplace_back(n, rns::make_modulus_chain(n, 1, 50)[0]);
  return cache.back().second;
}

template <bool Serial>
void BM_Mmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto& m = modulus_for(n);
  const auto a = random_words(n, m.q(), 1), b = random_words(n, m.q(), 2);
  std::vector<Word> out(n);
  for (auto _ : state) {
    if constexpr (Serial) kernels::serial::mmul(a, b, out, m);
    else kernels::mmul(a, b, out, m);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <bool Serial>
void BM_Mac(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto& m = modulus_for(n);
  const auto acc = random_words(n, m.q(), 3), a = random_words(n, m.q(), 4),
             b = random_words(n, m.q(), 5);
  std::vector<Word> out(n);
  for (auto _ : state) {
    if constexpr (Serial) kernels::serial::mac(acc, a, b, out, m);
    else kernels::mac(acc, a, b, out, m);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <bool Serial>
void BM_NttForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto& m = modulus_for(n);
  const auto src = random_words(n, m.q(), 6);
  std::vector<Word> a(n);
  for (auto _ : state) {
    a = src;
    if constexpr (Serial) kernels::serial::ntt_forward_inplace(a, m);
    else kernels::ntt_forward_inplace(a, m);
    benchmark::DoNotOptimize(a.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}

template <bool Serial>
void BM_BconvMerged(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const kernels::BconvTables t{
      rns::RnsBasis(rns::make_modulus_chain(n, 4, 45)),
      rns::RnsBasis(rns::make_modulus_chain(n, 2, 50), rns::BasisRole::Extension)};
  std::vector<kernels::ResiduePoly> limbs;
  for (std::size_t j = 0; j < t.from.moduli.size(); ++j) {
    limbs.emplace_back(t.from.moduli[j], random_words(n, t.from.moduli[j].q(), 10 + j),
                       kernels::Domain::Coefficient, kernels::Order::Natural,
                       rns::MontForm::SM);
  }
  const auto ntt = kernels::rns_ntt_fwd(kernels::RnsPoly(t.from, std::move(limbs)));
  const auto deferred = kernels::rns_ntt_inv(ntt, true);
  for (auto _ : state) {
    auto r = Serial ? kernels::serial::bconv_merged(deferred, t)
                    : kernels::bconv_merged(deferred, t);
    benchmark::DoNotOptimize(r.limbs.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * 4 * 2));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (std::int64_t n : {1 << 10, 1 << 12, 1 << 14, 1 << 16}) b->Arg(n);
}

BENCHMARK_TEMPLATE(BM_Mmul, true)->Name("mmul/serial")->Apply(sizes);
BENCHMARK_TEMPLATE(BM_Mmul, false)->Name("mmul/omp")->Apply(sizes)->UseRealTime();
BENCHMARK_TEMPLATE(BM_Mac, true)->Name("mac/serial")->Apply(sizes);
BENCHMARK_TEMPLATE(BM_Mac, false)->Name("mac/omp")->Apply(sizes)->UseRealTime();
BENCHMARK_TEMPLATE(BM_NttForward, true)->Name("ntt_forward/serial")->Apply(sizes);
BENCHMARK_TEMPLATE(BM_NttForward, false)->Name("ntt_forward/omp")->Apply(sizes)->UseRealTime();
BENCHMARK_TEMPLATE(BM_BconvMerged, true)->Name("bconv_merged/serial")->Arg(1 << 12)->Arg(1 << 14);
BENCHMARK_TEMPLATE(BM_BconvMerged, false)
    ->Name("bconv_merged/omp")
    ->Arg(1 << 12)
    ->Arg(1 << 14)
    ->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
