// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "effact/compiler/analysis.hpp"
#include "effact/compiler/compile.hpp"
#include "effact/compiler/passes.hpp"
#include "effact/he/ckks.hpp"
#include "effact/isa/executor.hpp"
#include "effact/kernels/automorphism.hpp"
#include "effact/kernels/bconv.hpp"
#include "effact/kernels/ntt.hpp"
#include "effact/kernels/rns_ops.hpp"
#include "effact/rns/modulus.hpp"
#include "effact/sim/experiments.hpp"
#include "effact/sim/simulator.hpp"
#include "effact/workloads/generators.hpp"
#include "effact/workloads/mix.hpp"
#include "effact/workloads/params.hpp"
#include "effact/workloads/random.hpp"

namespace {

using namespace effact;
using kernels::Domain;
using kernels::Order;
using kernels::ResiduePoly;
using kernels::RnsPoly;
using rns::MontForm;
using rns::Word;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<Word> random_words(std::mt19937_64& rng, std::size_t n, Word q) {
  std::uniform_int_distribution<Word> d(0, q - 1);
  std::vector<Word> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Schoolbook negacyclic product, exact for n * (q-1)^2 < 2^64: products are
// accumulated without reduction into a length-2n array and folded once.
__attribute__((target_clones("avx2", "default")))
void accumulate_u64(const std::uint32_t* a, const std::uint32_t* b, std::uint64_t* acc,
                    std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t ai = a[i];
    std::uint64_t* __restrict out = acc + i;
    for (std::size_t j = 0; j < n; ++j) out[j] += ai * b[j];
  }
}

std::vector<Word> schoolbook(const std::vector<Word>& a, const std::vector<Word>& b, Word q) {
  const std::size_t n = a.size();
  std::vector<Word> r(n);
  const long double bound = static_cast<long double>(n) * (q - 1) * (q - 1);
  if (q < (Word{1} << 32) && bound < 18446744073709551615.0L) {
    std::vector<std::uint32_t> a32(a.begin(), a.end()), b32(b.begin(), b.end());
    std::vector<std::uint64_t> acc(2 * n, 0);
    accumulate_u64(a32.data(), b32.data(), acc.data(), n);
    for (std::size_t k = 0; k < n; ++k) r[k] = (acc[k] % q + q - acc[k + n] % q) % q;
    return r;
  }
  // Wide path: 128-bit accumulators reduced at every step.
  std::vector<unsigned __int128> acc(2 * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      acc[i + j] = (acc[i + j] + static_cast<unsigned __int128>(a[i]) * b[j]) % q;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    r[k] = static_cast<Word>((acc[k] + q - acc[k + n]) % q);
  }
  return r;
}

// ------------------------------------------------------------------ 1

Outcome kernel_exactness() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  struct Set {
    std::size_t n;
    unsigned bits;
    std::size_t pairs;
  };
  // Three moduli per degree. n = 4096 uses 26-bit primes so the O(n^2)
  // oracle can run unreduced; a smaller sample covers 59-bit primes there.
  const std::vector<Set> sets{{8, 59, 1000},   {8, 45, 1000},   {8, 30, 1000},
                              {256, 59, 1000}, {256, 45, 1000}, {256, 30, 1000},
                              {4096, 26, 3000}, {4096, 59, 4}};
  std::size_t checked = 0, bad = 0;
  for (const auto& s : sets) {
    const std::size_t count = s.n == 4096 && s.bits == 26 ? 3 : 1;
    const auto mods = rns::make_modulus_chain(s.n, count, s.bits);
    const std::size_t per = s.pairs / count;
    for (const auto& m : mods) {
      for (std::size_t k = 0; k < per; ++k) {
        const auto a = random_words(rng, s.n, m.q()), b = random_words(rng, s.n, m.q());
        const ResiduePoly pa(m, a), pb(m, b);
        bad += kernels::negacyclic_mul(pa, pb).coeffs != schoolbook(a, b, m.q());
        ++checked;
      }
    }
  }
  const double t = seconds_since(t0);
  return {bad == 0 && t < 30.0, std::to_string(checked) + " pairs (n 8/256/4096, 3 moduli each), " +
                                    std::to_string(bad) + " mismatches, " + fmt("%.1f s", t) +
                                    " (limit 30 s)"};
}

// ------------------------------------------------------------------ 2

Outcome bconv_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  const auto cm = rns::make_modulus_chain(256, 4, 45);
  const auto bm = rns::make_modulus_chain(256, 2, 50);
  const kernels::BconvTables t{rns::RnsBasis(cm), rns::RnsBasis(bm, rns::BasisRole::Extension)};
  std::size_t bad = 0;
  for (int it = 0; it < 1000; ++it) {
    std::vector<ResiduePoly> limbs;
    for (const auto& m : cm) {
      limbs.emplace_back(m, random_words(rng, 256, m.q()), Domain::Coefficient,
                         Order::Natural, MontForm::SM);
    }
    const auto a = kernels::rns_ntt_fwd(RnsPoly(t.from, std::move(limbs)));
    const auto merged = kernels::bconv_merged(kernels::rns_ntt_inv(a, true), t);
    const auto exact = kernels::rns_to_form(kernels::rns_ntt_inv(a, false), MontForm::NM);
    const auto unmerged = kernels::rns_to_form(kernels::bconv(exact, t), MontForm::SM);
    bad += !(merged == unmerged);
  }
  const double s = seconds_since(t0);
  return {bad == 0 && s < 10.0, "1000 RnsPoly n=256 |C|=4 |B|=2, " + std::to_string(bad) +
                                    " mismatches, " + fmt("%.2f s", s) + " (limit 10 s)"};
}

// ------------------------------------------------------------------ 3

double rel_error(const std::vector<he::Complex>& got, const std::vector<he::Complex>& want) {
  double err = 0, mag = 1;
  for (std::size_t j = 0; j < want.size(); ++j) {
    err = std::max(err, std::abs(got[j] - want[j]));
    mag = std::max(mag, std::abs(want[j]));
  }
  return err / mag;
}

Outcome compile_correctness() {
  const auto t0 = Clock::now();
  workloads::WorkloadParams w;
  w.n = 1024;
  w.L = w.l = 4;
  w.dnum = 2;
  he::CkksParams cp;
  cp.n = w.n;
  cp.L = w.L;
  cp.dnum = w.dnum;
  cp.q0_bits = w.q0_bits;
  cp.q_bits = w.q_bits;
  cp.p_bits = w.p_bits;
  const he::Context ctx(cp);
  const std::vector<std::int64_t> none;
  const he::KeySet keys = he::keygen_small(ctx, none, 303);
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<he::Complex> v1(512), v2(512);
  for (auto& x : v1) x = he::Complex(u(rng), u(rng));
  for (auto& x : v2) x = he::Complex(u(rng), u(rng));
  const double scale = cp.scale;
  const auto a = he::encrypt(ctx, keys.secret, he::encode(ctx, v1, w.l, scale), rng);
  const auto b = he::encrypt(ctx, keys.secret, he::encode(ctx, v2, w.l, scale), rng);
  const he::Tensor t = he::tensor(a, b);
  const auto [want0, want1] = he::key_switch(ctx, t.d2, keys.relin);

  const isa::Program m = compiler::compile(workloads::gen_keyswitch(w),
                                           compiler::HardwareDescription{});
  const auto img = isa::execute_program(m, workloads::keyswitch_image(ctx, t.d2, keys.relin));
  const auto basis = ctx.level_basis(w.l);
  const RnsPoly k0(basis, img.get("k0", 0, basis.size()));
  const RnsPoly k1(basis, img.get("k1", 0, basis.size()));
  const bool identical = k0 == want0 && k1 == want1;

  const double sc = a.scale * b.scale;
  const he::Ciphertext ct{kernels::rns_add(t.d0, k0), kernels::rns_add(t.d1, k1), w.l, sc};
  const auto got = he::decode(ctx, he::decrypt(ctx, keys.secret, ct));
  const auto want = he::decode(ctx, he::decrypt3(ctx, keys.secret, t.d0, t.d1, t.d2, w.l, sc));
  const double err = rel_error(got, want);
  const double s = seconds_since(t0);
  const bool ok = identical && err < std::ldexp(1.0, -15) && s < 60.0;
  return {ok, std::string("n=1024 L=4 dnum=2, ") + std::to_string(m.code.size()) +
                  " machine instructions, bit-identical " + (identical ? "yes" : "NO") +
                  ", decrypt rel. error " + fmt("%.2e", err) + " (limit 2^-15 = " +
                  fmt("%.2e", std::ldexp(1.0, -15)) + "), " + fmt("%.1f s", s)};
}

// ------------------------------------------------------------------ 4

Outcome automorphism() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(404);
  const std::size_t n = 1024;
  const auto m = rns::make_modulus_chain(n, 1, 50)[0];
  const ResiduePoly a(m, random_words(rng, n, m.q()));
  const auto a_ntt = kernels::ntt_fwd(a);
  std::size_t bad = 0, count = 0;
  for (std::int64_t s = 0; s < static_cast<std::int64_t>(n / 2); ++s) {
    const auto want = kernels::ntt_fwd(kernels::automorphism_apply(a, s));
    bad += !(kernels::automorphism_ntt(a_ntt, s) == want);
    ++count;
  }
  std::size_t tbad = 0, tcount = 0;
  for (std::size_t tn : {16u, 256u}) {
    const auto logn = static_cast<unsigned>(std::countr_zero(tn));
    for (std::size_t lanes : {4u, 16u}) {
      std::vector<Word> x(tn);
      for (auto& e : x) e = rng() % 1000003;
      const std::size_t rows = tn / lanes;
      kernels::WordMatrix mat{rows, lanes, std::vector<Word>(tn)};
      for (std::size_t k = 0; k < tn; ++k) {
        mat.data[k] = x[rns::bit_reverse(static_cast<unsigned>(k), logn)];
      }
      kernels::WordMatrix direct{rows, lanes, std::vector<Word>(tn)};
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < lanes; ++c) direct.at(r, c) = x[c * rows + r];
      }
      tbad += !(kernels::transpose_fixed_network(mat, lanes) == direct);
      ++tcount;
    }
  }
  const double sec = seconds_since(t0);
  return {bad == 0 && tbad == 0 && sec < 30.0,
          std::to_string(count) + " exponents at n=1024, " + std::to_string(bad) +
              " mismatches; transpose " + std::to_string(tcount) + " configs, " +
              std::to_string(tbad) + " mismatches, " + fmt("%.2f s", sec)};
}

// ------------------------------------------------------------------ 5

Outcome pass_soundness() {
  const auto t0 = Clock::now();
  compiler::HardwareDescription hw;
  hw.slots = 8;
  hw.fifo_depth = 2;
  hw.window = 8;
  const std::size_t programs = 200;
  std::size_t runs = 0, bad = 0;
  for (std::uint64_t seed = 0; seed < programs; ++seed) {
    const auto rc = workloads::gen_random_program(1000 + seed);
    const auto ref = isa::execute_program(rc.program, rc.image);
    for (unsigned mask = 0; mask < 64; ++mask) {
      compiler::CompileOptions opt;
      opt.propagate = mask & 1;
      opt.pre = mask & 2;
      opt.peephole = mask & 4;
      opt.schedule = mask & 8;
      opt.alloc = mask & 16;
      opt.streaming = mask & 32;
      isa::ExecOptions eo;
      if (opt.alloc) eo.slots = hw.slots;
      try {
        const auto p = compiler::compile(rc.program, hw, opt);
        bad += !isa::execute_program(p, rc.image, eo).dram_equal(ref);
      } catch (const Error&) {
        ++bad;
      }
      ++runs;
    }
  }
  const double s = seconds_since(t0);
  return {bad == 0 && s < 300.0, std::to_string(programs) + " programs x 64 pass subsets = " +
                                     std::to_string(runs) + " runs, " + std::to_string(bad) +
                                     " differing, " + fmt("%.1f s", s) + " (limit 300 s)"};
}

// ------------------------------------------------------------------ 6

const isa::Program& table3_lowered() {
  static const isa::Program p =
      compiler::lower(workloads::gen_bootstrap_skeleton(workloads::WorkloadParams::table3()));
  return p;
}

// Copies whose original is still defined too. A lone ".dup" is fine: the
// original may have gone dead once its uses were redirected.
std::size_t surviving_duplicates(const isa::Program& p) {
  std::set<std::string> defs;
  for (const auto& in : p.code) {
    for (const auto& o : in.dst) {
      if (o.kind == isa::OperandKind::VReg) defs.insert(p.vreg_names[o.index]);
    }
  }
  std::size_t c = 0;
  for (const auto& name : defs) {
    if (name.size() > 4 && name.compare(name.size() - 4, 4, ".dup") == 0) {
      c += defs.count(name.substr(0, name.size() - 4));
    }
  }
  return c;
}

Outcome redundancy_elimination() {
  const auto t0 = Clock::now();
  const auto clean = workloads::gen_bootstrap_skeleton(workloads::WorkloadParams::desk_boot());
  isa::Program dirty = clean;
  const std::size_t injected = workloads::inject_duplicates(dirty, 606, 400);
  auto reduce = [](const isa::Program& p) {
    return compiler::pre(compiler::propagate(compiler::lower(p)));
  };
  const auto base = reduce(clean);
  const auto cleaned = reduce(dirty);
  const std::size_t left_named = surviving_duplicates(cleaned);
  const std::size_t excess =
      cleaned.code.size() > base.code.size() ? cleaned.code.size() - base.code.size() : 0;
  const std::size_t remaining = std::max(left_named, excess);
  const double removed = injected ? 1.0 - static_cast<double>(remaining) / injected : 0.0;

  const auto lowered_desk = compiler::lower(clean);
  const double desk_frac = 1.0 - static_cast<double>(base.code.size()) / lowered_desk.code.size();
  const auto& t3 = table3_lowered();
  const auto t3_reduced = compiler::pre(compiler::propagate(t3));
  const double t3_frac = 1.0 - static_cast<double>(t3_reduced.code.size()) / t3.code.size();
  const double s = seconds_since(t0);
  return {injected > 0 && remaining == 0,
          std::to_string(injected) + " injected into the desk skeleton, " +
              fmt("%.1f%% removed", 100.0 * removed) + "; un-injected eliminated fraction " +
              fmt("%.2f%% (desk)", 100.0 * desk_frac) + ", " +
              fmt("%.2f%% (full bootstrapping params)", 100.0 * t3_frac) +
              " vs 12.9% reference at full scale, " + fmt("%.1f s", s)};
}

// ------------------------------------------------------------------ 7

Outcome instruction_mix() {
  const auto t0 = Clock::now();
  const auto mix = workloads::instruction_mix(table3_lowered());
  const double ma = mix.mult_add_share();
  const double ntt = mix.fraction(workloads::MixCategory::Ntt);
  const double s = seconds_since(t0);
  const bool ok = std::abs(ma - 0.909) <= 0.05 && std::abs(ntt - 0.065) <= 0.03;
  return {ok, std::to_string(mix.total) + " lowered instructions, MULT+ADD " +
                  fmt("%.2f%%", 100.0 * ma) + " (90.9 +- 5), NTT " + fmt("%.2f%%", 100.0 * ntt) +
                  " (6.5 +- 3), BC_MULT/MULT " + fmt("%.1f%%", 100.0 * mix.bconv_mult_share()) +
                  ", " + fmt("%.1f s (program shared with 6)", s)};
}

// ------------------------------------------------------------------ 8-10

std::vector<std::pair<std::string, isa::Program>> simulated;  // for criterion 10
std::vector<std::pair<isa::Program, compiler::HardwareDescription>> sim_inputs;

void remember(const std::string& name, const isa::Program& m,
              const compiler::HardwareDescription& hw) {
  simulated.emplace_back(name, m);
  sim_inputs.emplace_back(m, hw);
}

workloads::WorkloadParams desk_keyswitch() {
  workloads::WorkloadParams w;
  w.n = 1024;
  w.L = w.l = 4;
  w.dnum = 2;
  return w;
}

Outcome streaming_benefit() {
  const auto ir = workloads::gen_keyswitch(desk_keyswitch());
  compiler::HardwareDescription hw;
  compiler::CompileOptions off;
  off.streaming = false;
  compiler::CompileReport rep;
  hw.slots = 1024;
  compiler::compile(ir, hw, off, &rep);
  hw.slots = std::max<std::size_t>(2, rep.max_live / 2);
  const auto c = sim::compare_streaming(ir, hw);
  compiler::CompileOptions on;
  remember("keyswitch streaming on", compiler::compile(ir, hw, on), hw);
  remember("keyswitch streaming off", compiler::compile(ir, hw, off), hw);
  const bool ok = c.on.dram.total() < c.off.dram.total() && c.on.cycles < c.off.cycles;
  return {ok, "slots " + std::to_string(hw.slots) + " (max-liveness " +
                  std::to_string(rep.max_live) + "), DRAM bytes " +
                  std::to_string(c.on.dram.total()) + " vs " + std::to_string(c.off.dram.total()) +
                  fmt(" (-%.1f%%; ref. 42.2%%)", 100.0 * c.dram_reduction()) + ", cycles " +
                  std::to_string(c.on.cycles) + " vs " + std::to_string(c.off.cycles) +
                  fmt(" (-%.1f%%; ref. ~40%%)", 100.0 * c.cycle_reduction())};
}

Outcome sram_sweep() {
  const auto t0 = Clock::now();
  const auto ir = workloads::gen_keyswitch(desk_keyswitch());
  compiler::HardwareDescription hw;
  const std::vector<std::size_t> sizes{8, 16, 32, 64, 128};
  const auto pts = sim::sweep_sram(ir, hw, sizes);
  bool mono = true;
  std::ostringstream series;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) {
      mono = mono && pts[i].report.cycles <= pts[i - 1].report.cycles &&
             pts[i].report.fu_utilization >= pts[i - 1].report.fu_utilization;
    }
    series << (i ? ", " : "") << pts[i].slots << ":" << pts[i].report.cycles << "/"
           << fmt("%.3f", pts[i].report.fu_utilization);
    auto h = hw;
    h.slots = pts[i].slots;
    remember("keyswitch slots " + std::to_string(h.slots), compiler::compile(ir, h), h);
  }
  const double s = seconds_since(t0);
  return {mono && s < 300.0,
          "slots:cycles/fu-util " + series.str() + ", " + fmt("%.2f s", s) + " (limit 300 s)"};
}

Outcome simulator_sanity() {
  compiler::HardwareDescription hw;
  hw.slots = 16;
  const auto boot = workloads::gen_bootstrap_skeleton(workloads::WorkloadParams::desk_boot());
  remember("desk bootstrap", compiler::compile(boot, hw), hw);
  workloads::WorkloadParams hp;
  hp.n = 64;
  hp.L = hp.l = 7;
  hp.dnum = 4;
  hp.slots = 32;
  hp.q_bits = 36;
  remember("helr", compiler::compile(workloads::gen_helr_iteration(hp), hw), hw);
  remember("hoisted", compiler::compile(workloads::gen_hoisted_rotations(desk_keyswitch(), {1, 2, 5}), hw), hw);
  compiler::HardwareDescription tight = hw;
  tight.slots = 8;
  tight.fifo_depth = 2;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    remember("random", compiler::compile(workloads::gen_random_program(seed).program, tight),
             tight);
  }
  std::size_t bound_fail = 0, nondet = 0;
  for (const auto& [m, h] : sim_inputs) {
    const auto first = sim::simulate(m, h);
    const auto cp = compiler::critical_path_length(m, h);
    const auto dram = static_cast<std::uint64_t>(
        std::ceil(static_cast<double>(first.dram.total()) / h.dram_bw));
    bound_fail += first.cycles < std::max(cp, dram);
    const auto ref = sim::to_json(first);
    for (int k = 1; k < 5; ++k) nondet += sim::to_json(sim::simulate(m, h)) != ref;
  }
  return {bound_fail == 0 && nondet == 0,
          std::to_string(sim_inputs.size()) + " programs, " + std::to_string(bound_fail) +
              " below max(critical path, bytes/bw), " + std::to_string(nondet) +
              " differing repeats over 5 runs each"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all{
      {"kernel exactness", kernel_exactness},
      {"merged conversion equivalence", bconv_equivalence},
      {"end-to-end compile correctness", compile_correctness},
      {"automorphism and transpose network", automorphism},
      {"pass soundness", pass_soundness},
      {"redundancy elimination", redundancy_elimination},
      {"instruction mix", instruction_mix},
      {"streaming benefit", streaming_benefit},
      {"SRAM sweep shape", sram_sweep},
      {"simulator sanity", simulator_sanity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    Outcome o;
    try {
      o = all[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, all[i].name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, all.size());
  return failed;
}
