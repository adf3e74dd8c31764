// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "effact/compiler/compile.hpp"
#include "effact/he/ckks.hpp"
#include "effact/isa/executor.hpp"
#include "effact/isa/text.hpp"
#include "effact/kernels/rns_ops.hpp"
#include "effact/workloads/generators.hpp"
#include "effact/workloads/mix.hpp"
#include "effact/workloads/random.hpp"

namespace effact::workloads {
namespace {

using isa::Opcode;

WorkloadParams desk_ks() {
  WorkloadParams p;
  p.n = 1024;
  p.L = 4;
  p.l = 4;
  p.dnum = 2;
  return p;
}

he::CkksParams ckks_of(const WorkloadParams& w) {
  he::CkksParams c;
  c.n = w.n;
  c.L = w.L;
  c.dnum = w.dnum;
  c.q0_bits = w.q0_bits;
  c.q_bits = w.q_bits;
  c.p_bits = w.p_bits;
  return c;
}

std::size_t count_op(const isa::Program& p, Opcode op) {
  std::size_t c = 0;
  for (const auto& in : p.code) c += in.op == op;
  return c;
}

kernels::RnsPoly read_poly(const isa::MemoryImage& img, const std::string& name,
                           std::size_t offset, const rns::RnsBasis& basis) {
  return kernels::RnsPoly(basis, img.get(name, offset, basis.size()));
}

TEST(Params, Validation) {
  WorkloadParams p = desk_ks();
  EXPECT_NO_THROW(p.validate());
  p.l = 5;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = desk_ks();
  p.n = 1000;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = WorkloadParams::table3();
  EXPECT_NO_THROW(p.validate());
  p.L_cts = 5;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(Params, ChainMatchesContext) {
  const WorkloadParams w = desk_ks();
  const he::Context ctx(ckks_of(w));
  const ModulusChain c = make_chain(w);
  ASSERT_EQ(c.q.size(), ctx.q_basis().size());
  for (std::size_t j = 0; j < c.q.size(); ++j) EXPECT_EQ(c.q[j], ctx.q_basis()[j].q());
  ASSERT_EQ(c.p.size(), ctx.p_basis().size());
  for (std::size_t k = 0; k < c.p.size(); ++k) EXPECT_EQ(c.p[k], ctx.p_basis()[k].q());
  for (std::size_t level = 0; level <= w.L; ++level) {
    ASSERT_EQ(digit_count(level, w.L + 1, w.dnum), ctx.digit_count(level));
    for (std::size_t d = 0; d < ctx.digit_count(level); ++d) {
      EXPECT_EQ(digit_range(d, level, w.L + 1, w.dnum), ctx.digit_range(d, level));
    }
  }
}

TEST(KeySwitch, DigitPipelinesAndNttCount) {
  const WorkloadParams w = desk_ks();
  const isa::Program p = gen_keyswitch(w);
  EXPECT_NO_THROW(isa::validate(p));
  EXPECT_EQ(count_op(p, Opcode::BCONV), 2u + 2u);  // dnum mod-ups, two mod-downs
  // Per digit: INTT of its own limbs and NTT of every converted limb; then
  // per mod-down K INTTs and l+1 NTTs.
  const std::size_t K = make_chain(w).alpha(), l = w.l;
  std::size_t ntt = 0, intt = 0;
  for (std::size_t d = 0; d < digit_count(l, w.L + 1, w.dnum); ++d) {
    const auto [lo, hi] = digit_range(d, l, w.L + 1, w.dnum);
    intt += hi - lo;
    ntt += (l + 1 - (hi - lo)) + K;
  }
  intt += 2 * K;
  ntt += 2 * (l + 1);
  EXPECT_EQ(count_op(p, Opcode::NTT), ntt);
  EXPECT_EQ(count_op(p, Opcode::INTT), intt);
  // Text round trip.
  EXPECT_EQ(to_ir_text(isa::parse_ir(to_ir_text(p))), to_ir_text(p));
}

TEST(KeySwitch, CompiledMatchesReferenceBitExact) {
  const WorkloadParams w = desk_ks();
  const he::Context ctx(ckks_of(w));
  const std::vector<std::int64_t> none;
  const he::KeySet keys = he::keygen_small(ctx, none, 7);
  std::mt19937_64 rng(11);
  std::vector<he::Complex> v(16, he::Complex(0.25, -0.5));
  const auto pt = he::encode(ctx, v, w.l, ctx.params().scale);
  const auto ct = he::encrypt(ctx, keys.secret, pt, rng);
  const auto t = he::tensor(ct, ct);
  const auto [want0, want1] = he::key_switch(ctx, t.d2, keys.relin);

  compiler::HardwareDescription hw;
  compiler::CompileReport rep;
  const isa::Program ir = gen_keyswitch(w);
  const isa::Program m = compiler::compile(ir, hw, {}, &rep);
  EXPECT_EQ(m.form, isa::Form::Machine);
  EXPECT_GT(rep.peephole.macs, 0u);
  EXPECT_GT(rep.peephole.deferred, 0u);
  const auto img = isa::execute_program(m, keyswitch_image(ctx, t.d2, keys.relin));
  const auto basis = ctx.level_basis(w.l);
  EXPECT_EQ(read_poly(img, "k0", 0, basis), want0);
  EXPECT_EQ(read_poly(img, "k1", 0, basis), want1);
}

TEST(KeySwitch, UncompiledIrMatchesReference) {
  WorkloadParams w = desk_ks();
  w.n = 256;
  w.l = 3;
  const he::Context ctx(ckks_of(w));
  const std::vector<std::int64_t> none;
  const he::KeySet keys = he::keygen_small(ctx, none, 3);
  std::mt19937_64 rng(5);
  std::vector<he::Complex> v(8, he::Complex(0.5, 0.125));
  const auto ct = he::encrypt(ctx, keys.secret, he::encode(ctx, v, w.l, ctx.params().scale), rng);
  const auto [want0, want1] = he::key_switch(ctx, ct.c1, keys.relin);
  const auto img =
      isa::execute_program(gen_keyswitch(w), keyswitch_image(ctx, ct.c1, keys.relin));
  EXPECT_EQ(read_poly(img, "k0", 0, ctx.level_basis(w.l)), want0);
  EXPECT_EQ(read_poly(img, "k1", 0, ctx.level_basis(w.l)), want1);
}

TEST(Hoisted, MatchesHoistedReference) {
  WorkloadParams w = desk_ks();
  w.n = 256;
  const he::Context ctx(ckks_of(w));
  const std::vector<std::int64_t> steps{1, 2, 5};
  const he::KeySet keys = he::keygen_small(ctx, steps, 9);
  std::mt19937_64 rng(13);
  std::vector<he::Complex> v(32);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = he::Complex(0.01 * i, -0.02 * i);
  const auto ct = he::encrypt(ctx, keys.secret, he::encode(ctx, v, w.l, ctx.params().scale), rng);
  const auto want = he::hrot_hoisted(ctx, ct, steps, keys);

  const isa::Program p = gen_hoisted_rotations(w, steps);
  EXPECT_EQ(count_op(p, Opcode::BCONV), 2u + 2u * steps.size());  // one shared decomposition
  std::vector<const he::SwitchKey*> ks;
  for (auto s : steps) ks.push_back(&keys.rot.at(s));
  const isa::Program m = compiler::compile(p, compiler::HardwareDescription{});
  const auto img = isa::execute_program(m, hoisted_image(ctx, ct, ks));
  const auto basis = ctx.level_basis(w.l);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    EXPECT_EQ(read_poly(img, "out", i * 2 * (w.l + 1), basis), want[i].c0) << "step " << steps[i];
    EXPECT_EQ(read_poly(img, "out", i * 2 * (w.l + 1) + w.l + 1, basis), want[i].c1);
  }
}

TEST(Helr, ExecutesAndIsMacDense) {
  WorkloadParams w;
  w.n = 64;
  w.L = 7;
  w.l = 7;
  w.dnum = 4;
  w.slots = 32;
  w.q_bits = 36;
  const isa::Program p = gen_helr_iteration(w);
  EXPECT_GT(mac_fusable_fraction(p), 0.5);
  const auto img = random_inputs(p, 1);
  const auto ref = isa::execute_program(p, img);
  const auto got = isa::execute_program(compiler::compile(p, compiler::HardwareDescription{}), img);
  EXPECT_TRUE(got.dram_equal(ref));
}

TEST(Bootstrap, DeskSkeletonCompilesAndExecutes) {
  const WorkloadParams w = WorkloadParams::desk_boot();
  const isa::Program p = gen_bootstrap_skeleton(w);
  const auto img = random_inputs(p, 2);
  const auto ref = isa::execute_program(p, img);
  const auto got = isa::execute_program(compiler::compile(p, compiler::HardwareDescription{}), img);
  EXPECT_TRUE(got.dram_equal(ref));
  EXPECT_FALSE(ref.region("out").empty());
}

TEST(Bootstrap, RejectsMissingBudget) {
  EXPECT_THROW(gen_bootstrap_skeleton(desk_ks()), InvalidArgument);
}

TEST(Mix, MmulOnly) {
  isa::Program p;
  p.n = 8;
  p.moduli = {17};
  for (int i = 0; i < 10; ++i) {
    isa::Instruction in;
    in.op = Opcode::MMUL;
    p.code.push_back(in);
  }
  const auto m = instruction_mix(p);
  EXPECT_EQ(m[MixCategory::Mult], 10u);
  EXPECT_EQ(m.total, 10u);
  EXPECT_DOUBLE_EQ(m.fraction(MixCategory::Mult), 1.0);
  EXPECT_DOUBLE_EQ(instruction_mix(isa::Program{}).fraction(MixCategory::Ntt), 0.0);
}

TEST(Mix, PartitionAndInvariance) {
  const isa::Program ir = gen_keyswitch(desk_ks());
  const isa::Program lowered = compiler::lower(ir);
  const auto m = instruction_mix(lowered);
  std::size_t sum = 0;
  for (auto c : m.counts) sum += c;
  EXPECT_EQ(sum, m.total);
  EXPECT_GT(m[MixCategory::BcMult], 0u);
  EXPECT_GT(m[MixCategory::BcAdd], 0u);
  // Scheduling only reorders.
  const auto s = instruction_mix(compiler::schedule(lowered, compiler::HardwareDescription{}));
  EXPECT_EQ(s.counts, m.counts);
}

TEST(Random, DeterministicAndExecutable) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = gen_random_program(seed);
    const auto b = gen_random_program(seed);
    EXPECT_EQ(a.program, b.program);
    EXPECT_NO_THROW(isa::validate(a.program)) << seed;
    EXPECT_NO_THROW(isa::execute_program(a.program, a.image)) << seed;
  }
}

TEST(Duplicates, InjectedCopiesAreRemoved) {
  const isa::Program clean = gen_keyswitch(desk_ks());
  isa::Program dirty = clean;
  const std::size_t k = inject_duplicates(dirty, 4, 25);
  EXPECT_EQ(k, 25u);
  EXPECT_EQ(dirty.code.size(), clean.code.size() + k);
  const auto base = compiler::pre(compiler::propagate(compiler::lower(clean)));
  const auto cleaned = compiler::pre(compiler::propagate(compiler::lower(dirty)));
  EXPECT_EQ(cleaned.code.size(), base.code.size());
}

}  // namespace
}  // namespace effact::workloads
