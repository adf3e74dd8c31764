// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "effact/compiler/analysis.hpp"
#include "effact/compiler/compile.hpp"
#include "effact/error.hpp"
#include "effact/he/ckks.hpp"
#include "effact/isa/executor.hpp"
#include "effact/isa/text.hpp"
#include "effact/sim/experiments.hpp"
#include "effact/sim/simulator.hpp"
#include "effact/workloads/generators.hpp"
#include "effact/workloads/random.hpp"

namespace {

using namespace effact;
using compiler::FuClass;
using compiler::HardwareDescription;
using isa::Opcode;

constexpr std::size_t kN = 1024;

isa::Program asm_program(const std::string& body) {
  return isa::parse_ir(".n 1024\n.modulus q0 12289\n.symbol in 8\n.symbol out 8\n" + body);
}

HardwareDescription small_hw() {
  HardwareDescription hw;
  hw.slots = 16;
  return hw;
}

void expect_sane(const sim::SimReport& r, const HardwareDescription& hw) {
  EXPECT_GE(r.cycles, r.critical_path);
  EXPECT_GE(r.cycles, r.dram_bound);
  for (const auto& f : r.fu) {
    EXPECT_LE(f.busy, r.cycles * f.count) << compiler::to_string(f.unit);
    EXPECT_GE(f.utilization, 0.0);
    EXPECT_LE(f.utilization, 1.0);
  }
  EXPECT_LE(r.dram.utilization, 1.0);
  EXPECT_EQ(r.dram.total() % (r.n * 8), 0u);
  (void)hw;
}

TEST(Simulate, SingleNttTakesItsLatency) {
  const auto hw = small_hw();
  const auto r = sim::simulate(asm_program("s1 = ntt s0, q0\n"), hw);
  EXPECT_EQ(r.cycles, hw.op_timing(Opcode::NTT, kN).latency);
  EXPECT_EQ(r.unit(FuClass::Ntt).busy, hw.op_timing(Opcode::NTT, kN).ii);
}

TEST(Simulate, TwoIndependentNttsSerializeOnOneUnit) {
  const auto hw = small_hw();
  const auto t = hw.op_timing(Opcode::NTT, kN);
  const auto r = sim::simulate(asm_program("s1 = ntt s0, q0\ns3 = ntt s2, q0\n"), hw);
  EXPECT_EQ(r.cycles, 2 * t.ii + (t.latency - t.ii));
  auto hw2 = hw;
  hw2.fu_ntt = 2;
  EXPECT_EQ(sim::simulate(asm_program("s1 = ntt s0, q0\ns3 = ntt s2, q0\n"), hw2).cycles,
            t.latency);
}

TEST(Simulate, DramBytesCountResidues) {
  const auto r = sim::simulate(asm_program("s0 = load @in[0], q0\n"
                                           "s1 = load @in[1], q0\n"
                                           "s2 = load @in[2], q0\n"
                                           "store @out[0], s0, q0\n"
                                           "store @out[1], s2, q0\n"),
                               small_hw());
  EXPECT_EQ(r.dram.load_bytes, 3 * kN * 8);
  EXPECT_EQ(r.dram.store_bytes, 2 * kN * 8);
  EXPECT_EQ(r.dram.stream_bytes, 0u);
  EXPECT_EQ(r.dram.busy_cycles, 5 * small_hw().dram_cycles(kN));
  expect_sane(r, small_hw());
}

TEST(Simulate, StreamedOperandCountsAsStreamTraffic) {
  const auto r = sim::simulate(asm_program("f0 = ntt @in[0], q0\n@out[0] = intt f0, q0\n"),
                               small_hw());
  EXPECT_EQ(r.dram.stream_bytes, 2 * kN * 8);
  EXPECT_EQ(r.peak_fifo, 1u);
  expect_sane(r, small_hw());
}

TEST(Simulate, FifoConsumerStartsBeforeProducerEnds) {
  auto hw = small_hw();
  hw.fu_ntt = 2;
  sim::SimOptions opt;
  opt.trace = true;
  const auto r = sim::simulate(asm_program("f0 = ntt s0, q0\ns1 = intt f0, q0\n"), hw, opt);
  ASSERT_EQ(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[1].issue, hw.pipeline_depth);
  EXPECT_LT(r.trace[1].issue, r.trace[0].complete);
  EXPECT_GT(r.trace[1].complete, r.trace[0].complete);
  const auto reg = sim::simulate(asm_program("s2 = ntt s0, q0\ns1 = intt s2, q0\n"), hw);
  EXPECT_LT(r.cycles, reg.cycles);
}

TEST(Simulate, MacUsesIdleNttUnit) {
  auto hw = small_hw();
  hw.fu_mmul = 1;
  const std::string body = "s3 = mac s0, s1, 5:SM, q0\ns4 = mac s2, s5, 6:SM, q0\n";
  const auto r = sim::simulate(asm_program(body), hw);
  EXPECT_EQ(r.macs_on_ntt, 1u);
  EXPECT_EQ(r.unit(FuClass::Mmul).busy, r.unit(FuClass::Ntt).busy);
  EXPECT_EQ(r.cycles, hw.op_timing(Opcode::MAC, kN).latency);
}

TEST(Simulate, SameBankReadsConflict) {
  auto hw = small_hw();
  hw.banks = 8;
  const auto hit = sim::simulate(asm_program("s2 = mmad s0, s8, q0\n"), hw);
  EXPECT_EQ(hit.bank_conflicts, 1u);
  EXPECT_EQ(hit.cycles, hw.op_timing(Opcode::MMAD, kN).latency + 1);
  const auto miss = sim::simulate(asm_program("s2 = mmad s0, s1, q0\n"), hw);
  EXPECT_EQ(miss.bank_conflicts, 0u);
}

TEST(Simulate, RejectsResourcesBeyondHardware) {
  auto hw = small_hw();
  EXPECT_THROW(sim::simulate(asm_program("s1 = ntt s16, q0\n"), hw), SimError);
  hw.fifo_depth = 2;
  EXPECT_THROW(sim::simulate(asm_program("f2 = ntt s0, q0\ns1 = intt f2, q0\n"), hw),
               SimError);
  hw.slots = 1;
  EXPECT_THROW(sim::simulate(asm_program("s1 = ntt s0, q0\n"), hw), SimError);
}

TEST(Simulate, ExpandsScalarLoops) {
  const auto p = asm_program(
      "r0 = set 0\n"
      "top:\n"
      "s0 = load @in[r0], q0\n"
      "s1 = ntt s0, q0\n"
      "store @out[r0*-1+3], s1, q0\n"
      "r0 = sadd r0, 1\n"
      "blt r0, 4, top\n");
  const auto t = sim::expand_trace(p);
  ASSERT_EQ(t.code.size(), 12u);
  EXPECT_EQ(t.code[9].src[0].addr.offset, 3);
  EXPECT_EQ(t.code[11].dst[0].addr.offset, 0);
  const auto r = sim::simulate(p, small_hw());
  EXPECT_EQ(r.instructions, 12u);
  EXPECT_EQ(r.dram.load_bytes, 4 * kN * 8);
  expect_sane(r, small_hw());
  EXPECT_THROW(sim::expand_trace(asm_program("top:\njmp top\n"), 100), SimError);
}

TEST(Simulate, BoundsConservationAndDeterminism) {
  workloads::WorkloadParams w;
  const auto ir = workloads::gen_keyswitch(w);
  for (std::size_t slots : {12, 24, 64}) {
    auto hw = small_hw();
    hw.slots = slots;
    const auto m = compiler::compile(ir, hw);
    const auto first = sim::simulate(m, hw);
    expect_sane(first, hw);
    EXPECT_EQ(first.critical_path, compiler::critical_path_length(m, hw));
    const auto json = sim::to_json(first);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(sim::to_json(sim::simulate(m, hw)), json);
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto hw = small_hw();
    hw.slots = 8;
    hw.fifo_depth = 2;
    const auto c = workloads::gen_random_program(seed);
    const auto r = sim::simulate(compiler::compile(c.program, hw), hw);
    expect_sane(r, hw);
  }
}

TEST(Simulate, WindowOfOneIssuesInOrder) {
  auto hw = small_hw();
  hw.window = 1;
  sim::SimOptions opt;
  opt.trace = true;
  const auto r = sim::simulate(asm_program("s1 = ntt s0, q0\ns2 = mmad s1, s0, q0\n"
                                           "s3 = mmul s0, 7:SM, q0\n"),
                               hw, opt);
  EXPECT_LE(r.trace[1].issue, r.trace[2].issue);
  hw.window = 8;
  const auto ooo = sim::simulate(asm_program("s1 = ntt s0, q0\ns2 = mmad s1, s0, q0\n"
                                             "s3 = mmul s0, 7:SM, q0\n"),
                                 hw, opt);
  EXPECT_LT(ooo.trace[2].issue, ooo.trace[1].issue);
}

TEST(Reports, JsonTextAndTrace) {
  sim::SimOptions opt;
  opt.trace = true;
  const auto r = sim::simulate(asm_program("s0 = load @in[0], q0\ns1 = ntt s0, q0\n"),
                               small_hw(), opt);
  const auto json = sim::to_json(r);
  for (const char* key : {"\"cycles\"", "\"fu\"", "\"dram\"", "\"bank_conflicts\"",
                          "\"peak_fifo\"", "\"trace\""}) {
    EXPECT_NE(json.find(key), std::string::npos) << key;
  }
  EXPECT_NE(sim::to_text(r).find("cycles"), std::string::npos);
  const auto csv = sim::trace_csv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("0,load,dram,0,"), std::string::npos);
}

TEST(Sweep, RuntimeAndUtilizationShape) {
  workloads::WorkloadParams w;
  const auto ir = workloads::gen_keyswitch(w);
  const auto pts = sim::sweep_sram(ir, small_hw(), {8, 16, 32, 64, 128});
  ASSERT_EQ(pts.size(), 5u);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    EXPECT_LE(pts[i].report.cycles, pts[i - 1].report.cycles) << pts[i].slots;
    EXPECT_GE(pts[i].report.fu_utilization, pts[i - 1].report.fu_utilization) << pts[i].slots;
  }
  EXPECT_GT(pts.front().compile.alloc.spill_loads, 0u);
  const auto csv = sim::sweep_csv(pts);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_EQ(sim::sweep_sram(ir, small_hw(), {32}).size(), 1u);
  EXPECT_THROW(sim::sweep_sram(ir, small_hw(), {1}), CompileError);
}

TEST(Streaming, KeySwitchSavesTrafficAndTime) {
  workloads::WorkloadParams w;
  w.n = 256;
  const auto ir = workloads::gen_keyswitch(w);
  compiler::CompileOptions off;
  off.streaming = false;
  compiler::CompileReport rep;
  compiler::compile(ir, small_hw(), off, &rep);
  auto hw = small_hw();
  hw.slots = rep.max_live / 2;

  he::CkksParams cp;
  cp.n = w.n;
  cp.L = w.L;
  cp.dnum = w.dnum;
  cp.q0_bits = w.q0_bits;
  cp.q_bits = w.q_bits;
  cp.p_bits = w.p_bits;
  const he::Context ctx(cp);
  const std::vector<std::int64_t> none;
  const he::KeySet keys = he::keygen_small(ctx, none, 4);
  std::mt19937_64 rng(4);
  std::vector<he::Complex> v(8, he::Complex(0.25, -0.5));
  const auto ct =
      he::encrypt(ctx, keys.secret, he::encode(ctx, v, w.l, ctx.params().scale), rng);
  const auto img = workloads::keyswitch_image(ctx, ct.c1, keys.relin);

  const auto c = sim::compare_streaming(ir, hw, {}, &img);
  EXPECT_LT(c.on.dram.total(), c.off.dram.total());
  EXPECT_LT(c.on.cycles, c.off.cycles);
  EXPECT_GT(c.dram_reduction(), 0.0);
  ASSERT_TRUE(c.outputs_identical.has_value());
  EXPECT_TRUE(*c.outputs_identical);
  EXPECT_NE(sim::to_json(c).find("dram_reduction"), std::string::npos);
}

TEST(Streaming, NoCandidatesGivesIdenticalReports) {
  const auto ir = asm_program(
      "%a = load @in[0], q0\n"
      "%b = ntt %a, q0\n"
      "%c = mmul %a, %b, q0\n"
      "store @out[0], %c, q0\n"
      "store @out[1], %c, q0\n"
      "store @out[2], %b, q0\n");
  const auto c = sim::compare_streaming(ir, small_hw());
  EXPECT_EQ(sim::to_json(c.on), sim::to_json(c.off));
  EXPECT_EQ(c.dram_reduction(), 0.0);
}

}  // namespace
