// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "effact/compiler/compile.hpp"
#include "effact/error.hpp"
#include "effact/isa/executor.hpp"
#include "effact/isa/text.hpp"
#include "effact/workloads/generators.hpp"
#include "effact/workloads/random.hpp"

namespace effact::compiler {
namespace {

using isa::Opcode;
using isa::OperandKind;
using kernels::Domain;
using kernels::Order;
using kernels::ResiduePoly;
using rns::MontForm;
using rns::Word;

constexpr std::size_t kN = 16;

const std::vector<rns::Modulus>& moduli() {
  static const auto m = rns::make_modulus_chain(kN, 4, 30);
  return m;
}

std::string header() {
  std::string h = ".n 16\n";
  for (std::size_t i = 0; i < moduli().size(); ++i) {
    h += ".modulus q" + std::to_string(i) + " " + std::to_string(moduli()[i].q()) + "\n";
  }
  return h + ".symbol in 8\n.symbol out 8\n";
}

ResiduePoly random_poly(std::mt19937_64& rng, std::size_t m, Domain d, MontForm r) {
  const auto& mod = moduli()[m];
  std::uniform_int_distribution<Word> dist(0, mod.q() - 1);
  std::vector<Word> c(kN);
  for (auto& x : c) x = dist(rng);
  return ResiduePoly(mod, std::move(c), d, d == Domain::Ntt ? Order::BitReversed : Order::Natural,
                     r);
}

std::size_t count_op(const isa::Program& p, Opcode op) {
  std::size_t c = 0;
  for (const auto& in : p.code) c += in.op == op;
  return c;
}

workloads::WorkloadParams ks_params() {
  workloads::WorkloadParams w;
  w.n = 256;
  w.L = 4;
  w.l = 4;
  w.dnum = 2;
  return w;
}

// Keyswitch program and an image of random NTT/SM inputs.
struct KsCase {
  isa::Program ir = workloads::gen_keyswitch(ks_params());
  isa::MemoryImage img = workloads::random_inputs(ir, 17);
  isa::MemoryImage ref = isa::execute_program(ir, img);
};

TEST(Lower, ConversionCounts) {
  const auto ir = isa::parse_ir(header() +
                                "%a = load @in[0], q0\n%b = load @in[1], q1\n"
                                "%c = bconv %a, %b, q0, q1 -> q2\n"
                                "store @out[0], %c, q2\n");
  const auto p = lower(ir);
  EXPECT_EQ(count_op(p, Opcode::BCONV), 0u);
  EXPECT_EQ(count_op(p, Opcode::MMUL), 4u);  // |C| + |C||B|
  EXPECT_EQ(count_op(p, Opcode::MMAD), 1u);  // (|C|-1)|B|
  std::size_t bc1 = 0, bc2 = 0;
  for (const auto& in : p.code) {
    bc1 += in.has(isa::flag::kBconv1);
    bc2 += in.has(isa::flag::kBconv2);
  }
  EXPECT_EQ(bc1, 2u);
  EXPECT_EQ(bc2, 3u);
  ASSERT_EQ(p.groups.size(), 1u);

  std::mt19937_64 rng(1);
  isa::MemoryImage img;
  img.put("in", 0, random_poly(rng, 0, Domain::Coefficient, MontForm::NM));
  img.put("in", 1, random_poly(rng, 1, Domain::Coefficient, MontForm::NM));
  EXPECT_TRUE(isa::execute_program(p, img).dram_equal(isa::execute_program(ir, img)));
}

TEST(Lower, RejectsControlFlow) {
  auto p = isa::parse_ir(header() + "%a = load @in[0], q0\n");
  isa::Instruction j;
  j.op = Opcode::JMP;
  j.src = {isa::Operand::label(0)};
  p.code.push_back(j);
  EXPECT_THROW(lower(p), CompileError);
}

TEST(Propagate, CopyChainsAndDeadCode) {
  const auto ir = isa::parse_ir(header() +
                                "%a = load @in[0], q0\n%b = copy %a, q0\n%c = copy %b, q0\n"
                                "%d = ntt %c, q0\n%e = intt %d, q0\n"
                                "store @out[0], %d, q0\n");
  const auto p = propagate(ir);
  EXPECT_EQ(count_op(p, Opcode::COPY), 0u);
  EXPECT_EQ(count_op(p, Opcode::INTT), 0u);  // unused
  EXPECT_EQ(p.code.size(), 3u);
  std::mt19937_64 rng(2);
  isa::MemoryImage img;
  img.put("in", 0, random_poly(rng, 0, Domain::Coefficient, MontForm::SM));
  EXPECT_TRUE(isa::execute_program(p, img).dram_equal(isa::execute_program(ir, img)));
}

TEST(Propagate, FoldsKnownScalars) {
  const auto ir = isa::parse_ir(header() +
                                "r0 = set 2\nr1 = sadd r0, 3\n"
                                "%a = load @in[r1], q0\nstore @out[r0], %a, q0\n");
  const auto p = propagate(ir);
  for (const auto& in : p.code) {
    for (const auto* ops : {&in.src, &in.dst}) {
      for (const auto& o : *ops) {
        if (o.kind == OperandKind::Mem) EXPECT_LT(o.addr.sreg, 0);
      }
    }
  }
  EXPECT_EQ(p.code.size(), 2u);
}

TEST(Pre, RemovesRepeatsButNotAcrossStores) {
  const auto ir = isa::parse_ir(header() +
                                "%a = load @in[0], q0\n%b = load @in[0], q0\n"
                                "%c = ntt %a, q0\n%d = ntt %b, q0\n"
                                "%e = mmul %c, %d, q0\n%f = mmul %d, %c, q0\n"
                                "%g = mmad %e, %f, q0\n"
                                "store @in[0], %g, q0\n%h = load @in[0], q0\n"
                                "store @out[0], %h, q0\n");
  const auto p = pre(ir);
  EXPECT_EQ(count_op(p, Opcode::LOAD), 2u);
  EXPECT_EQ(count_op(p, Opcode::NTT), 1u);
  EXPECT_EQ(count_op(p, Opcode::MMUL), 1u);
  std::mt19937_64 rng(3);
  isa::MemoryImage img;
  img.put("in", 0, random_poly(rng, 0, Domain::Coefficient, MontForm::SM));
  EXPECT_TRUE(isa::execute_program(p, img).dram_equal(isa::execute_program(ir, img)));
}

TEST(Peephole, CountAuditOnKeySwitch) {
  const KsCase c;
  const auto w = ks_params();
  const auto chain = workloads::make_chain(w);
  const std::size_t K = chain.alpha(), l = w.l;
  const auto base = pre(propagate(lower(c.ir)));
  PeepholeStats st;
  const auto p = peephole_merge(base, {}, &st);
  // Every conversion source has its INTT deferred and every converted limb
  // loses its to-SM multiply.
  std::size_t sources = 2 * K, outputs = 2 * (l + 1), macs = 0;
  for (std::size_t d = 0; d < workloads::digit_count(l, w.L + 1, w.dnum); ++d) {
    const auto [lo, hi] = workloads::digit_range(d, l, w.L + 1, w.dnum);
    sources += hi - lo;
    outputs += l + 1 - (hi - lo) + K;
  }
  EXPECT_EQ(st.deferred, sources);
  EXPECT_EQ(st.folded_outputs, outputs);
  EXPECT_GT(st.macs, 0u);
  for (const auto& in : p.code) macs += in.op == Opcode::MAC;
  EXPECT_EQ(macs, st.macs);
  EXPECT_EQ(p.code.size(), base.code.size() - sources - outputs - st.macs);
  EXPECT_TRUE(isa::execute_program(p, c.img).dram_equal(c.ref));
}

TEST(Peephole, OptionsAreIndependent) {
  const KsCase c;
  const auto base = pre(propagate(lower(c.ir)));
  for (bool fold : {false, true}) {
    for (bool fuse : {false, true}) {
      PeepholeStats st;
      const auto p = peephole_merge(base, {fold, fuse}, &st);
      EXPECT_EQ(st.deferred > 0, fold);
      EXPECT_EQ(st.macs > 0, fuse);
      EXPECT_TRUE(isa::execute_program(p, c.img).dram_equal(c.ref));
    }
  }
}

TEST(Schedule, IndependentNttsOverlap) {
  const auto ir = isa::parse_ir(header() +
                                "%a = load @in[0], q0\n%b = load @in[1], q1\n"
                                "%c = ntt %a, q0\n%d = ntt %b, q1\n"
                                "store @out[0], %c, q0\nstore @out[1], %d, q1\n");
  HardwareDescription hw;
  hw.lanes = 4;
  hw.fu_ntt = 2;
  const auto two = schedule(ir, hw);
  std::vector<std::uint64_t> ntt_issue;
  for (std::size_t i = 0; i < two.code.size(); ++i) {
    if (two.code[i].op == Opcode::NTT) ntt_issue.push_back(two.issue[i]);
  }
  ASSERT_EQ(ntt_issue.size(), 2u);
  const auto ntt_lat = latency(two.code[2], hw, kN);
  EXPECT_LT(std::max(ntt_issue[0], ntt_issue[1]) - std::min(ntt_issue[0], ntt_issue[1]), ntt_lat);
  hw.fu_ntt = 1;
  const auto one = schedule(ir, hw);
  EXPECT_GE(schedule_makespan(one, hw), schedule_makespan(two, hw));
  EXPECT_GE(schedule_makespan(two, hw), critical_path_length(ir, hw));
}

TEST(Schedule, RespectsDependences) {
  const KsCase c;
  HardwareDescription hw;
  const auto lowered = lower(c.ir);
  const auto s = schedule(lowered, hw);
  ASSERT_EQ(s.issue.size(), s.code.size());
  const auto g = dependences(s);
  for (std::size_t i = 0; i < s.code.size(); ++i) {
    for (const auto& d : g.preds[i]) {
      EXPECT_LT(d.from, i);
      EXPECT_LE(s.issue[d.from], s.issue[i]);
    }
  }
  EXPECT_GE(schedule_makespan(s, hw), critical_path_length(lowered, hw));
  EXPECT_TRUE(isa::execute_program(s, c.img).dram_equal(c.ref));
}

TEST(Alloc, SpillsUnderPressure) {
  const KsCase c;
  HardwareDescription hw;
  hw.slots = 6;
  AllocStats st;
  const auto p = alloc_sram(pre(propagate(lower(c.ir))), hw, &st);
  EXPECT_GT(st.spill_stores, 0u);
  EXPECT_GT(st.spill_loads, 0u);
  EXPECT_LE(st.slots_used, 6u);
  for (const auto& in : p.code) {
    for (const auto* ops : {&in.src, &in.dst}) {
      for (const auto& o : *ops) {
        EXPECT_NE(o.kind, OperandKind::VReg);
        if (o.kind == OperandKind::Slot) EXPECT_LT(o.index, 6u);
      }
    }
  }
  isa::ExecOptions opt;
  opt.slots = 6;
  EXPECT_TRUE(isa::execute_program(p, c.img, opt).dram_equal(c.ref));

  hw.slots = 1;
  EXPECT_THROW(alloc_sram(lower(c.ir), hw), CompileError);
}

TEST(Streaming, MergesLoadsStoresAndFifos) {
  const KsCase c;
  HardwareDescription hw;
  StreamStats st;
  const auto base = schedule(pre(propagate(lower(c.ir))), hw);
  const auto p = merge_streaming(base, hw, true, &st);
  EXPECT_GT(st.loads, 0u);
  EXPECT_GT(st.stores, 0u);
  EXPECT_GT(st.fifos, 0u);
  EXPECT_EQ(p.code.size(), base.code.size() - st.loads - st.stores);
  for (const auto& in : p.code) {
    std::size_t mem = 0;
    for (const auto& o : in.src) mem += o.kind == OperandKind::Mem;
    EXPECT_LE(mem, 1u);
  }
  EXPECT_TRUE(isa::execute_program(p, c.img).dram_equal(c.ref));
}

TEST(Hardware, ParseAndDiagnostics) {
  const auto hw = parse_hw("# small\nlanes = 16\nslots = 12\nfu.ntt = 2\nstreaming = off\n"
                           "timing.ntt = 7 20\n");
  EXPECT_EQ(hw.lanes, 16u);
  EXPECT_EQ(hw.slots, 12u);
  EXPECT_EQ(hw.fu_ntt, 2u);
  EXPECT_FALSE(hw.streaming);
  EXPECT_EQ(hw.op_timing(Opcode::NTT, 1024).ii, 7u);
  EXPECT_EQ(hw.op_timing(Opcode::NTT, 1024).latency, 20u);
  EXPECT_EQ(parse_hw(to_text(hw)).slots, 12u);
  try {
    parse_hw("lanes = 4\nslots = many\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_hw("frobs = 3\n"), ParseError);
  HardwareDescription bad;
  bad.slots = 1;
  EXPECT_THROW(bad.validate(), InvalidArgument);
}

TEST(Compile, StageTaggedErrors) {
  try {
    compile(std::string_view(header() + "%a = lod @in[0], q0\n"), HardwareDescription{});
    FAIL();
  } catch (const CompileError& e) {
    EXPECT_NE(std::string(e.what()).find("parse:"), std::string::npos);
  }
  HardwareDescription tiny;
  tiny.slots = 2;
  const auto ir = isa::parse_ir(header() +
                                "%a = load @in[0], q0\n%b = load @in[1], q0\n%c = load @in[2], q0\n"
                                "%d = mac %a, %b, %c, q0\nstore @out[0], %d, q0\n");
  CompileOptions opt;
  opt.streaming = false;
  try {
    compile(ir, tiny, opt);
    FAIL();
  } catch (const CompileError& e) {
    EXPECT_NE(std::string(e.what()).find("alloc"), std::string::npos);
  }
}

TEST(Compile, ReportAndMachineForm) {
  const KsCase c;
  CompileReport r;
  HardwareDescription hw;
  hw.slots = 16;
  const auto m = compile(c.ir, hw, {}, &r);
  EXPECT_EQ(m.form, isa::Form::Machine);
  EXPECT_TRUE(m.vreg_names.empty());
  EXPECT_GT(r.lowered, r.ir_instructions);
  EXPECT_LE(r.after_peephole, r.after_pre);
  EXPECT_GT(r.max_live, 0u);
  EXPECT_GT(r.schedule_makespan, 0u);
  EXPECT_EQ(r.final_instructions, m.code.size());
  isa::ExecOptions opt;
  opt.slots = hw.slots;
  EXPECT_TRUE(isa::execute_program(m, c.img, opt).dram_equal(c.ref));
}

// Every subset of the six optional passes on random programs.
TEST(Compile, PassToggleDifferential) {
  HardwareDescription hw;
  hw.slots = 8;
  hw.fifo_depth = 2;
  hw.window = 8;
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    const auto rc = workloads::gen_random_program(seed);
    const auto ref = isa::execute_program(rc.program, rc.image);
    for (unsigned mask = 0; mask < 64; ++mask) {
      CompileOptions opt;
      opt.propagate = mask & 1;
      opt.pre = mask & 2;
      opt.peephole = mask & 4;
      opt.schedule = mask & 8;
      opt.alloc = mask & 16;
      opt.streaming = mask & 32;
      const auto p = compile(rc.program, hw, opt);
      isa::ExecOptions eo;
      if (opt.alloc) eo.slots = hw.slots;
      ASSERT_TRUE(isa::execute_program(p, rc.image, eo).dram_equal(ref))
          << "seed " << seed << " mask " << mask;
    }
  }
}

}  // namespace
}  // namespace effact::compiler
