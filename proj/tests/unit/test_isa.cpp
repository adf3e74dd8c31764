// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "effact/error.hpp"
#include "effact/isa/assembler.hpp"
#include "effact/isa/executor.hpp"
#include "effact/isa/text.hpp"
#include "effact/kernels/automorphism.hpp"
#include "effact/kernels/bconv.hpp"
#include "effact/kernels/ntt.hpp"
#include "effact/kernels/vector_ops.hpp"

namespace effact::isa {
namespace {

using kernels::Domain;
using kernels::Order;
using kernels::ResiduePoly;

constexpr std::size_t kN = 16;

const std::vector<rns::Modulus>& moduli() {
  static const auto m = rns::make_modulus_chain(kN, 3, 30);
  return m;
}

std::string header() {
  std::string h = ".n 16\n";
  for (std::size_t i = 0; i < moduli().size(); ++i) {
    h += ".modulus q" + std::to_string(i) + " " + std::to_string(moduli()[i].q()) + "\n";
  }
  h += ".symbol in 4\n.symbol out 4\n";
  return h;
}

ResiduePoly random_poly(std::mt19937_64& rng, std::size_t m, Domain d = Domain::Coefficient,
                        MontForm r = MontForm::SM) {
  const auto& mod = moduli()[m];
  std::uniform_int_distribution<Word> dist(0, mod.q() - 1);
  std::vector<Word> c(kN);
  for (auto& x : c) x = dist(rng);
  return ResiduePoly(mod, std::move(c), d,
                     d == Domain::Ntt ? Order::BitReversed : Order::Natural, r);
}

MemoryImage image_with(const std::vector<ResiduePoly>& in) {
  MemoryImage img;
  for (std::size_t i = 0; i < in.size(); ++i) img.put("in", i, in[i]);
  return img;
}

ResiduePoly out_at(const MemoryImage& img, std::size_t i) {
  return img.get("out", i, 1)[0];
}

MemoryImage run(const std::string& body, const MemoryImage& img, ExecOptions opt = {}) {
  return execute_program(parse_ir(header() + body), img, opt);
}

TEST(Parse, SingleInstruction) {
  const auto p = parse_ir(header() + "%0 = load @in[0], q0\n%1 = mmul %0, %0, q0\n");
  ASSERT_EQ(p.code.size(), 2u);
  EXPECT_EQ(p.code[1].op, Opcode::MMUL);
  EXPECT_EQ(p.vreg_names[p.code[1].dst[0].index], "1");
  EXPECT_EQ(p.code[1].src[0], p.code[1].src[1]);
}

TEST(Parse, EmptyFile) {
  const auto p = parse_ir("");
  EXPECT_TRUE(p.code.empty());
  EXPECT_TRUE(p.moduli.empty());
}

TEST(Parse, RedefinitionNamesLine) {
  try {
    parse_ir(header() + "%0 = load @in[0], q0\n%1 = ntt %0, q0\n%1 = ntt %0, q0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 9u);
    EXPECT_EQ(e.column(), 1u);
    EXPECT_NE(std::string(e.what()).find("redefinition of %1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 8"), std::string::npos);
  }
}

TEST(Parse, Diagnostics) {
  auto where = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_ir(text);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  // header() has 6 lines.
  EXPECT_EQ(where(header() + "%1 = ntt %0, q0\n"), std::make_pair(std::size_t{7}, std::size_t{10}));
  EXPECT_EQ(where(header() + "%0 = load @in[0], q9\n"), std::make_pair(std::size_t{7}, std::size_t{19}));
  EXPECT_EQ(where(header() + "%0 = frob @in[0], q0\n"), std::make_pair(std::size_t{7}, std::size_t{6}));
  EXPECT_EQ(where(header() + "%0 = load @nope[0], q0\n").first, 7u);
  EXPECT_EQ(where(header() + "%0 = load @in[0]\n").first, 7u);
  EXPECT_EQ(where(header() + "%0 = mmul @in[0], q0\n").first, 7u);
  EXPECT_EQ(where(".modulus q1 17\n").first, 1u);
  EXPECT_EQ(where(header() + "loop i = 0, 2 {\n%0 = load @in[i], q0\n").first, 7u);
}

TEST(Parse, LoopsUnrollWithRenaming) {
  const auto p = parse_ir(header() +
                          "loop i = 0, 3 {\n"
                          "  %x = load @in[i], q[i]\n"
                          "  %y = ntt %x, q[i]\n"
                          "  store @out[2*i-i], %y, q[i]\n"
                          "}\n");
  ASSERT_EQ(p.code.size(), 9u);
  EXPECT_EQ(p.vreg_names[p.code[3].dst[0].index], "x.1");
  EXPECT_EQ(p.code[3].modulus, 1u);
  EXPECT_EQ(p.code[8].dst[0].addr.offset, 2);
  EXPECT_EQ(p.code[4].src[0], p.code[3].dst[0]);
}

TEST(Parse, PrintRoundTrip) {
  const std::string text = header() +
                           "%a = load @in[0], q0\n"
                           "%b = load @in[1], q1\n"
                           "%c = intt %a, q0 !defer\n"
                           "%d = mmul %c, 12:NM, q0 !absorb !bc1\n"
                           "%e, %f = bconv %a, %b, q0, q1 -> q2, q1\n"
                           "%g = mac %f, %b, 5:DM, q1\n"
                           "%h = mmad %g, %b, q1 !sub\n"
                           "%i = auto %h, -3, q1\n"
                           "s3 = copy %i, q1\n"
                           "@out[r2*2+1] = ntt s3, q1\n"
                           "r1 = set 4\n"
                           "top:\n"
                           "r1 = sadd r1, -1\n"
                           "blt r1, 0, top\n"
                           "store @out[0], f1, q0\n";
  const auto p = parse_ir(text);
  const auto printed = print(p);
  const auto q = parse_ir(printed);
  EXPECT_EQ(q, p);
  EXPECT_EQ(print(q), printed);
}

TEST(Executor, IdentityMultiply) {
  std::mt19937_64 rng(1);
  const auto x = random_poly(rng, 0);
  const auto img = run("%a = load @in[0], q0\n%b = mmul %a, 1:SM, q0\nstore @out[0], %b, q0\n",
                       image_with({x}));
  EXPECT_EQ(out_at(img, 0), x);
}

TEST(Executor, EmptyProgramLeavesImage) {
  std::mt19937_64 rng(2);
  const auto img = image_with({random_poly(rng, 0), random_poly(rng, 1)});
  EXPECT_TRUE(execute_program(Program{}, img).dram_equal(img));
  EXPECT_TRUE(run("", img).dram_equal(img));
}

TEST(Executor, MatchesKernelsPerOpcode) {
  std::mt19937_64 rng(3);
  const auto a = random_poly(rng, 1), b = random_poly(rng, 1);
  const auto an = random_poly(rng, 1, Domain::Ntt);
  const auto img = image_with({a, b, an});
  auto single = [&](const std::string& body) {
    return out_at(run("%a = load @in[0], q1\n%b = load @in[1], q1\n"
                      "%n = load @in[2], q1\n" + body + "\nstore @out[0], %r, q1\n",
                      img),
                  0);
  };
  const auto& m = moduli()[1];
  EXPECT_EQ(single("%r = mmul %a, %b, q1"), kernels::vec_mmul(a, b));
  EXPECT_EQ(single("%r = mmul %a, 7:DM, q1"),
            kernels::vec_mmul(a, m.dm_encode(7), MontForm::DM));
  EXPECT_EQ(single("%r = mmad %a, %b, q1"), kernels::vec_madd(a, b));
  EXPECT_EQ(single("%r = mmad %a, %b, q1 !sub"), kernels::vec_msub(a, b));
  EXPECT_EQ(single("%r = mmad %a, 9:SM, q1"), kernels::vec_madd(a, m.sm_encode(9)));
  EXPECT_EQ(single("%r = mac %a, %b, %a, q1"), kernels::mac_fused(a, b, a));
  EXPECT_EQ(single("%r = ntt %a, q1"), kernels::ntt_fwd(a));
  EXPECT_EQ(single("%r = intt %n, q1"), kernels::ntt_inv(an));
  EXPECT_EQ(single("%r = auto %a, 3, q1"), kernels::automorphism_apply(a, 3));
  EXPECT_EQ(single("%r = auto %n, -1, q1"), kernels::automorphism_ntt(an, -1));
  EXPECT_EQ(single("%r = copy %b, q1"), b);
  auto deferred = kernels::ntt_inv(an, true);
  deferred.scale_deferred = false;
  EXPECT_EQ(single("%t = intt %n, q1 !defer\n%r = mmul %t, 11:NM, q1 !absorb"),
            kernels::vec_mmul(deferred, 11, MontForm::NM));
}

TEST(Executor, BconvMatchesKernel) {
  std::mt19937_64 rng(4);
  const auto x0 = random_poly(rng, 0, Domain::Coefficient, MontForm::NM);
  const auto x1 = random_poly(rng, 1, Domain::Coefficient, MontForm::NM);
  const auto img =
      run("%a = load @in[0], q0\n%b = load @in[1], q1\n%c = bconv %a, %b, q0, q1 -> q2\n"
          "store @out[0], %c, q2\n",
          image_with({x0, x1}));
  const kernels::RnsPoly src(rns::RnsBasis({moduli()[0], moduli()[1]}), {x0, x1});
  const auto want = kernels::bconv(src, rns::RnsBasis({moduli()[2]}));
  EXPECT_EQ(out_at(img, 0), want[0]);
}

TEST(Executor, CrossModulusMultiplyFeedsWords) {
  std::mt19937_64 rng(5);
  const auto x = random_poly(rng, 2, Domain::Coefficient, MontForm::NM);
  const auto img = run("%a = load @in[0], q2\n%b = mmul %a, 3:SM, q0\nstore @out[0], %b, q0\n",
                       image_with({x}));
  const auto& m = moduli()[0];
  const auto r = out_at(img, 0);
  for (std::size_t i = 0; i < kN; ++i) {
    EXPECT_EQ(r.coeffs[i], m.mul(x.coeffs[i], m.sm_encode(3)));
  }
  EXPECT_EQ(r.q(), m.q());
}

TEST(Executor, Errors) {
  std::mt19937_64 rng(6);
  const auto img = image_with({random_poly(rng, 0), random_poly(rng, 1)});
  auto msg = [&](const std::string& body, ExecOptions opt = {}) -> std::string {
    try {
      run(body, img, opt);
    } catch (const ExecError& e) {
      return e.what();
    }
    return "";
  };
  ExecOptions four;
  four.slots = 4;
  EXPECT_NE(msg("s4 = load @in[0], q0\n", four).find("out of range"), std::string::npos);
  EXPECT_EQ(msg("s3 = load @in[0], q0\n", four), "");
  EXPECT_NE(msg("%a = load @in[0], q1\n").find("modulus mismatch"), std::string::npos);
  EXPECT_NE(msg("%a = load @in[0], q0\n%b = load @in[1], q1\n%c = mmad %a, %b, q0\n")
                .find("modulus mismatch"),
            std::string::npos);
  EXPECT_NE(msg("%a = load @in[0], q0\n%b = ntt %a, q0\n%c = intt %b, q0 !defer\n"
                "%d = mmad %c, %c, q0\n")
                .find("scale-deferred"),
            std::string::npos);
  EXPECT_NE(msg("%a = load @in[0], q0\n%b = ntt %a, q0\n%c = intt %b, q0 !defer\n"
                "%d = mmul %c, 3:NM, q0\n")
                .find("scale-deferred"),
            std::string::npos);
  EXPECT_NE(msg("%a = load @in[3], q0\n").find("empty"), std::string::npos);
  EXPECT_NE(msg("%a = load @in[9], q0\n").find("out of range"), std::string::npos);
}

TEST(Executor, ScalarLoopEqualsUnrolled) {
  std::mt19937_64 rng(7);
  const auto img = image_with({random_poly(rng, 0), random_poly(rng, 0), random_poly(rng, 0),
                               random_poly(rng, 0)});
  const auto looped = run(
      "r0 = set 0\n"
      "top:\n"
      "s0 = load @in[r0], q0\n"
      "s1 = ntt s0, q0\n"
      "store @out[r0*-1+3], s1, q0\n"
      "r0 = sadd r0, 1\n"
      "blt r0, 4, top\n",
      img);
  const auto unrolled = run(
      "loop i = 0, 4 {\n"
      "  %x = load @in[i], q0\n"
      "  %y = ntt %x, q0\n"
      "  store @out[3-i], %y, q0\n"
      "}\n",
      img);
  EXPECT_TRUE(looped.dram_equal(unrolled));
  EXPECT_EQ(out_at(looped, 3), kernels::ntt_fwd(img.get("in", 0, 1)[0]));
}

TEST(Executor, StreamingOperandsAndFifo) {
  std::mt19937_64 rng(8);
  const auto x = random_poly(rng, 0);
  const auto img = image_with({x});
  const auto a = run("f0 = ntt @in[0], q0\n@out[0] = intt f0, q0\n", img);
  EXPECT_EQ(out_at(a, 0), x);
  EXPECT_TRUE(a.fifo.empty());
}

TEST(Assembler, BinaryRoundTrip) {
  const auto p = parse_ir(header() +
                          ".group 0 q0, q1 -> q2\n"
                          "s0 = load @in[0], q0\n"
                          "s1 = intt s0, q0 !defer\n"
                          "s2 = mmul s1, 123456789:NM, q0 !absorb !bc1 !g0\n"
                          "f0 = mmul s2, 77:DM, q2 !bc2 !g0\n"
                          "s3 = mac s2, f0, 77:DM, q2\n"
                          "s4 = auto s3, -5, q2\n"
                          "@out[r1*3-2] = mmad s4, s3, q2 !sub\n"
                          "r1 = set 2\n"
                          "L:\n"
                          "r1 = smul r1, r1\n"
                          "bge r1, 100, L\n"
                          "jmp L\n");
  const auto bytes = assemble(p);
  const auto q = disassemble(bytes);
  EXPECT_EQ(print(q), print(p));
  EXPECT_EQ(q.code.size(), p.code.size());
  EXPECT_EQ(assemble(q), bytes);
  auto bad = bytes;
  bad[0] ^= 0xff;
  EXPECT_THROW(disassemble(bad), ParseError);
  bad = bytes;
  bad.resize(bad.size() - 3);
  EXPECT_THROW(disassemble(bad), ParseError);
}

TEST(Assembler, RejectsVirtualRegisters) {
  const auto p = parse_ir(header() + "%a = load @in[0], q0\n");
  EXPECT_THROW(assemble(p), StructuralError);
  EXPECT_THROW(assemble_text(p), StructuralError);
}

TEST(MemoryImageIo, RoundTrip) {
  std::mt19937_64 rng(9);
  auto img = image_with({random_poly(rng, 0), random_poly(rng, 1, Domain::Ntt)});
  img.region("in")[1]->scale_deferred = true;
  img.region("gap").resize(3);
  img.put("gap", 2, random_poly(rng, 2, Domain::Coefficient, MontForm::DM));
  const auto bytes = write_memory_image(img);
  const auto back = read_memory_image(bytes);
  EXPECT_TRUE(back.dram_equal(img));
  EXPECT_EQ(write_memory_image(back), bytes);
  EXPECT_THROW(read_memory_image(std::span(bytes).first(bytes.size() - 1)), ParseError);
}

}  // namespace
}  // namespace effact::isa
