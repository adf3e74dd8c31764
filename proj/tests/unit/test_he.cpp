// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "effact/he/ckks.hpp"
#include "effact/kernels/rns_ops.hpp"

namespace effact::he {
namespace {

CkksParams desk(std::size_t n = 1024, std::size_t L = 4, std::size_t dnum = 2) {
  CkksParams p;
  p.n = n;
  p.L = L;
  p.dnum = dnum;
  return p;
}

std::vector<Complex> random_slots(std::mt19937_64& rng, std::size_t count) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> v(count);
  for (auto& x : v) x = Complex(u(rng), u(rng));
  return v;
}

// max_j |got_j - want_j| / max(1, max_j |want_j|)
double rel_error(const std::vector<Complex>& got, const std::vector<Complex>& want) {
  double err = 0, mag = 1;
  for (std::size_t j = 0; j < want.size(); ++j) {
    err = std::max(err, std::abs(got[j] - want[j]));
    mag = std::max(mag, std::abs(want[j]));
  }
  return err / mag;
}

std::vector<Complex> decrypt_slots(const Context& ctx, const KeySet& ks,
                                   const Ciphertext& ct, std::size_t count) {
  auto z = decode(ctx, decrypt(ctx, ks.secret, ct));
  z.resize(count);
  return z;
}

class CkksTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ctx_ = new Context(desk());
    const std::vector<std::int64_t> steps{0, 1, 2, 3, 5};
    keys_ = new KeySet(keygen_small(*ctx_, steps, 42));
  }
  static void TearDownTestSuite() {
    delete keys_;
    delete ctx_;
  }
  Ciphertext enc(const std::vector<Complex>& v, std::mt19937_64& rng,
                 std::size_t level = 4) {
    return encrypt(*ctx_, keys_->secret,
                   encode(*ctx_, v, level, ctx_->params().scale), rng);
  }
  static Context* ctx_;
  static KeySet* keys_;
};

Context* CkksTest::ctx_ = nullptr;
KeySet* CkksTest::keys_ = nullptr;

TEST(CkksParams, RejectsUnsupported) {
  EXPECT_THROW(Context(desk(8192)), InvalidArgument);
  EXPECT_THROW(Context(desk(1024, 9)), InvalidArgument);
  EXPECT_THROW(Context(desk(1024, 4, 3)), InvalidArgument);
}

TEST(CkksParams, DigitLayout) {
  const Context c(desk(64, 4, 4));
  EXPECT_EQ(c.digit_count(4), 4u);
  EXPECT_EQ(c.digit_range(0, 4), std::make_pair(std::size_t{0}, std::size_t{2}));
  EXPECT_EQ(c.digit_range(3, 4), std::make_pair(std::size_t{4}, std::size_t{5}));
  EXPECT_EQ(c.digit_count(1), 1u);
  EXPECT_EQ(c.special_count(), 2u);
  const Context c2(desk(64, 4, 2));
  EXPECT_EQ(c2.digit_count(4), 2u);
  EXPECT_EQ(c2.digit_range(1, 4), std::make_pair(std::size_t{3}, std::size_t{5}));
}

TEST(Keygen, DeterministicAndShaped) {
  const Context ctx(desk(256, 3, 2));
  const std::vector<std::int64_t> steps{1};
  const KeySet a = keygen_small(ctx, steps, 7), b = keygen_small(ctx, steps, 7);
  EXPECT_EQ(a.secret.coeffs, b.secret.coeffs);
  EXPECT_EQ(serialize(a.relin), serialize(b.relin));
  EXPECT_EQ(serialize(a.rot.at(1)), serialize(b.rot.at(1)));
  EXPECT_EQ(a.relin.dnum(), 2u);
  const KeySet c = keygen_small(ctx, steps, 8);
  EXPECT_NE(a.secret.coeffs, c.secret.coeffs);
  for (auto x : a.secret.coeffs) EXPECT_LE(std::abs(x), 1);
}

TEST_F(CkksTest, EncryptDecrypt) {
  std::mt19937_64 rng(1);
  const auto v = random_slots(rng, 512);
  EXPECT_LT(rel_error(decrypt_slots(*ctx_, *keys_, enc(v, rng), 512), v),
            std::ldexp(1.0, -20));
}

TEST_F(CkksTest, EncodeDecodeExact) {
  std::mt19937_64 rng(2);
  const auto v = random_slots(rng, 512);
  auto z = decode(*ctx_, encode(*ctx_, v, 2, ctx_->params().scale));
  EXPECT_LT(rel_error(z, v), std::ldexp(1.0, -30));
}

TEST_F(CkksTest, Hadd) {
  std::mt19937_64 rng(3);
  const auto v = random_slots(rng, 512);
  const auto ct = enc(v, rng);
  const auto zero = enc(std::vector<Complex>(512), rng);
  EXPECT_LT(rel_error(decrypt_slots(*ctx_, *keys_, hadd(ct, zero), 512), v),
            std::ldexp(1.0, -20));
  std::vector<Complex> twice(v);
  for (auto& x : twice) x *= 2.0;
  EXPECT_LT(rel_error(decrypt_slots(*ctx_, *keys_, hadd(ct, ct), 512), twice),
            std::ldexp(1.0, -20));
  const auto a = hadd(ct, zero), b = hadd(zero, ct);
  EXPECT_EQ(serialize(a), serialize(b));
  EXPECT_THROW(hadd(ct, enc(v, rng, 3)), InvalidArgument);
}

TEST_F(CkksTest, HmultSmallValues) {
  std::mt19937_64 rng(4);
  const std::vector<Complex> two(512, 2.0), three(512, 3.0), one(512, 1.0),
      zero(512, 0.0), six(512, 6.0);
  const auto p = hmult(*ctx_, enc(two, rng), enc(three, rng), keys_->relin);
  EXPECT_EQ(p.level, 3u);
  EXPECT_LT(rel_error(decrypt_slots(*ctx_, *keys_, p, 512), six), std::ldexp(1.0, -15));
  const auto v = random_slots(rng, 512);
  EXPECT_LT(rel_error(decrypt_slots(*ctx_, *keys_,
                                    hmult(*ctx_, enc(v, rng), enc(one, rng), keys_->relin),
                                    512),
                      v),
            std::ldexp(1.0, -15));
  EXPECT_LT(rel_error(decrypt_slots(*ctx_, *keys_,
                                    hmult(*ctx_, enc(v, rng), enc(zero, rng), keys_->relin),
                                    512),
                      zero),
            std::ldexp(1.0, -15));
  EXPECT_THROW(hmult(*ctx_, enc(v, rng, 0), enc(v, rng, 0), keys_->relin),
               InvalidArgument);
}

TEST_F(CkksTest, KeySwitchMatchesThreeComponentDecryption) {
  std::mt19937_64 rng(5);
  const auto a = enc(random_slots(rng, 512), rng), b = enc(random_slots(rng, 512), rng);
  const Tensor t = tensor(a, b);
  const double scale = a.scale * b.scale;
  auto [k0, k1] = key_switch(*ctx_, t.d2, keys_->relin);
  const Ciphertext ct{kernels::rns_add(t.d0, k0), kernels::rns_add(t.d1, k1), 4, scale};
  const auto got = decode(*ctx_, decrypt(*ctx_, keys_->secret, ct));
  const auto want =
      decode(*ctx_, decrypt3(*ctx_, keys_->secret, t.d0, t.d1, t.d2, 4, scale));
  EXPECT_LT(rel_error(got, want), std::ldexp(1.0, -15));

  auto [u0, u1] = key_switch_unmerged(*ctx_, t.d2, keys_->relin);
  EXPECT_EQ(k0, u0);
  EXPECT_EQ(k1, u1);
}

TEST_F(CkksTest, KeySwitchOfZeroIsZero) {
  const auto basis = ctx_->level_basis(4);
  const RnsPoly z = RnsPoly::zero(basis, kernels::Domain::Ntt,
                                  kernels::Order::BitReversed, rns::MontForm::SM);
  auto [k0, k1] = key_switch(*ctx_, z, keys_->relin);
  EXPECT_EQ(k0, z);
  EXPECT_EQ(k1, z);
}

TEST_F(CkksTest, KeySwitchAtLowerLevel) {
  std::mt19937_64 rng(6);
  const auto v = random_slots(rng, 512), w = random_slots(rng, 512);
  std::vector<Complex> prod(512);
  for (int j = 0; j < 512; ++j) prod[j] = v[j] * w[j];
  const auto p = hmult(*ctx_, enc(v, rng, 2), enc(w, rng, 2), keys_->relin);
  EXPECT_LT(rel_error(decrypt_slots(*ctx_, *keys_, p, 512), prod), std::ldexp(1.0, -15));
}

TEST_F(CkksTest, Rescale) {
  std::mt19937_64 rng(7);
  const auto v = random_slots(rng, 512), w = random_slots(rng, 512);
  std::vector<Complex> prod(512);
  for (int j = 0; j < 512; ++j) prod[j] = v[j] * w[j];
  const auto a = enc(v, rng), b = enc(w, rng);
  const auto raw = hmult(*ctx_, a, b, keys_->relin, false);
  EXPECT_EQ(raw.level, 4u);
  EXPECT_EQ(raw.scale, a.scale * b.scale);
  const auto r = rescale(*ctx_, raw);
  EXPECT_EQ(r.level, 3u);
  EXPECT_EQ(r.c0.size(), raw.c0.size() - 1);
  EXPECT_EQ(r.scale, raw.scale / static_cast<double>(ctx_->q_basis()[4].q()));
  EXPECT_LT(rel_error(decrypt_slots(*ctx_, *keys_, r, 512), prod), std::ldexp(1.0, -15));
  const auto fused = hmult(*ctx_, a, b, keys_->relin);
  EXPECT_EQ(fused.c0, r.c0);
  EXPECT_EQ(fused.c1, r.c1);
  EXPECT_THROW(rescale(*ctx_, enc(v, rng, 0)), InvalidArgument);
}

TEST_F(CkksTest, Rotation) {
  std::mt19937_64 rng(8);
  const auto v = random_slots(rng, 512);
  const auto ct = enc(v, rng);
  for (std::int64_t s : {1, 3, 5}) {
    EXPECT_LT(rel_error(decrypt_slots(*ctx_, *keys_, hrot(*ctx_, ct, s, *keys_), 512),
                        rotate_slots(v, s)),
              std::ldexp(1.0, -15))
        << "step " << s;
  }
  EXPECT_LT(rel_error(decrypt_slots(*ctx_, *keys_, hrot(*ctx_, ct, 0, *keys_), 512), v),
            std::ldexp(1.0, -15));
  const auto twice = hrot(*ctx_, hrot(*ctx_, ct, 1, *keys_), 2, *keys_);
  EXPECT_LT(rel_error(decrypt_slots(*ctx_, *keys_, twice, 512),
                      decrypt_slots(*ctx_, *keys_, hrot(*ctx_, ct, 3, *keys_), 512)),
            std::ldexp(1.0, -15));
  EXPECT_THROW(hrot(*ctx_, ct, 7, *keys_), InvalidArgument);
}

TEST_F(CkksTest, HoistedRotation) {
  std::mt19937_64 rng(9);
  const auto v = random_slots(rng, 512);
  const auto ct = enc(v, rng);
  const std::vector<std::int64_t> steps{1, 2, 3};
  const auto out = hrot_hoisted(*ctx_, ct, steps, *keys_);
  ASSERT_EQ(out.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_LT(rel_error(decrypt_slots(*ctx_, *keys_, out[k], 512),
                        rotate_slots(v, steps[k])),
              std::ldexp(1.0, -15));
  }
}

TEST_F(CkksTest, HomomorphismOverRandomPairs) {
  std::mt19937_64 rng(10);
  double worst_mul = 0, worst_add = 0;
  for (int it = 0; it < 100; ++it) {
    const auto v = random_slots(rng, 512), w = random_slots(rng, 512);
    std::vector<Complex> prod(512), sum(512);
    for (int j = 0; j < 512; ++j) {
      prod[j] = v[j] * w[j];
      sum[j] = v[j] + w[j];
    }
    const auto a = enc(v, rng), b = enc(w, rng);
    worst_mul = std::max(worst_mul, rel_error(decrypt_slots(*ctx_, *keys_,
                                              hmult(*ctx_, a, b, keys_->relin), 512),
                                              prod));
    worst_add = std::max(worst_add,
                         rel_error(decrypt_slots(*ctx_, *keys_, hadd(a, b), 512), sum));
  }
  EXPECT_LT(worst_mul, std::ldexp(1.0, -15));
  EXPECT_LT(worst_add, std::ldexp(1.0, -15));
}

TEST_F(CkksTest, ScaleBookkeeping) {
  std::mt19937_64 rng(11);
  const auto v = random_slots(rng, 4);
  const auto a = enc(v, rng), b = enc(v, rng);
  const auto p = hmult(*ctx_, a, b, keys_->relin);
  EXPECT_EQ(p.scale, a.scale * b.scale / static_cast<double>(ctx_->q_basis()[4].q()));
}

TEST_F(CkksTest, SerializationRoundTrip) {
  std::mt19937_64 rng(12);
  const auto ct = enc(random_slots(rng, 16), rng, 3);
  const auto bytes = serialize(ct);
  EXPECT_EQ(bytes.size(), 32u + 2 * 4 * 1024 * 8);
  const auto back = deserialize_ciphertext(*ctx_, bytes);
  EXPECT_EQ(back.c0, ct.c0);
  EXPECT_EQ(back.c1, ct.c1);
  EXPECT_EQ(back.level, 3u);
  EXPECT_EQ(back.scale, ct.scale);
  auto bad = bytes;
  bad[0] ^= 1;
  EXPECT_THROW(deserialize_ciphertext(*ctx_, bad), ParseError);
  bad = bytes;
  bad.pop_back();
  EXPECT_THROW(deserialize_ciphertext(*ctx_, bad), ParseError);
  const auto kb = serialize(keys_->relin);
  const auto key = deserialize_switch_key(*ctx_, kb);
  EXPECT_EQ(serialize(key), kb);
}

}  // namespace
}  // namespace effact::he
