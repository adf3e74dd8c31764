// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "effact/he/ckks.hpp"
#include "effact/isa/memory.hpp"
#include "effact/isa/program.hpp"

namespace effact::workloads {

struct RandomProgramOptions {
  std::size_t n = 16;
  std::size_t moduli = 4;
  unsigned bits = 30;
  std::size_t inputs = 8;
  std::size_t ops = 48;
};

struct RandomCase {
  isa::Program program;
  isa::MemoryImage image;
};

/// Type-correct random straight-line IR with its input image. Every value
/// tracks modulus, domain and representation so the program executes; the
/// generator mixes transforms, products, sums, automorphisms, base
/// conversion chains (INTT, to NM, BCONV, to SM, NTT), multiply-add pairs,
/// cross-modulus feeds, repeated loads and expressions, copies, stores and
/// reloads of stored data. Deterministic under `seed`.
RandomCase gen_random_program(std::uint64_t seed, const RandomProgramOptions& opt = {});

/// Image holding a random NTT-domain SM residue for every DRAM entry the
/// program reads before writing.
isa::MemoryImage random_inputs(const isa::Program& p, std::uint64_t seed);

/// Inserts `count` copies of pure register-defining instructions right after
/// their originals and points every other later use at the copy. Returns
/// the number inserted.
std::size_t inject_duplicates(isa::Program& p, std::uint64_t seed, std::size_t count);

/// Image for gen_keyswitch: d2 and the key digits placed per its layout.
isa::MemoryImage keyswitch_image(const he::Context& ctx, const kernels::RnsPoly& d2,
                                 const he::SwitchKey& key);
/// Image for gen_hoisted_rotations.
isa::MemoryImage hoisted_image(const he::Context& ctx, const he::Ciphertext& ct,
                               const std::vector<const he::SwitchKey*>& keys);

}  // namespace effact::workloads
