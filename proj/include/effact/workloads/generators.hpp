// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "effact/isa/program.hpp"
#include "effact/workloads/params.hpp"

namespace effact::workloads {

/// Key switching of one polynomial at level l.
///   in:  d2[j]                       j = 0..l
///   key: kb/ka[d*(L+1+K) + m]       m over q_0..q_L, p_0..p_{K-1}
///   out: k0[j], k1[j]
/// Key limbs are loaded explicitly.
isa::Program gen_keyswitch(const WorkloadParams& prm);

/// Rotations of one ciphertext sharing a single decomposition.
///   in:  ct[0..l] = c0, ct[l+1..2l+1] = c1
///   key: rkb/rka, key id i for steps[i], same layout as gen_keyswitch
///   out: out[i*2(l+1) ...] per step, c0 then c1
isa::Program gen_hoisted_rotations(const WorkloadParams& prm,
                                   const std::vector<std::int64_t>& steps);

/// One gradient-descent iteration of encrypted logistic regression:
/// batched inner products with rotate-and-sum, a cubic sigmoid, a lazily
/// relinearized gradient accumulation and the weight update. Consumes four
/// levels; requires l >= 4. Switching keys and plaintext constants are read
/// as memory operands.
isa::Program gen_helr_iteration(const WorkloadParams& prm, std::size_t batches = 4,
                                std::size_t features = 16);

/// Count-faithful fully-packed bootstrapping skeleton: CtS and StC as
/// baby-step giant-step linear transforms (hoisted baby steps), EvalMod as
/// a chain of ciphertext multiplications, each phase spending its level
/// budget. Starts at level L. Keys and diagonals are memory operands.
isa::Program gen_bootstrap_skeleton(const WorkloadParams& prm);

/// Canonical IR text of a generated program.
std::string to_ir_text(const isa::Program& p);

}  // namespace effact::workloads
