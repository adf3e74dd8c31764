// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "effact/isa/program.hpp"

namespace effact::workloads {

enum class MixCategory : std::uint8_t { Mult, Add, BcMult, BcAdd, Ntt, Auto, LoadStore, Others };
inline constexpr std::size_t kMixCategories = 8;
const char* to_string(MixCategory c);

/// Residue-polynomial instruction histogram. MULT and ADD exclude the
/// conversion-tagged micro-ops, which are counted as BC_MULT and BC_ADD.
struct InstructionMix {
  std::array<std::size_t, kMixCategories> counts{};
  std::size_t total = 0;

  std::size_t operator[](MixCategory c) const { return counts[static_cast<std::size_t>(c)]; }
  /// 0 for an empty program.
  double fraction(MixCategory c) const;
  /// (MULT + BC_MULT + ADD + BC_ADD) / total.
  double mult_add_share() const;
  /// BC_MULT / (MULT + BC_MULT).
  double bconv_mult_share() const;
  std::string to_json() const;
};

/// MMUL and MAC count as multiplications, MMAD as additions, NTT and INTT
/// as NTT; an unlowered BCONV and scalar instructions fall under OTHERS.
InstructionMix instruction_mix(const isa::Program& p);

/// Share of the normal multiplications left after conversion folding that
/// the MAC fusion rule absorbs into an accumulation. The program is
/// lowered, propagated and deduplicated first.
double mac_fusable_fraction(const isa::Program& ir);

}  // namespace effact::workloads
