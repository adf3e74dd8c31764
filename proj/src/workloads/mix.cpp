// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/workloads/mix.hpp"

#include <nlohmann/json.hpp>

#include "effact/compiler/passes.hpp"

namespace effact::workloads {

using isa::Opcode;

const char* to_string(MixCategory c) {
  switch (c) {
    case MixCategory::Mult: return "MULT";
    case MixCategory::Add: return "ADD";
    case MixCategory::BcMult: return "BC_MULT";
    case MixCategory::BcAdd: return "BC_ADD";
    case MixCategory::Ntt: return "NTT";
    case MixCategory::Auto: return "AUTO";
    case MixCategory::LoadStore: return "LOAD/STORE";
    case MixCategory::Others: return "OTHERS";
  }
  return "?";
}

double InstructionMix::fraction(MixCategory c) const {
  return total ? static_cast<double>((*this)[c]) / static_cast<double>(total) : 0.0;
}

double InstructionMix::mult_add_share() const {
  if (!total) return 0.0;
  const std::size_t s = (*this)[MixCategory::Mult] + (*this)[MixCategory::BcMult] +
                        (*this)[MixCategory::Add] + (*this)[MixCategory::BcAdd];
  return static_cast<double>(s) / static_cast<double>(total);
}

double InstructionMix::bconv_mult_share() const {
  const std::size_t m = (*this)[MixCategory::Mult] + (*this)[MixCategory::BcMult];
  return m ? static_cast<double>((*this)[MixCategory::BcMult]) / static_cast<double>(m) : 0.0;
}

std::string InstructionMix::to_json() const {
  nlohmann::ordered_json j;
  j["total"] = total;
  for (std::size_t c = 0; c < kMixCategories; ++c) {
    const auto cat = static_cast<MixCategory>(c);
    j["counts"][to_string(cat)] = counts[c];
    j["fractions"][to_string(cat)] = fraction(cat);
  }
  j["mult_add_share"] = mult_add_share();
  j["bconv_mult_share"] = bconv_mult_share();
  return j.dump(2);
}

InstructionMix instruction_mix(const isa::Program& p) {
  InstructionMix m;
  for (const auto& in : p.code) {
    const bool bc = in.has(isa::flag::kBconv1) || in.has(isa::flag::kBconv2);
    MixCategory c = MixCategory::Others;
    switch (in.op) {
      case Opcode::MMUL:
      case Opcode::MAC: c = bc ? MixCategory::BcMult : MixCategory::Mult; break;
      case Opcode::MMAD: c = bc ? MixCategory::BcAdd : MixCategory::Add; break;
      case Opcode::NTT:
      case Opcode::INTT: c = MixCategory::Ntt; break;
      case Opcode::AUTO: c = MixCategory::Auto; break;
      case Opcode::LOAD:
      case Opcode::STORE: c = MixCategory::LoadStore; break;
      default: break;
    }
    ++m.counts[static_cast<std::size_t>(c)];
    ++m.total;
  }
  return m;
}

double mac_fusable_fraction(const isa::Program& ir) {
  using namespace compiler;
  PeepholeOptions fold;
  fold.fold_conversions = true;
  fold.fuse_mac = false;
  const isa::Program folded = peephole_merge(pre(propagate(lower(ir))), fold);
  std::size_t normal = 0;
  for (const auto& in : folded.code) {
    const bool bc = in.has(isa::flag::kBconv1) || in.has(isa::flag::kBconv2);
    normal += in.op == Opcode::MMUL && !bc;
  }
  PeepholeOptions fuse;
  fuse.fold_conversions = false;
  fuse.fuse_mac = true;
  std::size_t fused = 0;
  for (const auto& in : peephole_merge(folded, fuse).code) {
    fused += in.op == Opcode::MAC && !in.has(isa::flag::kBconv1) && !in.has(isa::flag::kBconv2);
  }
  return normal ? static_cast<double>(fused) / static_cast<double>(normal) : 0.0;
}

}  // namespace effact::workloads
