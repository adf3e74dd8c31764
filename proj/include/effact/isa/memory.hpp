// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "effact/kernels/residue_poly.hpp"

namespace effact::isa {

using Residue = std::optional<kernels::ResiduePoly>;

/// DRAM regions of residue polynomials keyed by symbol, the SRAM slot array
/// and the FIFO address space (kept separate from SRAM).
struct MemoryImage {
  std::size_t n = 0;
  std::map<std::string, std::vector<Residue>> dram;
  std::vector<Residue> sram;
  std::map<std::uint32_t, kernels::ResiduePoly> fifo;

  std::vector<Residue>& region(const std::string& name);
  const std::vector<Residue>& region(const std::string& name) const;
  /// Writes the limbs of `p` to consecutive entries starting at `offset`,
  /// growing the region as needed.
  void put(const std::string& name, std::size_t offset, const kernels::RnsPoly& p);
  void put(const std::string& name, std::size_t offset, const kernels::ResiduePoly& r);
  /// Reads `count` limbs starting at `offset`; all must be present.
  std::vector<kernels::ResiduePoly> get(const std::string& name, std::size_t offset,
                                        std::size_t count) const;

  /// DRAM contents equal (SRAM and FIFO ignored). Regions present in only
  /// one image compare equal when all their entries are empty. Regions whose
  /// name starts with "__" (compiler spill space) are skipped.
  bool dram_equal(const MemoryImage& o) const;
  std::size_t residue_count() const;
};

/// `.emem` binary: see docs/formats.md.
std::vector<std::uint8_t> write_memory_image(const MemoryImage& img);
MemoryImage read_memory_image(std::span<const std::uint8_t> bytes);

void save_memory_image(const std::string& path, const MemoryImage& img);
MemoryImage load_memory_image(const std::string& path);

}  // namespace effact::isa
