// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "effact/isa/memory.hpp"
#include "effact/isa/program.hpp"

namespace effact::isa {

struct ExecOptions {
  /// SRAM slot count; 0 means the image's current sram size, or unbounded
  /// when that is empty too.
  std::size_t slots = 0;
  /// Lane count of the automorphism network.
  std::size_t lanes = 4;
  /// Guard against runaway scalar loops.
  std::size_t max_steps = 100'000'000;
};

/// Golden functional executor. Runs any program form (virtual registers,
/// slots and FIFO channels are all register-like storage) against `img`
/// and returns the final image. Each opcode delegates to the kernels.
/// Throws ExecError on out-of-range slots, missing data, modulus mismatch
/// or an illegal consumer of scale-deferred data.
MemoryImage execute_program(const Program& p, MemoryImage img,
                            const ExecOptions& opt = {});

}  // namespace effact::isa
