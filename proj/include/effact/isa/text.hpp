// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "effact/isa/program.hpp"

namespace effact::isa {

/// Parses `.eir` / `.easm` text (one grammar for every form, see
/// docs/formats.md). `loop` blocks are expanded while parsing. Errors carry
/// line and column.
Program parse_ir(std::string_view text);

/// Canonical text. parse_ir(print(p)) == p up to vreg naming of unnamed
/// registers.
std::string print(const Program& p);

std::string print_operand(const Program& p, const Operand& o);
std::string print_instruction(const Program& p, const Instruction& in);

}  // namespace effact::isa
