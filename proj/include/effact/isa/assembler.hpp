// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "effact/isa/program.hpp"

namespace effact::isa {

/// `.ebin`: header, constant pool, address table, then one 128-bit word per
/// instruction (layout in docs/formats.md). Throws StructuralError when the
/// program still contains virtual registers or conversion pseudo-ops.
std::vector<std::uint8_t> assemble(const Program& p);
Program disassemble(std::span<const std::uint8_t> bytes);

/// `.easm` is the canonical text form (isa::print) of an allocated program.
std::string assemble_text(const Program& p);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace effact::isa
