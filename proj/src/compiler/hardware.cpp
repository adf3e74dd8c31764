// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/compiler/hardware.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

#include "effact/error.hpp"
#include "effact/isa/assembler.hpp"

namespace effact::compiler {

const char* to_string(FuClass c) {
  switch (c) {
    case FuClass::None: return "none";
    case FuClass::Ntt: return "ntt";
    case FuClass::Mmul: return "mmul";
    case FuClass::Madd: return "madd";
    case FuClass::Auto: return "auto";
    case FuClass::Dram: return "dram";
  }
  return "?";
}

FuClass fu_class(Opcode op) {
  switch (op) {
    case Opcode::NTT:
    case Opcode::INTT: return FuClass::Ntt;
    case Opcode::MMUL:
    case Opcode::MAC:
    case Opcode::BCONV: return FuClass::Mmul;
    case Opcode::MMAD:
    case Opcode::COPY: return FuClass::Madd;
    case Opcode::AUTO: return FuClass::Auto;
    case Opcode::LOAD:
    case Opcode::STORE: return FuClass::Dram;
    default: return FuClass::None;
  }
}

void HardwareDescription::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw InvalidArgument(std::string("hardware: ") + name + " must be positive");
  };
  positive(lanes, "lanes");
  positive(banks, "banks");
  positive(fu_ntt, "fu.ntt");
  positive(fu_mmul, "fu.mmul");
  positive(fu_madd, "fu.madd");
  positive(fu_auto, "fu.auto");
  positive(ntt_pipelines, "ntt_pipelines");
  positive(fifo_depth, "fifo_depth");
  positive(window, "window");
  if (slots < 2) throw InvalidArgument("hardware: slots must be at least 2");
  if (!(dram_bw > 0) || !std::isfinite(dram_bw)) {
    throw InvalidArgument("hardware: dram_bw must be positive");
  }
}

std::size_t HardwareDescription::fu_count(FuClass c) const {
  switch (c) {
    case FuClass::Ntt: return fu_ntt;
    case FuClass::Mmul: return fu_mmul;
    case FuClass::Madd: return fu_madd;
    case FuClass::Auto: return fu_auto;
    case FuClass::Dram: return 1;
    case FuClass::None: return 0;
  }
  return 0;
}

OpTiming HardwareDescription::op_timing(Opcode op, std::size_t n) const {
  if (auto it = timing.find(op); it != timing.end()) return it->second;
  const std::uint64_t per = std::max<std::uint64_t>(1, n / lanes);
  OpTiming t;
  switch (fu_class(op)) {
    case FuClass::Ntt: {
      const auto logn = static_cast<std::uint64_t>(std::bit_width(n) - 1);
      t.ii = std::max<std::uint64_t>(1, per * logn / ntt_pipelines);
      break;
    }
    case FuClass::Mmul:
    case FuClass::Madd:
    case FuClass::Auto: t.ii = per; break;
    case FuClass::Dram: t.ii = dram_cycles(n); break;
    case FuClass::None: t.ii = 1; break;
  }
  t.latency = t.ii + (fu_class(op) == FuClass::Dram ? dram_latency
                      : fu_class(op) == FuClass::None ? 0
                                                      : pipeline_depth);
  return t;
}

std::uint64_t HardwareDescription::dram_cycles(std::size_t n) const {
  return static_cast<std::uint64_t>(std::ceil(static_cast<double>(n * 8) / dram_bw));
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T number(const std::string& v, std::size_t line, std::size_t col) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ParseError(line, col, "expected a number, got '" + v + "'");
  }
  return out;
}

}  // namespace

HardwareDescription parse_hw(std::string_view text) {
  HardwareDescription hw;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    if (trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, 1, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    const std::size_t vcol = line.find_first_not_of(" \t", eq + 1) + 1;
    auto sz = [&] { return number<std::size_t>(val, line_no, vcol); };
    auto u64 = [&] { return number<std::uint64_t>(val, line_no, vcol); };
    if (key == "lanes") hw.lanes = sz();
    else if (key == "slots") hw.slots = sz();
    else if (key == "banks") hw.banks = sz();
    else if (key == "dram_bw") {
      try {
        std::size_t used = 0;
        hw.dram_bw = std::stod(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
      } catch (const std::exception&) {
        throw ParseError(line_no, vcol, "expected a number, got '" + val + "'");
      }
    } else if (key == "dram_latency") hw.dram_latency = u64();
    else if (key == "fu.ntt") hw.fu_ntt = sz();
    else if (key == "fu.mmul") hw.fu_mmul = sz();
    else if (key == "fu.madd") hw.fu_madd = sz();
    else if (key == "fu.auto") hw.fu_auto = sz();
    else if (key == "ntt_pipelines") hw.ntt_pipelines = sz();
    else if (key == "pipeline_depth") hw.pipeline_depth = u64();
    else if (key == "fifo_depth") hw.fifo_depth = sz();
    else if (key == "window") hw.window = sz();
    else if (key == "streaming") {
      if (val == "on" || val == "true" || val == "1") hw.streaming = true;
      else if (val == "off" || val == "false" || val == "0") hw.streaming = false;
      else throw ParseError(line_no, vcol, "expected on or off");
    } else if (key.rfind("timing.", 0) == 0) {
      const auto op = isa::opcode_from_mnemonic(key.substr(7));
      if (!op) throw ParseError(line_no, 1, "unknown opcode in '" + key + "'");
      std::istringstream is(val);
      std::string a, b, extra;
      if (!(is >> a >> b) || (is >> extra)) {
        throw ParseError(line_no, vcol, "expected '<ii> <latency>'");
      }
      hw.timing[*op] = {number<std::uint64_t>(a, line_no, vcol),
                        number<std::uint64_t>(b, line_no, vcol)};
    } else {
      throw ParseError(line_no, 1, "unknown key '" + key + "'");
    }
    if (end == text.size()) break;
  }
  try {
    hw.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(line_no, 0, e.what());
  }
  return hw;
}

HardwareDescription load_hw(const std::string& path) {
  return parse_hw(isa::read_text_file(path));
}

std::string to_text(const HardwareDescription& hw) {
  std::ostringstream os;
  os << "lanes = " << hw.lanes << "\n"
     << "slots = " << hw.slots << "\n"
     << "banks = " << hw.banks << "\n"
     << "dram_bw = " << hw.dram_bw << "\n"
     << "dram_latency = " << hw.dram_latency << "\n"
     << "fu.ntt = " << hw.fu_ntt << "\n"
     << "fu.mmul = " << hw.fu_mmul << "\n"
     << "fu.madd = " << hw.fu_madd << "\n"
     << "fu.auto = " << hw.fu_auto << "\n"
     << "ntt_pipelines = " << hw.ntt_pipelines << "\n"
     << "pipeline_depth = " << hw.pipeline_depth << "\n"
     << "fifo_depth = " << hw.fifo_depth << "\n"
     << "window = " << hw.window << "\n"
     << "streaming = " << (hw.streaming ? "on" : "off") << "\n";
  for (const auto& [op, t] : hw.timing) {
    os << "timing." << isa::mnemonic(op) << " = " << t.ii << " " << t.latency << "\n";
  }
  return os.str();
}

}  // namespace effact::compiler
