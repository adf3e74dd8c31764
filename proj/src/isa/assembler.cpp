// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/isa/assembler.hpp"

#include <array>
#include <fstream>
#include <iterator>
#include <map>

#include "bytes.hpp"
#include "effact/error.hpp"
#include "effact/isa/text.hpp"

namespace effact::isa {

namespace {

constexpr std::uint32_t kBinMagic = 0x4e494245;  // "EBIN"
constexpr std::uint32_t kBinVersion = 1;
constexpr std::uint32_t kPayloadMax = (1u << 24) - 1;

// Word layout (little-endian 128 bits):
//   [0,5) opcode  [5,10) flags  [10,18) modulus  [18,30) 4 x 3-bit operand kinds
//   [32,56) [56,80) [80,104) [104,128) 24-bit payloads: dst, src0, src1, src2
struct Word128 {
  std::uint64_t lo = 0, hi = 0;
  void put(unsigned bit, unsigned width, std::uint64_t v) {
    for (unsigned i = 0; i < width; ++i) {
      const unsigned b = bit + i;
      const std::uint64_t x = (v >> i) & 1;
      if (b < 64) lo |= x << b;
      else hi |= x << (b - 64);
    }
  }
  std::uint64_t get(unsigned bit, unsigned width) const {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) {
      const unsigned b = bit + i;
      const std::uint64_t x = b < 64 ? (lo >> b) & 1 : (hi >> (b - 64)) & 1;
      v |= x << i;
    }
    return v;
  }
};

constexpr unsigned kPayloadBit[4] = {32, 56, 80, 104};

}  // namespace

std::vector<std::uint8_t> assemble(const Program& p) {
  validate(p);
  std::vector<std::pair<Word, MontForm>> pool;
  std::vector<Address> addrs;
  auto pool_index = [&](const Operand& o) {
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].first == o.imm && pool[i].second == o.form) return i;
    }
    pool.emplace_back(o.imm, o.form);
    return pool.size() - 1;
  };
  auto addr_index = [&](const Address& a) {
    for (std::size_t i = 0; i < addrs.size(); ++i) {
      if (addrs[i] == a) return i;
    }
    addrs.push_back(a);
    return addrs.size() - 1;
  };

  std::vector<Word128> words;
  std::vector<std::pair<std::uint32_t, std::int32_t>> groups;
  for (std::size_t pc = 0; pc < p.code.size(); ++pc) {
    const auto& in = p.code[pc];
    if (in.op == Opcode::BCONV) {
      throw StructuralError("instruction " + std::to_string(pc) +
                            ": bconv must be lowered before assembly");
    }
    if (in.dst.size() > 1 || in.src.size() > 3) {
      throw StructuralError("instruction " + std::to_string(pc) + ": too many operands");
    }
    if (p.moduli.size() > 256) throw StructuralError("more than 256 moduli");
    Word128 w;
    w.put(0, 5, static_cast<std::uint64_t>(in.op));
    w.put(5, 5, in.flags);
    w.put(10, 8, in.modulus);
    std::array<const Operand*, 4> ops{};
    if (!in.dst.empty()) ops[0] = &in.dst[0];
    for (std::size_t i = 0; i < in.src.size(); ++i) ops[i + 1] = &in.src[i];
    for (unsigned k = 0; k < 4; ++k) {
      if (!ops[k]) continue;
      const Operand& o = *ops[k];
      std::uint64_t payload = 0;
      switch (o.kind) {
        case OperandKind::VReg:
          throw StructuralError("instruction " + std::to_string(pc) +
                                ": unallocated virtual register %" +
                                p.vreg_names[o.index]);
        case OperandKind::Imm: payload = pool_index(o); break;
        case OperandKind::Mem: payload = addr_index(o.addr); break;
        default: payload = o.index; break;
      }
      if (payload > kPayloadMax) {
        throw StructuralError("instruction " + std::to_string(pc) +
                              ": operand field exceeds 24 bits");
      }
      w.put(18 + 3 * k, 3, static_cast<std::uint64_t>(o.kind));
      w.put(kPayloadBit[k], 24, payload);
    }
    words.push_back(w);
    if (in.group >= 0) groups.emplace_back(static_cast<std::uint32_t>(pc), in.group);
  }

  detail::ByteWriter b;
  b.u32(kBinMagic);
  b.u32(kBinVersion);
  b.u8(static_cast<std::uint8_t>(p.form));
  b.u64(p.n);
  b.u32(static_cast<std::uint32_t>(p.moduli.size()));
  for (Word q : p.moduli) b.u64(q);
  b.u32(static_cast<std::uint32_t>(p.symbols.size()));
  for (const auto& s : p.symbols) {
    b.str(s.name);
    b.u64(s.size);
  }
  b.u32(static_cast<std::uint32_t>(pool.size()));
  for (const auto& [v, f] : pool) {
    b.u64(v);
    b.u8(static_cast<std::uint8_t>(f));
  }
  b.u32(static_cast<std::uint32_t>(addrs.size()));
  for (const auto& a : addrs) {
    b.u32(a.symbol);
    b.u32(static_cast<std::uint32_t>(a.sreg));
    b.i64(a.scale);
    b.i64(a.offset);
  }
  b.u32(static_cast<std::uint32_t>(p.groups.size()));
  for (const auto& g : p.groups) {
    b.u32(static_cast<std::uint32_t>(g.from.size()));
    for (auto m : g.from) b.u32(m);
    b.u32(static_cast<std::uint32_t>(g.to.size()));
    for (auto m : g.to) b.u32(m);
  }
  b.u32(static_cast<std::uint32_t>(groups.size()));
  for (const auto& [pc, g] : groups) {
    b.u32(pc);
    b.u32(static_cast<std::uint32_t>(g));
  }
  b.u32(static_cast<std::uint32_t>(words.size()));
  b.u8(!p.issue.empty());
  for (auto t : p.issue) b.u64(t);
  for (const auto& w : words) {
    b.u64(w.lo);
    b.u64(w.hi);
  }
  return b.take();
}

Program disassemble(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "binary program");
  if (r.u32() != kBinMagic) throw ParseError(0, 0, "binary program: bad magic");
  if (r.u32() != kBinVersion) throw ParseError(0, 0, "binary program: unsupported version");
  Program p;
  const std::uint8_t form = r.u8();
  if (form > static_cast<std::uint8_t>(Form::Machine)) {
    throw ParseError(0, 0, "binary program: bad form tag");
  }
  p.form = static_cast<Form>(form);
  p.n = static_cast<std::size_t>(r.u64());
  p.moduli.resize(r.u32());
  for (auto& q : p.moduli) q = r.u64();
  p.symbols.resize(r.u32());
  for (auto& s : p.symbols) {
    s.name = r.str();
    s.size = static_cast<std::size_t>(r.u64());
  }
  std::vector<std::pair<Word, MontForm>> pool(r.u32());
  for (auto& [v, f] : pool) {
    v = r.u64();
    f = static_cast<MontForm>(r.u8());
  }
  std::vector<Address> addrs(r.u32());
  for (auto& a : addrs) {
    a.symbol = r.u32();
    a.sreg = static_cast<std::int32_t>(r.u32());
    a.scale = r.i64();
    a.offset = r.i64();
  }
  p.groups.resize(r.u32());
  for (auto& g : p.groups) {
    g.from.resize(r.u32());
    for (auto& m : g.from) m = r.u32();
    g.to.resize(r.u32());
    for (auto& m : g.to) m = r.u32();
  }
  std::map<std::uint32_t, std::int32_t> group_of;
  const std::uint32_t ng = r.u32();
  for (std::uint32_t i = 0; i < ng; ++i) {
    const std::uint32_t pc = r.u32();
    group_of[pc] = static_cast<std::int32_t>(r.u32());
  }
  const std::uint32_t count = r.u32();
  if (r.u8() != 0) {
    p.issue.resize(count);
    for (auto& t : p.issue) t = r.u64();
  }
  for (std::uint32_t pc = 0; pc < count; ++pc) {
    Word128 w;
    w.lo = r.u64();
    w.hi = r.u64();
    Instruction in;
    const auto op = w.get(0, 5);
    if (op > static_cast<std::uint64_t>(Opcode::JMP) ||
        op == static_cast<std::uint64_t>(Opcode::BCONV)) {
      throw ParseError(0, 0, "binary program: bad opcode at " + std::to_string(pc));
    }
    in.op = static_cast<Opcode>(op);
    in.flags = static_cast<std::uint8_t>(w.get(5, 5));
    in.modulus = static_cast<std::uint32_t>(w.get(10, 8));
    for (unsigned k = 0; k < 4; ++k) {
      const auto kind = static_cast<OperandKind>(w.get(18 + 3 * k, 3));
      if (kind == OperandKind::None) continue;
      const auto payload = static_cast<std::uint32_t>(w.get(kPayloadBit[k], 24));
      Operand o;
      o.kind = kind;
      if (kind == OperandKind::Imm) {
        if (payload >= pool.size()) throw ParseError(0, 0, "binary program: bad pool index");
        o.imm = pool[payload].first;
        o.form = pool[payload].second;
      } else if (kind == OperandKind::Mem) {
        if (payload >= addrs.size()) throw ParseError(0, 0, "binary program: bad address");
        o.addr = addrs[payload];
      } else if (kind == OperandKind::VReg) {
        throw ParseError(0, 0, "binary program: virtual register operand");
      } else {
        o.index = payload;
      }
      (k == 0 ? in.dst : in.src).push_back(o);
    }
    if (auto it = group_of.find(pc); it != group_of.end()) in.group = it->second;
    p.code.push_back(std::move(in));
  }
  if (!r.at_end()) throw ParseError(0, 0, "binary program: trailing bytes");
  try {
    validate(p);
  } catch (const StructuralError& e) {
    throw ParseError(0, 0, std::string("binary program: ") + e.what());
  }
  return p;
}

std::string assemble_text(const Program& p) {
  for (const auto& in : p.code) {
    for (const auto* ops : {&in.src, &in.dst}) {
      for (const auto& o : *ops) {
        if (o.kind == OperandKind::VReg) {
          throw StructuralError("unallocated virtual register %" + p.vreg_names[o.index]);
        }
      }
    }
  }
  return print(p);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path);
  f << text;
}

}  // namespace effact::isa
