// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/isa/memory.hpp"

#include <fstream>
#include <iterator>

#include "effact/error.hpp"
#include "effact/isa/assembler.hpp"
#include "bytes.hpp"

namespace effact::isa {

namespace {

constexpr std::uint32_t kMemMagic = 0x4d454d45;  // "EMEM"
constexpr std::uint32_t kMemVersion = 1;

}  // namespace

std::vector<Residue>& MemoryImage::region(const std::string& name) {
  return dram[name];
}

const std::vector<Residue>& MemoryImage::region(const std::string& name) const {
  auto it = dram.find(name);
  if (it == dram.end()) throw InvalidArgument("no DRAM region @" + name);
  return it->second;
}

void MemoryImage::put(const std::string& name, std::size_t offset,
                      const kernels::ResiduePoly& r) {
  if (n == 0) n = r.size();
  if (r.size() != n) throw StructuralError("residue length differs from image n");
  auto& reg = dram[name];
  if (reg.size() <= offset) reg.resize(offset + 1);
  reg[offset] = r;
}

void MemoryImage::put(const std::string& name, std::size_t offset,
                      const kernels::RnsPoly& p) {
  for (std::size_t i = 0; i < p.size(); ++i) put(name, offset + i, p[i]);
  if (p.size() == 0) dram[name];
}

std::vector<kernels::ResiduePoly> MemoryImage::get(const std::string& name,
                                                   std::size_t offset,
                                                   std::size_t count) const {
  const auto& reg = region(name);
  std::vector<kernels::ResiduePoly> out;
  for (std::size_t i = offset; i < offset + count; ++i) {
    if (i >= reg.size() || !reg[i]) {
      throw InvalidArgument("@" + name + "[" + std::to_string(i) + "] is empty");
    }
    out.push_back(*reg[i]);
  }
  return out;
}

bool MemoryImage::dram_equal(const MemoryImage& o) const {
  auto covered = [](const MemoryImage& a, const MemoryImage& b) {
    for (const auto& [name, reg] : a.dram) {
      if (name.rfind("__", 0) == 0) continue;
      auto it = b.dram.find(name);
      const std::size_t len =
          std::max(reg.size(), it == b.dram.end() ? 0 : it->second.size());
      for (std::size_t i = 0; i < len; ++i) {
        const Residue* x = i < reg.size() ? &reg[i] : nullptr;
        const Residue* y =
            it != b.dram.end() && i < it->second.size() ? &it->second[i] : nullptr;
        const bool hx = x && x->has_value(), hy = y && y->has_value();
        if (hx != hy) return false;
        if (hx && !(**x == **y)) return false;
      }
    }
    return true;
  };
  return covered(*this, o) && covered(o, *this);
}

std::size_t MemoryImage::residue_count() const {
  std::size_t c = 0;
  for (const auto& [name, reg] : dram) {
    for (const auto& r : reg) c += r.has_value();
  }
  return c;
}

std::vector<std::uint8_t> write_memory_image(const MemoryImage& img) {
  detail::ByteWriter w;
  w.u32(kMemMagic);
  w.u32(kMemVersion);
  w.u64(img.n);
  w.u32(static_cast<std::uint32_t>(img.dram.size()));
  for (const auto& [name, reg] : img.dram) {
    w.str(name);
    w.u64(reg.size());
    for (const auto& r : reg) {
      w.u8(r.has_value());
      if (!r) continue;
      w.u64(r->q());
      w.u8(static_cast<std::uint8_t>(r->domain));
      w.u8(static_cast<std::uint8_t>(r->order));
      w.u8(static_cast<std::uint8_t>(r->repr));
      w.u8(r->scale_deferred);
      for (Word x : r->coeffs) w.u64(x);
    }
  }
  return w.take();
}

MemoryImage read_memory_image(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "memory image");
  if (r.u32() != kMemMagic) throw ParseError(0, 0, "memory image: bad magic");
  if (r.u32() != kMemVersion) throw ParseError(0, 0, "memory image: unsupported version");
  MemoryImage img;
  img.n = static_cast<std::size_t>(r.u64());
  std::map<Word, rns::Modulus> moduli;
  const std::uint32_t regions = r.u32();
  for (std::uint32_t k = 0; k < regions; ++k) {
    const std::string name = r.str();
    auto& reg = img.dram[name];
    reg.resize(static_cast<std::size_t>(r.u64()));
    for (auto& entry : reg) {
      if (!r.u8()) continue;
      const Word q = r.u64();
      auto it = moduli.find(q);
      if (it == moduli.end()) {
        try {
          it = moduli.emplace(q, rns::Modulus(q, img.n)).first;
        } catch (const Error& e) {
          throw ParseError(0, 0, std::string("memory image: ") + e.what());
        }
      }
      const auto domain = static_cast<kernels::Domain>(r.u8());
      const auto order = static_cast<kernels::Order>(r.u8());
      const auto repr = static_cast<MontForm>(r.u8());
      const bool deferred = r.u8() != 0;
      std::vector<Word> c(img.n);
      for (auto& x : c) x = r.u64();
      kernels::ResiduePoly poly(it->second, std::move(c), domain, order, repr);
      poly.scale_deferred = deferred;
      try {
        poly.validate();
      } catch (const Error& e) {
        throw ParseError(0, 0, "memory image @" + name + ": " + e.what());
      }
      entry = std::move(poly);
    }
  }
  if (!r.at_end()) throw ParseError(0, 0, "memory image: trailing bytes");
  return img;
}

void save_memory_image(const std::string& path, const MemoryImage& img) {
  write_file(path, write_memory_image(img));
}

MemoryImage load_memory_image(const std::string& path) {
  return read_memory_image(read_file(path));
}

}  // namespace effact::isa
