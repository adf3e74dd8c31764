// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

// effact: compile, execute, simulate, sweep, analyze and generate
// residue-polynomial programs.

#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "effact/compiler/analysis.hpp"
#include "effact/compiler/compile.hpp"
#include "effact/error.hpp"
#include "effact/isa/assembler.hpp"
#include "effact/isa/executor.hpp"
#include "effact/isa/memory.hpp"
#include "effact/isa/text.hpp"
#include "effact/sim/experiments.hpp"
#include "effact/sim/simulator.hpp"
#include "effact/workloads/generators.hpp"
#include "effact/workloads/mix.hpp"
#include "effact/workloads/params.hpp"
#include "effact/workloads/random.hpp"

namespace {

using namespace effact;
using json = nlohmann::ordered_json;

// Error with the pipeline stage it came from; exits with status 1.
struct StageError {
  std::string stage;
  std::string message;
};

template <typename F>
auto staged(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageError{stage, e.what()};
  } catch (const std::exception& e) {
    throw StageError{stage, e.what()};
  }
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  staged("io", [&] {
    isa::write_text_file(path, text);
    return 0;
  });
}

isa::Program load_program(const std::string& path) {
  const auto bytes = staged("io", [&] { return isa::read_file(path); });
  if (bytes.size() >= 4 && bytes[0] == 'E' && bytes[1] == 'B' && bytes[2] == 'I' &&
      bytes[3] == 'N') {
    return staged("parse", [&] { return isa::disassemble(bytes); });
  }
  const std::string text(bytes.begin(), bytes.end());
  try {
    return isa::parse_ir(text);
  } catch (const ParseError& e) {
    throw StageError{"parse", path + ": " + e.what()};
  } catch (const Error& e) {
    throw StageError{"parse", path + ": " + e.what()};
  }
}

bool has_vregs(const isa::Program& p) {
  for (const auto& in : p.code) {
    for (const auto* ops : {&in.src, &in.dst}) {
      for (const auto& o : *ops) {
        if (o.kind == isa::OperandKind::VReg) return true;
      }
    }
  }
  return false;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (auto b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

// Hardware and pass flags shared by compile, sim, sweep and analyze.
struct HwFlags {
  std::string hw_file;
  std::optional<std::size_t> slots;
  bool no_propagate = false, no_pre = false, no_merge = false, no_schedule = false,
       no_alloc = false, no_streaming = false;

  void add_hw(CLI::App* c, bool with_slots) {
    c->add_option("--hw", hw_file, "hardware description file")
        ->envname("EFFACT_HW")
        ->check(CLI::ExistingFile);
    if (with_slots) c->add_option("--slots", slots, "override the SRAM slot count");
  }
  void add_passes(CLI::App* c) {
    c->add_flag("--no-propagate", no_propagate, "skip copy/constant propagation");
    c->add_flag("--no-pre", no_pre, "skip redundancy elimination");
    c->add_flag("--no-merge", no_merge, "skip computation merging (peephole)");
    c->add_flag("--no-schedule", no_schedule, "skip list scheduling");
    c->add_flag("--no-alloc", no_alloc, "keep virtual registers");
    c->add_flag("--no-streaming", no_streaming, "skip streaming instruction merging");
  }
  compiler::HardwareDescription hw() const {
    compiler::HardwareDescription h;
    if (!hw_file.empty()) {
      try {
        h = compiler::load_hw(hw_file);
      } catch (const ParseError& e) {
        throw StageError{"hw", hw_file + ":" + std::to_string(e.line()) + ": " + e.what()};
      } catch (const Error& e) {
        throw StageError{"hw", e.what()};
      }
    }
    if (slots) h.slots = *slots;
    staged("hw", [&] {
      h.validate();
      return 0;
    });
    return h;
  }
  compiler::CompileOptions options() const {
    compiler::CompileOptions o;
    o.propagate = !no_propagate;
    o.pre = !no_pre;
    o.peephole = !no_merge;
    o.schedule = !no_schedule;
    o.alloc = !no_alloc;
    o.streaming = !no_streaming;
    return o;
  }
};

isa::Program compile_program(const isa::Program& ir, const compiler::HardwareDescription& hw,
                             const compiler::CompileOptions& opt,
                             compiler::CompileReport* report) {
  try {
    return compiler::compile(ir, hw, opt, report);
  } catch (const Error& e) {
    throw StageError{"compile", e.what()};
  }
}

json compile_json(const compiler::CompileReport& r) {
  return {{"ir_instructions", r.ir_instructions},
          {"lowered", r.lowered},
          {"after_propagate", r.after_propagate},
          {"after_pre", r.after_pre},
          {"after_peephole", r.after_peephole},
          {"final_instructions", r.final_instructions},
          {"max_live", r.max_live},
          {"schedule_makespan", r.schedule_makespan},
          {"peephole",
           {{"deferred", r.peephole.deferred},
            {"folded_outputs", r.peephole.folded_outputs},
            {"macs", r.peephole.macs}}},
          {"streaming",
           {{"loads", r.stream_before_alloc.loads + r.stream_after_alloc.loads},
            {"stores", r.stream_before_alloc.stores + r.stream_after_alloc.stores},
            {"fifos", r.stream_before_alloc.fifos}}},
          {"alloc",
           {{"spill_loads", r.alloc.spill_loads},
            {"spill_stores", r.alloc.spill_stores},
            {"slots_used", r.alloc.slots_used}}}};
}

std::string compile_text(const compiler::CompileReport& r) {
  std::ostringstream os;
  os << "ir instructions    " << r.ir_instructions << "\n"
     << "lowered            " << r.lowered << "\n"
     << "after propagate    " << r.after_propagate << "\n"
     << "after pre          " << r.after_pre << "\n"
     << "after merge        " << r.after_peephole << "\n"
     << "final              " << r.final_instructions << "\n"
     << "max live           " << r.max_live << "\n"
     << "macs fused         " << r.peephole.macs << "\n"
     << "streamed loads     " << r.stream_before_alloc.loads + r.stream_after_alloc.loads
     << "\n"
     << "streamed stores    " << r.stream_before_alloc.stores + r.stream_after_alloc.stores
     << "\n"
     << "fifo values        " << r.stream_before_alloc.fifos << "\n"
     << "spill loads/stores " << r.alloc.spill_loads << "/" << r.alloc.spill_stores << "\n";
  return os.str();
}

// ---------------------------------------------------------------- compile

struct CompileCmd {
  std::string input, output = "-", json_out;
  bool binary = false;
  HwFlags f;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("compile", "compile IR to machine assembly");
    c->add_option("input", input, "IR file (.eir)")->required()->check(CLI::ExistingFile);
    c->add_option("-o,--output", output, "output program, - for stdout");
    c->add_flag("--binary", binary, "write the binary encoding instead of text");
    c->add_option("--json", json_out, "write the compile report as JSON");
    f.add_hw(c, true);
    f.add_passes(c);
    c->callback([this] { run(); });
  }

  void run() {
    const auto ir = load_program(input);
    const auto hw = f.hw();
    compiler::CompileReport rep;
    const auto m = compile_program(ir, hw, f.options(), &rep);
    if (binary) {
      if (output == "-") throw StageError{"io", "--binary needs -o FILE"};
      const auto bytes = staged("assemble", [&] { return isa::assemble(m); });
      staged("io", [&] {
        isa::write_file(output, bytes);
        return 0;
      });
    } else {
      write_output(output, staged("assemble", [&] { return isa::print(m); }));
    }
    if (!json_out.empty()) write_output(json_out, compile_json(rep).dump(2) + "\n");
    if (output != "-" && json_out != "-") std::cout << compile_text(rep);
  }
};

// ---------------------------------------------------------------- exec

struct ExecCmd {
  std::string input, image, output, json_out;
  bool random_inputs = false;
  std::size_t slots = 0, lanes = 4;
  std::uint64_t* seed = nullptr;

  void add(CLI::App& app, std::uint64_t* s) {
    seed = s;
    auto* c = app.add_subcommand("exec", "run a program on the golden executor");
    c->add_option("input", input, "program (.eir, .easm or binary)")
        ->required()
        ->check(CLI::ExistingFile);
    auto* img = c->add_option("--image", image, "input memory image (.emem)")
                    ->check(CLI::ExistingFile);
    c->add_flag("--random-inputs", random_inputs,
                "fill every entry read before written with random data (uses --seed)")
        ->excludes(img);
    c->add_option("-o,--output", output, "write the final memory image (.emem)");
    c->add_option("--slots", slots, "SRAM slot count (0: unbounded)");
    c->add_option("--lanes", lanes, "automorphism network lanes")->check(CLI::PositiveNumber);
    c->add_option("--json", json_out, "write a summary as JSON");
    c->callback([this] { run(); });
  }

  void run() {
    const auto p = load_program(input);
    isa::MemoryImage in;
    if (!image.empty()) {
      in = staged("io", [&] { return isa::load_memory_image(image); });
    } else if (random_inputs) {
      in = staged("inputs", [&] { return workloads::random_inputs(p, *seed); });
    } else {
      in.n = p.n;
    }
    isa::ExecOptions eo;
    eo.slots = slots;
    eo.lanes = lanes;
    const auto out = staged("exec", [&] { return isa::execute_program(p, in, eo); });
    if (!output.empty()) {
      staged("io", [&] {
        isa::save_memory_image(output, out);
        return 0;
      });
    }
    json j;
    j["instructions"] = p.code.size();
    json regions = json::object();
    for (const auto& [name, entries] : out.dram) {
      if (name.rfind("__", 0) == 0) continue;
      std::size_t present = 0;
      for (const auto& e : entries) present += e.has_value();
      regions[name] = {{"size", entries.size()}, {"present", present}};
    }
    j["regions"] = regions;
    isa::MemoryImage visible;
    visible.n = out.n;
    for (const auto& [name, entries] : out.dram) {
      if (name.rfind("__", 0) != 0) visible.dram[name] = entries;
    }
    j["digest"] = hex64(fnv1a(isa::write_memory_image(visible)));
    if (!json_out.empty()) write_output(json_out, j.dump(2) + "\n");
    if (json_out != "-") {
      std::cout << "executed " << p.code.size() << " instructions\n";
      for (const auto& [name, r] : regions.items()) {
        std::cout << "  @" << name << ": " << r["present"].get<std::size_t>() << "/"
                  << r["size"].get<std::size_t>() << " residues\n";
      }
      std::cout << "digest " << j["digest"].get<std::string>() << "\n";
    }
  }
};

// ---------------------------------------------------------------- sim

struct SimCmd {
  std::string input, json_out, trace_out;
  bool compare = false;
  HwFlags f;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("sim", "simulate a machine program (IR is compiled first)");
    c->add_option("input", input, "program (.easm, binary or .eir)")
        ->required()
        ->check(CLI::ExistingFile);
    c->add_option("--json", json_out, "write the report as JSON, - for stdout");
    c->add_option("--trace", trace_out, "write the per-instruction event trace (CSV)");
    c->add_flag("--compare-streaming", compare,
                "compile the IR with and without streaming merge and report both");
    f.add_hw(c, true);
    f.add_passes(c);
    c->callback([this] { run(); });
  }

  void run() {
    const auto p = load_program(input);
    const auto hw = f.hw();
    const bool is_ir = p.form == isa::Form::SsaIr || has_vregs(p);
    if (compare) {
      if (!is_ir) throw StageError{"sim", "--compare-streaming needs an IR input"};
      const auto c = staged("sim", [&] { return sim::compare_streaming(p, hw, f.options()); });
      if (!json_out.empty()) write_output(json_out, sim::to_json(c) + "\n");
      if (json_out != "-") {
        std::cout << "streaming on:  cycles " << c.on.cycles << ", dram bytes "
                  << c.on.dram.total() << "\n"
                  << "streaming off: cycles " << c.off.cycles << ", dram bytes "
                  << c.off.dram.total() << "\n"
                  << "dram reduction  " << 100.0 * c.dram_reduction() << " %\n"
                  << "cycle reduction " << 100.0 * c.cycle_reduction() << " %\n";
      }
      return;
    }
    isa::Program m = p;
    if (is_ir) m = compile_program(p, hw, f.options(), nullptr);
    sim::SimOptions so;
    so.trace = !trace_out.empty();
    const auto r = staged("sim", [&] { return sim::simulate(m, hw, so); });
    if (!trace_out.empty()) write_output(trace_out, sim::trace_csv(r));
    if (!json_out.empty()) {
      auto no_trace = r;
      no_trace.trace.clear();
      write_output(json_out, sim::to_json(no_trace) + "\n");
    }
    if (json_out != "-" && trace_out != "-") std::cout << sim::to_text(r);
  }
};

// ---------------------------------------------------------------- sweep

struct SweepCmd {
  std::string input, csv_out = "-", json_out;
  std::vector<std::size_t> slots{8, 16, 32, 64, 128};
  HwFlags f;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("sweep", "recompile and simulate over SRAM sizes");
    c->add_option("input", input, "IR file (.eir)")->required()->check(CLI::ExistingFile);
    c->add_option("--slots", slots, "comma-separated slot counts")
        ->delimiter(',')
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));
    c->add_option("--csv", csv_out, "CSV output, - for stdout");
    c->add_option("--json", json_out, "JSON output");
    f.add_hw(c, false);
    f.add_passes(c);
    c->callback([this] { run(); });
  }

  void run() {
    const auto ir = load_program(input);
    const auto hw = f.hw();
    const auto pts = staged("sweep", [&] { return sim::sweep_sram(ir, hw, slots, f.options()); });
    if (!csv_out.empty()) write_output(csv_out, sim::sweep_csv(pts));
    if (!json_out.empty()) write_output(json_out, sim::sweep_json(pts) + "\n");
  }
};

// ---------------------------------------------------------------- analyze

struct AnalyzeCmd {
  std::string input, json_out;
  HwFlags f;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("analyze", "instruction mix and pass statistics of an IR");
    c->add_option("input", input, "IR file (.eir)")->required()->check(CLI::ExistingFile);
    c->add_option("--json", json_out, "write the analysis as JSON, - for stdout");
    f.add_hw(c, true);
    f.add_passes(c);
    c->callback([this] { run(); });
  }

  void run() {
    const auto ir = load_program(input);
    const auto hw = f.hw();
    const auto lowered = staged("lower", [&] { return compiler::lower(ir); });
    const auto mix = workloads::instruction_mix(lowered);
    const double mac = staged("analyze", [&] { return workloads::mac_fusable_fraction(ir); });
    compiler::CompileReport rep;
    const auto m = compile_program(ir, hw, f.options(), &rep);
    const auto cp = staged("analyze", [&] { return compiler::critical_path_length(m, hw); });
    const double removed =
        rep.lowered ? static_cast<double>(rep.lowered - rep.after_pre) / rep.lowered : 0.0;

    json j;
    j["instructions"] = ir.code.size();
    j["mix"] = json::parse(mix.to_json());
    j["mult_add_share"] = mix.mult_add_share();
    j["ntt_share"] = mix.fraction(workloads::MixCategory::Ntt);
    j["bconv_mult_share"] = mix.bconv_mult_share();
    j["mac_fusable_fraction"] = mac;
    j["redundancy_removed_fraction"] = removed;
    j["compile"] = compile_json(rep);
    j["critical_path"] = cp;
    if (!json_out.empty()) write_output(json_out, j.dump(2) + "\n");
    if (json_out != "-") {
      std::cout << "instructions       " << ir.code.size() << " (lowered " << mix.total
                << ")\n";
      for (std::size_t k = 0; k < workloads::kMixCategories; ++k) {
        const auto cat = static_cast<workloads::MixCategory>(k);
        std::cout << "  " << std::left << std::setw(17) << workloads::to_string(cat) << mix[cat] << " (" << 100.0 * mix.fraction(cat) << " %)\n";
      }
      std::cout << "mult+add share     " << 100.0 * mix.mult_add_share() << " %\n"
                << "mac-fusable        " << 100.0 * mac << " %\n"
                << "pre+propagate cut  " << 100.0 * removed << " %\n"
                << compile_text(rep) << "critical path      " << cp << "\n";
    }
  }
};

// ---------------------------------------------------------------- gen

struct GenCmd {
  std::string kind, output = "-", image;
  std::string preset;
  std::optional<std::size_t> N, L, l, dnum, slots, Lboot, Lcts, Lstc, Levalmod;
  std::optional<unsigned> q0_bits, q_bits, p_bits;
  std::vector<std::int64_t> steps{1, 2, 3, 4};
  std::size_t batches = 4, features = 16, inject = 0, ops = 48;
  std::uint64_t* seed = nullptr;

  void add(CLI::App& app, std::uint64_t* s) {
    seed = s;
    auto* c = app.add_subcommand("gen", "generate a workload IR");
    c->add_option("kind", kind, "keyswitch, hoisted, helr, bootstrap or random")
        ->required()
        ->check(CLI::IsMember({"keyswitch", "hoisted", "helr", "bootstrap", "random"}));
    c->add_option("-o,--output", output, "output IR, - for stdout");
    c->add_option("--image", image, "also write an input image (.emem) for the program");
    c->add_option("--preset", preset, "desk or table3 parameter set")
        ->check(CLI::IsMember({"desk", "table3"}));
    c->add_option("--N", N, "ring degree");
    c->add_option("--L", L, "top level");
    c->add_option("--l", l, "working level (default: L)");
    c->add_option("--dnum", dnum, "key-switching digits");
    c->add_option("--slots", slots, "message slots");
    c->add_option("--Lboot", Lboot, "bootstrapping level budget");
    c->add_option("--Lcts", Lcts, "coefficient-to-slot levels");
    c->add_option("--Lstc", Lstc, "slot-to-coefficient levels");
    c->add_option("--Levalmod", Levalmod, "modular-reduction levels");
    c->add_option("--q0-bits", q0_bits, "bits of the base prime");
    c->add_option("--q-bits", q_bits, "bits of the scaling primes");
    c->add_option("--p-bits", p_bits, "bits of the special primes");
    c->add_option("--steps", steps, "hoisted rotation steps")->delimiter(',');
    c->add_option("--batches", batches, "HELR mini-batches")->check(CLI::PositiveNumber);
    c->add_option("--features", features, "HELR features")->check(CLI::PositiveNumber);
    c->add_option("--ops", ops, "random program length")->check(CLI::PositiveNumber);
    c->add_option("--inject", inject, "insert duplicate instructions (uses --seed)");
    c->callback([this] { run(); });
  }

  workloads::WorkloadParams params() const {
    workloads::WorkloadParams w;
    if (preset == "table3") w = workloads::WorkloadParams::table3();
    else if (preset == "desk" || (preset.empty() && kind == "bootstrap")) {
      w = workloads::WorkloadParams::desk_boot();
    }
    if (N) w.n = *N;
    if (L) w.L = *L;
    w.l = l ? *l : (L ? *L : w.l);
    if (dnum) w.dnum = *dnum;
    if (slots) w.slots = *slots;
    if (Lboot) w.L_boot = *Lboot;
    if (Lcts) w.L_cts = *Lcts;
    if (Lstc) w.L_stc = *Lstc;
    if (Levalmod) w.L_evalmod = *Levalmod;
    if (q0_bits) w.q0_bits = *q0_bits;
    if (q_bits) w.q_bits = *q_bits;
    if (p_bits) w.p_bits = *p_bits;
    return w;
  }

  void run() {
    std::optional<isa::MemoryImage> typed_inputs;
    isa::Program p = staged("gen", [&] {
      if (kind == "random") {
        workloads::RandomProgramOptions o;
        o.ops = ops;
        if (N) o.n = *N;
        auto c = workloads::gen_random_program(*seed, o);
        typed_inputs = std::move(c.image);
        return std::move(c.program);
      }
      const auto w = params();
      if (kind == "keyswitch") return workloads::gen_keyswitch(w);
      if (kind == "hoisted") return workloads::gen_hoisted_rotations(w, steps);
      if (kind == "helr") return workloads::gen_helr_iteration(w, batches, features);
      return workloads::gen_bootstrap_skeleton(w);
    });
    if (inject) staged("gen", [&] { return workloads::inject_duplicates(p, *seed, inject); });
    write_output(output, workloads::to_ir_text(p));
    if (!image.empty()) {
      const auto img = typed_inputs ? *typed_inputs : staged("inputs", [&] {
        return workloads::random_inputs(p, *seed);
      });
      staged("io", [&] {
        isa::save_memory_image(image, img);
        return 0;
      });
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"effact: residue-polynomial FHE accelerator toolchain"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "seed for every randomized input")->capture_default_str();
  CompileCmd compile_cmd;
  ExecCmd exec_cmd;
  SimCmd sim_cmd;
  SweepCmd sweep_cmd;
  AnalyzeCmd analyze_cmd;
  GenCmd gen_cmd;
  compile_cmd.add(app);
  exec_cmd.add(app, &seed);
  sim_cmd.add(app);
  sweep_cmd.add(app);
  analyze_cmd.add(app);
  gen_cmd.add(app, &seed);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const StageError& e) {
    std::cerr << "effact: " << e.stage << ": " << e.message << "\n";
    return 1;
  }
  return 0;
}
