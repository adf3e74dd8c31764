// Copyright 2026 The effact Authors
// SPDX-License-Identifier: Apache-2.0

#include "effact/isa/text.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "effact/error.hpp"

namespace effact::isa {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

// Matches <prefix><digits>, e.g. s12.
std::optional<std::uint32_t> numbered(const std::string& s, char prefix) {
  if (s.size() < 2 || s[0] != prefix) return std::nullopt;
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data() + 1, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<MontForm> form_from(const std::string& s) {
  if (s == "NM") return MontForm::NM;
  if (s == "SM") return MontForm::SM;
  if (s == "DM") return MontForm::DM;
  return std::nullopt;
}

struct Line {
  std::size_t number;
  std::string text;
};

class Cursor {
 public:
  Cursor(const Line& l) : line_(&l) {}

  // Column of the next token.
  std::size_t col() {
    skip();
    return pos_ + 1;
  }
  std::size_t line() const { return line_->number; }
  [[noreturn]] void error(const std::string& msg) {
    throw ParseError(line_->number, col(), msg);
  }
  [[noreturn]] void error_at(std::size_t col, const std::string& msg) const {
    throw ParseError(line_->number, col, msg);
  }
  void skip() {
    while (pos_ < s().size() && std::isspace(static_cast<unsigned char>(s()[pos_]))) ++pos_;
  }
  bool done() {
    skip();
    return pos_ >= s().size();
  }
  char peek() {
    skip();
    return pos_ < s().size() ? s()[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept(const char* tok) {
    skip();
    const std::string_view t(tok);
    if (s().compare(pos_, t.size(), t) == 0) {
      pos_ += t.size();
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }
  std::string ident() {
    skip();
    if (pos_ >= s().size() || !ident_start(s()[pos_])) error("expected identifier");
    const std::size_t b = pos_;
    while (pos_ < s().size() && ident_char(s()[pos_])) ++pos_;
    return s().substr(b, pos_ - b);
  }
  std::string name() {
    // Register and symbol names may start with a digit.
    const std::size_t b = pos_;
    while (pos_ < s().size() && ident_char(s()[pos_])) ++pos_;
    if (b == pos_) error("expected name");
    return s().substr(b, pos_ - b);
  }
  bool at_number() {
    skip();
    if (pos_ >= s().size()) return false;
    const char c = s()[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
    return c == '-' && pos_ + 1 < s().size() &&
           std::isdigit(static_cast<unsigned char>(s()[pos_ + 1]));
  }
  std::int64_t integer() {
    skip();
    const bool neg = pos_ < s().size() && s()[pos_] == '-';
    if (neg) ++pos_;
    const Word v = word();
    if (!neg && v > static_cast<Word>(INT64_MAX)) error("integer out of range");
    return neg ? -static_cast<std::int64_t>(v) : static_cast<std::int64_t>(v);
  }
  Word word() {
    skip();
    const char* b = s().data() + pos_;
    const char* e = s().data() + s().size();
    Word v = 0;
    int base = 10;
    if (e - b > 2 && b[0] == '0' && (b[1] == 'x' || b[1] == 'X')) {
      b += 2;
      base = 16;
    }
    auto [ptr, ec] = std::from_chars(b, e, v, base);
    if (ec != std::errc() || ptr == b) error("expected number");
    pos_ = static_cast<std::size_t>(ptr - s().data());
    return v;
  }
  std::string rest() {
    skip();
    return s().substr(pos_);
  }

 private:
  const std::string& s() const { return line_->text; }
  const Line* line_;
  std::size_t pos_ = 0;
};

struct Affine {
  std::int64_t constant = 0;
  std::int32_t sreg = -1;
  std::int64_t scale = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) {
    std::size_t no = 1, b = 0;
    while (b <= text.size()) {
      std::size_t e = text.find('\n', b);
      if (e == std::string_view::npos) e = text.size();
      std::string l(text.substr(b, e - b));
      if (auto h = l.find('#'); h != std::string::npos) l.resize(h);
      if (!l.empty() && l.back() == '\r') l.pop_back();
      lines_.push_back({no++, std::move(l)});
      b = e + 1;
    }
  }

  Program run() {
    block(0, lines_.size());
    for (const auto& [pc, ref] : pending_labels_) {
      auto it = labels_.find(ref.name);
      if (it == labels_.end()) {
        throw ParseError(ref.line, ref.col, "unknown label '" + ref.name + "'");
      }
      for (auto& o : p_.code[pc].src) {
        if (o.kind == OperandKind::Label && o.index == kUnresolved) {
          o.index = static_cast<std::uint32_t>(it->second);
          break;
        }
      }
    }
    validate(p_);
    return std::move(p_);
  }

 private:
  static constexpr std::uint32_t kUnresolved = 0xffffffffu;

  struct LabelRef {
    std::string name;
    std::size_t line, col;
  };

  bool blank(const Line& l) const {
    for (char c : l.text) {
      if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
  }

  // Processes lines [b, e) in the current loop environment.
  void block(std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Line& l = lines_[i];
      if (blank(l)) continue;
      Cursor c(l);
      if (c.peek() == '.') {
        directive(c);
      } else if (c.peek() == '}') {
        c.error("unmatched '}'");
      } else if (c.accept("loop ")) {
        const std::size_t close = matching_close(i);
        loop(c, i + 1, close);
        i = close;
      } else if (is_label(l)) {
        const std::string name = c.ident();
        if (!loops_.empty()) c.error("labels are not allowed inside loop blocks");
        if (labels_.count(name)) c.error("duplicate label '" + name + "'");
        labels_[name] = p_.code.size();
        c.expect(':');
        if (!c.done()) c.error("unexpected text after label");
      } else {
        instruction(c);
      }
    }
  }

  bool is_label(const Line& l) const {
    Cursor c(l);
    if (!ident_start(c.peek())) return false;
    try {
      c.ident();
    } catch (const ParseError&) {
      return false;
    }
    return c.accept(':') && c.done();
  }

  std::size_t matching_close(std::size_t open) const {
    int depth = 0;
    for (std::size_t i = open; i < lines_.size(); ++i) {
      Cursor c(lines_[i]);
      const std::string t = c.rest();
      if (t.rfind("loop ", 0) == 0) ++depth;
      if (t == "}") {
        if (--depth == 0) return i;
      }
    }
    Cursor(lines_[open]).error("loop block is not closed");
  }

  void loop(Cursor& c, std::size_t b, std::size_t e) {
    const std::string var = c.ident();
    if (numbered(var, 'r') || numbered(var, 's') || numbered(var, 'f') ||
        numbered(var, 'q')) {
      c.error("loop variable '" + var + "' shadows a register name");
    }
    c.expect('=');
    const std::int64_t lo = expr(c).constant;
    c.expect(',');
    const std::int64_t hi = expr(c).constant;
    c.expect('{');
    if (!c.done()) c.error("unexpected text after '{'");
    for (std::int64_t k = lo; k < hi; ++k) {
      loops_.push_back({var, k, {}});
      block(b, e);
      loops_.pop_back();
    }
  }

  void directive(Cursor& c) {
    c.expect('.');
    const std::string d = c.ident();
    if (d == "n") {
      p_.n = static_cast<std::size_t>(c.word());
    } else if (d == "form") {
      const std::string f = c.rest();
      if (f == "ssa-ir") p_.form = Form::SsaIr;
      else if (f == "scheduled") p_.form = Form::Scheduled;
      else if (f == "allocated") p_.form = Form::Allocated;
      else if (f == "machine") p_.form = Form::Machine;
      else c.error("unknown form '" + f + "'");
      return;
    } else if (d == "modulus") {
      const std::size_t col = c.col();
      const auto idx = numbered(c.ident(), 'q');
      if (!idx || *idx != p_.moduli.size()) {
        c.error_at(col, "moduli must be declared in order as q" +
                            std::to_string(p_.moduli.size()));
      }
      p_.moduli.push_back(c.word());
    } else if (d == "symbol") {
      const std::size_t col = c.col();
      const std::string name = c.ident();
      if (p_.find_symbol(name)) c.error_at(col, "duplicate symbol @" + name);
      p_.symbols.push_back({name, static_cast<std::size_t>(c.word())});
    } else if (d == "group") {
      const std::size_t col = c.col();
      if (c.word() != p_.groups.size()) c.error_at(col, "groups must be declared in order");
      BconvGroup g;
      do g.from.push_back(modulus(c)); while (c.accept(','));
      if (!c.accept("->")) c.error("expected '->'");
      do g.to.push_back(modulus(c)); while (c.accept(','));
      p_.groups.push_back(std::move(g));
    } else {
      c.error("unknown directive ." + d);
    }
    if (!c.done()) c.error("unexpected text after directive");
  }

  std::uint32_t modulus(Cursor& c) {
    const std::size_t col = c.col();
    const std::string id = c.ident();
    std::int64_t idx;
    if (id == "q" && c.peek() == '[') {
      c.expect('[');
      idx = expr(c).constant;
      c.expect(']');
    } else if (auto k = numbered(id, 'q')) {
      idx = *k;
    } else {
      c.error_at(col, "expected modulus id");
    }
    if (idx < 0 || static_cast<std::size_t>(idx) >= p_.moduli.size()) {
      c.error_at(col, "unknown modulus id q" + std::to_string(idx));
    }
    return static_cast<std::uint32_t>(idx);
  }

  const std::int64_t* loop_var(const std::string& name) const {
    for (auto it = loops_.rbegin(); it != loops_.rend(); ++it) {
      if (it->var == name) return &it->value;
    }
    return nullptr;
  }

  Affine term(Cursor& c) {
    Affine a;
    std::int64_t coef = 1;
    bool have_coef = false;
    if (c.at_number()) {
      coef = c.integer();
      have_coef = true;
      if (!c.accept('*')) {
        a.constant = coef;
        return a;
      }
    }
    const std::size_t col = c.col();
    const std::string v = c.ident();
    if (!have_coef && c.accept('*')) coef = c.integer();
    if (auto r = numbered(v, 'r')) {
      a.sreg = static_cast<std::int32_t>(*r);
      a.scale = coef;
    } else if (const auto* val = loop_var(v)) {
      a.constant = coef * *val;
    } else {
      c.error_at(col, "unknown variable '" + v + "'");
    }
    return a;
  }

  Affine expr(Cursor& c) {
    Affine total;
    bool first = true;
    for (;;) {
      int sign = 1;
      if (c.accept('+')) {
        sign = 1;
      } else if (c.peek() == '-' && !first) {
        c.accept('-');
        sign = -1;
      } else if (!first) {
        break;
      }
      const std::size_t col = c.col();
      const Affine t = term(c);
      total.constant += sign * t.constant;
      if (t.sreg >= 0) {
        if (total.sreg >= 0 && total.sreg != t.sreg) {
          c.error_at(col, "address may use only one scalar register");
        }
        total.sreg = t.sreg;
        total.scale += sign * t.scale;
      }
      first = false;
    }
    return total;
  }

  std::string scoped_name(const std::string& raw) const {
    for (auto it = loops_.rbegin(); it != loops_.rend(); ++it) {
      auto f = it->renames.find(raw);
      if (f != it->renames.end()) return f->second;
    }
    return raw;
  }

  Operand define_vreg(Cursor& c, const std::string& raw, std::size_t col) {
    std::string name = raw;
    if (!loops_.empty()) {
      for (const auto& l : loops_) name += "." + std::to_string(l.value);
      loops_.back().renames[raw] = name;
    }
    auto it = vreg_ids_.find(name);
    if (it != vreg_ids_.end()) {
      c.error_at(col, "redefinition of %" + name + " (first defined at line " +
                          std::to_string(def_line_[it->second]) + ")");
    }
    const std::uint32_t id = p_.add_vreg(name);
    vreg_ids_[name] = id;
    def_line_.push_back(c_line_);
    return Operand::vreg(id);
  }

  Operand use_vreg(Cursor& c, const std::string& raw, std::size_t col) {
    const std::string name = scoped_name(raw);
    auto it = vreg_ids_.find(name);
    if (it == vreg_ids_.end()) c.error_at(col, "use of undefined %" + raw);
    return Operand::vreg(it->second);
  }

  // Operand or modulus reference. Returns nullopt and sets `mod` for moduli.
  std::optional<Operand> item(Cursor& c, std::optional<std::uint32_t>& mod,
                              std::size_t pc) {
    const std::size_t col = c.col();
    if (c.accept('%')) return use_vreg(c, c.name(), col);
    if (c.accept('@')) {
      const std::string sym = c.name();
      auto idx = p_.find_symbol(sym);
      if (!idx) c.error_at(col, "unknown symbol @" + sym);
      Address a;
      a.symbol = *idx;
      c.expect('[');
      const Affine e = expr(c);
      c.expect(']');
      a.offset = e.constant;
      a.sreg = e.sreg;
      a.scale = e.sreg >= 0 ? e.scale : 0;
      return Operand::mem(a);
    }
    if (c.at_number()) {
      const std::int64_t v = c.integer();
      MontForm f = MontForm::NM;
      if (c.accept(':')) {
        const std::size_t fc = c.col();
        auto parsed = form_from(c.ident());
        if (!parsed) c.error_at(fc, "expected NM, SM or DM");
        f = *parsed;
      }
      return Operand::immediate(static_cast<Word>(v), f);
    }
    if (!ident_start(c.peek())) c.error("expected operand");
    Cursor save = c;
    const std::string id = c.ident();
    if (id == "q" && c.peek() == '[') {
      c = save;
      mod = modulus(c);
      return std::nullopt;
    }
    if (auto k = numbered(id, 'q')) {
      if (*k >= p_.moduli.size()) {
        c.error_at(col, "unknown modulus id q" + std::to_string(*k));
      }
      mod = *k;
      return std::nullopt;
    }
    if (auto k = numbered(id, 's')) return Operand::slot(*k);
    if (auto k = numbered(id, 'f')) return Operand::fifo(*k);
    if (auto k = numbered(id, 'r')) return Operand::sreg(*k);
    pending_labels_.push_back({pc, {id, c_line_, col}});
    return Operand::label(kUnresolved);
  }

  void instruction(Cursor& c) {
    c_line_ = c.line();
    Instruction in;
    const std::size_t pc = p_.code.size();

    // Destination vregs are defined after the sources are read so that a
    // line cannot use its own result.
    struct PendingDef {
      std::size_t slot;
      std::string raw;
      std::size_t col;
    };
    std::vector<PendingDef> defs;
    bool has_dst = true;
    if (ident_start(c.peek())) {
      Cursor probe = c;
      if (opcode_from_mnemonic(probe.ident()) && probe.peek() != '=' &&
          probe.peek() != ',') {
        has_dst = false;
      }
    }
    if (has_dst) {
      do {
        const std::size_t col = c.col();
        if (c.accept('%')) {
          defs.push_back({in.dst.size(), c.name(), col});
          in.dst.push_back(Operand::vreg(0));
          continue;
        }
        std::optional<std::uint32_t> m;
        auto o = item(c, m, pc);
        if (!o) c.error_at(col, "modulus is not a destination");
        if (o->kind == OperandKind::Imm || o->kind == OperandKind::Label) {
          c.error_at(col, "bad destination");
        }
        in.dst.push_back(*o);
      } while (c.accept(','));
      c.expect('=');
    }
    const std::size_t op_col = c.col();
    const std::string mn = c.ident();
    const auto op = opcode_from_mnemonic(mn);
    if (!op) c.error_at(op_col, "unknown opcode '" + mn + "'");
    in.op = *op;

    std::optional<std::uint32_t> mod;
    bool arrow = false;
    if (!c.done() && c.peek() != '!') {
      for (;;) {
        const std::size_t col = c.col();
        std::optional<std::uint32_t> m;
        auto o = item(c, m, pc);
        if (o) {
          if (mod || arrow || !in.from.empty()) c.error_at(col, "operand after modulus");
          in.src.push_back(*o);
        } else if (in.op == Opcode::BCONV) {
          (arrow ? in.to : in.from).push_back(*m);
        } else {
          if (mod) c.error_at(col, "duplicate modulus");
          mod = m;
        }
        if (c.accept("->")) {
          if (arrow || in.op != Opcode::BCONV) c.error("unexpected '->'");
          arrow = true;
          continue;
        }
        if (!c.accept(',')) break;
      }
    }
    if (is_vector(in.op) && in.op != Opcode::BCONV) {
      if (!mod) c.error("missing modulus");
      in.modulus = *mod;
    }
    if (in.op == Opcode::BCONV && (!arrow || in.to.empty())) {
      c.error("bconv needs '-> target moduli'");
    }
    while (c.accept('!')) {
      const std::size_t col = c.col();
      const std::string f = c.ident();
      if (f == "defer") in.flags |= flag::kDefer;
      else if (f == "absorb") in.flags |= flag::kAbsorb;
      else if (f == "sub") in.flags |= flag::kSub;
      else if (f == "bc1") in.flags |= flag::kBconv1;
      else if (f == "bc2") in.flags |= flag::kBconv2;
      else if (auto g = numbered(f, 'g')) in.group = static_cast<std::int32_t>(*g);
      else if (auto t = numbered(f, 't')) issue_[pc] = *t;
      else c.error_at(col, "unknown flag !" + f);
    }
    if (!c.done()) c.error("unexpected text");

    // `store @addr, value, q` keeps the address in dst.
    if (in.op == Opcode::STORE) {
      if (in.src.size() != 2 || !in.dst.empty()) {
        c.error_at(op_col, "store expects an address and a value");
      }
      in.dst.push_back(in.src[0]);
      in.src.erase(in.src.begin());
    }
    if (in.group >= 0 && static_cast<std::size_t>(in.group) >= p_.groups.size()) {
      c.error_at(op_col, "unknown group g" + std::to_string(in.group));
    }
    check_shape(c, in, op_col);
    for (const auto& d : defs) in.dst[d.slot] = define_vreg(c, d.raw, d.col);
    p_.code.push_back(std::move(in));
  }

  // Arity and operand kinds, reported at the opcode column.
  void check_shape(Cursor& c, const Instruction& in, std::size_t op_col) {
    Program one;
    one.moduli = p_.moduli;
    one.symbols = p_.symbols;
    Instruction copy = in;
    for (auto* ops : {&copy.src, &copy.dst}) {
      for (auto& o : *ops) {
        if (o.kind == OperandKind::Label) o.index = 0;
        if (o.kind == OperandKind::VReg) o.kind = OperandKind::Slot;
      }
    }
    one.code.push_back(copy);
    try {
      validate(one);
    } catch (const StructuralError& e) {
      std::string msg = e.what();
      const std::string prefix = "instruction 0: ";
      if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
      c.error_at(op_col, msg);
    }
  }

  struct LoopFrame {
    std::string var;
    std::int64_t value;
    std::map<std::string, std::string> renames;
  };

  std::vector<Line> lines_;
  Program p_;
  std::map<std::string, std::uint32_t> vreg_ids_;
  std::vector<std::size_t> def_line_;
  std::map<std::string, std::size_t> labels_;
  std::vector<std::pair<std::size_t, LabelRef>> pending_labels_;
  std::vector<LoopFrame> loops_;
  std::map<std::size_t, std::uint64_t> issue_;
  std::size_t c_line_ = 0;

 public:
  const std::map<std::size_t, std::uint64_t>& issue() const { return issue_; }
};

std::string signed_str(Word v) { return std::to_string(static_cast<std::int64_t>(v)); }

std::string vreg_label(const Program& p, std::uint32_t id,
                       const std::vector<bool>& unique) {
  if (id < p.vreg_names.size() && unique[id]) return "%" + p.vreg_names[id];
  return "%__v" + std::to_string(id);
}

std::vector<bool> unique_names(const Program& p) {
  std::map<std::string, int> count;
  for (const auto& n : p.vreg_names) ++count[n];
  std::vector<bool> u(p.vreg_names.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& n = p.vreg_names[i];
    u[i] = !n.empty() && count[n] == 1 && n.rfind("__v", 0) != 0;
  }
  return u;
}

std::string operand_text(const Program& p, const Operand& o, const std::vector<bool>& uniq,
                         const std::map<std::size_t, std::string>& label_names,
                         bool signed_imm) {
  switch (o.kind) {
    case OperandKind::None: return "_";
    case OperandKind::VReg: return vreg_label(p, o.index, uniq);
    case OperandKind::Slot: return "s" + std::to_string(o.index);
    case OperandKind::Fifo: return "f" + std::to_string(o.index);
    case OperandKind::SReg: return "r" + std::to_string(o.index);
    case OperandKind::Label: {
      auto it = label_names.find(o.index);
      return it != label_names.end() ? it->second : "L" + std::to_string(o.index);
    }
    case OperandKind::Imm:
      if (signed_imm) return signed_str(o.imm);
      return std::to_string(o.imm) + ":" + rns::to_string(o.form);
    case OperandKind::Mem: {
      std::string s = "@" + (o.addr.symbol < p.symbols.size()
                                 ? p.symbols[o.addr.symbol].name
                                 : std::string("?"));
      s += "[";
      if (o.addr.sreg >= 0) {
        s += "r" + std::to_string(o.addr.sreg);
        if (o.addr.scale != 1) s += "*" + std::to_string(o.addr.scale);
        if (o.addr.offset > 0) s += "+" + std::to_string(o.addr.offset);
        if (o.addr.offset < 0) s += std::to_string(o.addr.offset);
      } else {
        s += std::to_string(o.addr.offset);
      }
      return s + "]";
    }
  }
  return "?";
}

std::map<std::size_t, std::string> label_names(const Program& p) {
  std::map<std::size_t, std::string> names;
  for (const auto& in : p.code) {
    for (const auto& o : in.src) {
      if (o.kind == OperandKind::Label) names[o.index] = "L" + std::to_string(o.index);
    }
  }
  return names;
}

std::string instruction_text(const Program& p, const Instruction& in, std::size_t pc,
                             const std::vector<bool>& uniq,
                             const std::map<std::size_t, std::string>& labels) {
  std::ostringstream os;
  const bool scalar = is_scalar(in.op) || in.op == Opcode::AUTO;
  auto op_text = [&](const Operand& o, bool signed_imm) {
    return operand_text(p, o, uniq, labels, signed_imm);
  };
  if (in.op != Opcode::STORE && !in.dst.empty()) {
    for (std::size_t i = 0; i < in.dst.size(); ++i) {
      os << (i ? ", " : "") << op_text(in.dst[i], false);
    }
    os << " = ";
  }
  os << mnemonic(in.op);
  std::vector<std::string> parts;
  if (in.op == Opcode::STORE) {
    for (const auto& o : in.dst) parts.push_back(op_text(o, false));
  }
  for (const auto& o : in.src) parts.push_back(op_text(o, scalar));
  if (in.op == Opcode::BCONV) {
    for (auto m : in.from) parts.push_back("q" + std::to_string(m));
  } else if (is_vector(in.op)) {
    parts.push_back("q" + std::to_string(in.modulus));
  }
  for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? ", " : " ") << parts[i];
  if (in.op == Opcode::BCONV) {
    os << " ->";
    for (std::size_t i = 0; i < in.to.size(); ++i) {
      os << (i ? ", q" : " q") << in.to[i];
    }
  }
  if (in.has(flag::kDefer)) os << " !defer";
  if (in.has(flag::kAbsorb)) os << " !absorb";
  if (in.has(flag::kSub)) os << " !sub";
  if (in.has(flag::kBconv1)) os << " !bc1";
  if (in.has(flag::kBconv2)) os << " !bc2";
  if (in.group >= 0) os << " !g" << in.group;
  if (pc < p.issue.size()) os << " !t" << p.issue[pc];
  return os.str();
}

}  // namespace

Program parse_ir(std::string_view text) {
  Parser parser(text);
  Program p = parser.run();
  if (!parser.issue().empty()) {
    if (parser.issue().size() != p.code.size()) {
      throw ParseError(0, 0, "issue annotations (!t) must be on every instruction or none");
    }
    p.issue.resize(p.code.size());
    for (const auto& [pc, t] : parser.issue()) p.issue[pc] = t;
  }
  return p;
}

std::string print_operand(const Program& p, const Operand& o) {
  return operand_text(p, o, unique_names(p), label_names(p), false);
}

std::string print_instruction(const Program& p, const Instruction& in) {
  return instruction_text(p, in, static_cast<std::size_t>(-1), unique_names(p),
                          label_names(p));
}

std::string print(const Program& p) {
  std::ostringstream os;
  os << ".n " << p.n << "\n";
  os << ".form " << to_string(p.form) << "\n";
  for (std::size_t i = 0; i < p.moduli.size(); ++i) {
    os << ".modulus q" << i << " " << p.moduli[i] << "\n";
  }
  for (const auto& s : p.symbols) os << ".symbol " << s.name << " " << s.size << "\n";
  for (std::size_t g = 0; g < p.groups.size(); ++g) {
    os << ".group " << g;
    for (std::size_t i = 0; i < p.groups[g].from.size(); ++i) {
      os << (i ? ", q" : " q") << p.groups[g].from[i];
    }
    os << " ->";
    for (std::size_t i = 0; i < p.groups[g].to.size(); ++i) {
      os << (i ? ", q" : " q") << p.groups[g].to[i];
    }
    os << "\n";
  }
  const auto uniq = unique_names(p);
  const auto labels = label_names(p);
  for (std::size_t pc = 0; pc < p.code.size(); ++pc) {
    if (auto it = labels.find(pc); it != labels.end()) os << it->second << ":\n";
    os << instruction_text(p, p.code[pc], pc, uniq, labels) << "\n";
  }
  if (auto it = labels.find(p.code.size()); it != labels.end()) {
    os << it->second << ":\n";
  }
  return os.str();
}

}  // namespace effact::isa
