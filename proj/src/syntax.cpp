#include "pcalc/syntax.hpp"

#include <cctype>
#include <set>

namespace pcalc::syntax {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += i + 1 == v.size() ? " or " : ", ";
    s += v[i];
  }
  return s;
}

}  // namespace

SyntaxError::SyntaxError(int line, int column, std::vector<std::string> expected, std::string found)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": expected " +
            join(expected) + ", found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

Calculus calculus_from_path(std::string_view path) {
  auto dot = path.rfind('.');
  auto ext = dot == std::string_view::npos ? std::string_view{} : path.substr(dot + 1);
  if (ext == "pi") return Calculus::Pi;
  if (ext == "hopi") return Calculus::Hopi;
  if (ext == "cc") return Calculus::C;
  if (ext == "rf") return Calculus::RecFun;
  throw Error("cannot tell the calculus of " + std::string(path) +
              " (expected .pi, .hopi, .cc or .rf)");
}

std::string_view calculus_name(Calculus c) {
  switch (c) {
    case Calculus::Pi:
      return "pi";
    case Calculus::Hopi:
      return "hopi";
    case Calculus::C:
      return "c";
    case Calculus::RecFun:
      return "recfun";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Lexer.

namespace {

struct Token {
  enum class Kind { Lower, Upper, Number, Sym, End };
  Kind kind;
  std::string text;
  int line;
  int col;
};

std::string describe(const Token& t) {
  if (t.kind == Token::Kind::End) return "end of input";
  return "'" + t.text + "'";
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t{Token::Kind::Sym, "", line, col};
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = std::isupper(static_cast<unsigned char>(c)) ? Token::Kind::Upper : Token::Kind::Lower;
      t.text = std::string(src.substr(i, j - i));
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Number;
      t.text = std::string(src.substr(i, j - i));
    } else if (src.substr(i, 2) == "->") {
      t.text = "->";
    } else if (std::string_view("()<>,.|![]=;").find(c) != std::string_view::npos) {
      t.text = std::string(1, c);
    } else {
      std::string found = "'";
      found += c;
      found += "'";
      throw SyntaxError(line, col, {"a name", "a symbol"}, found);
    }
    advance(t.text.size());
    out.push_back(std::move(t));
  }
  out.push_back({Token::Kind::End, "", line, col});
  return out;
}

class ParserBase {
 public:
  explicit ParserBase(std::string_view src) : toks_(lex(src)) {}

 protected:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(std::string_view sym, std::size_t k = 0) const {
    const auto& t = peek(k);
    return t.kind == Token::Kind::Sym && t.text == sym;
  }
  bool at_kind(Token::Kind kind, std::size_t k = 0) const { return peek(k).kind == kind; }
  bool accept(std::string_view sym) {
    if (!at(sym)) return false;
    ++pos_;
    return true;
  }
  void expect(std::string_view sym) {
    if (!accept(sym)) fail({"'" + std::string(sym) + "'"});
  }
  const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  std::string expect_kind(Token::Kind kind, const std::string& what) {
    if (!at_kind(kind)) fail({what});
    return take().text;
  }
  void expect_end() {
    if (!at_kind(Token::Kind::End)) fail({"end of input", "'|'"});
  }
  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const auto& t = peek();
    throw SyntaxError(t.line, t.col, std::move(expected), describe(t));
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Lexical scope of name binders: input and abstraction binders make
// variables, restrictions make constants.
class Scope {
 public:
  void push(const std::string& id, bool variable) { stack_.emplace_back(id, variable); }
  void pop(std::size_t n = 1) { stack_.resize(stack_.size() - n); }
  Name resolve(const std::string& id) const {
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
      if (it->first == id) return it->second ? Name::variable(id) : Name::constant(id);
    }
    return Name::constant(id);
  }

 private:
  std::vector<std::pair<std::string, bool>> stack_;
};

// ---------------------------------------------------------------------------
// pi

class PiParser : ParserBase {
 public:
  using ParserBase::ParserBase;

  pi::Term run() {
    auto t = proc();
    expect_end();
    return t;
  }

 private:
  Scope scope_;

  std::string name() { return expect_kind(Token::Kind::Lower, "a name"); }

  pi::Term proc() {
    std::vector<pi::Term> parts{prefix()};
    while (accept("|")) parts.push_back(prefix());
    return pi::par(std::move(parts));
  }

  pi::Term continuation() { return accept(".") ? prefix() : pi::nil(); }

  pi::Term prefix() {
    if (at_kind(Token::Kind::Number)) {
      if (peek().text != "0") fail({"'0'", "a prefix"});
      take();
      return pi::nil();
    }
    if (accept("!")) {
      auto a = scope_.resolve(name());
      if (accept("(")) return guarded_input(a, true);
      if (accept("!")) {
        auto b = scope_.resolve(name());
        return pi::rep_output(a, b, continuation());
      }
      fail({"'('", "'!'"});
    }
    if (at("(") && peek(1).kind == Token::Kind::Lower && peek(1).text == "new" &&
        peek(2).kind == Token::Kind::Lower) {
      take();
      take();
      std::vector<std::string> ids{name()};
      while (accept(",")) ids.push_back(name());
      expect(")");
      for (const auto& id : ids) scope_.push(id, false);
      auto body = prefix();
      scope_.pop(ids.size());
      for (auto it = ids.rbegin(); it != ids.rend(); ++it) body = pi::restrict(Name::constant(*it), body);
      return body;
    }
    if (accept("(")) {
      auto t = proc();
      expect(")");
      return t;
    }
    if (at_kind(Token::Kind::Lower)) {
      auto a = scope_.resolve(name());
      if (accept("(")) return guarded_input(a, false);
      if (accept("!")) {
        auto b = scope_.resolve(name());
        return pi::output(a, b, continuation());
      }
      fail({"'('", "'!'"});
    }
    fail({"'0'", "a name", "'!'", "'('"});
  }

  pi::Term guarded_input(const Name& a, bool rep) {
    auto x = name();
    expect(")");
    scope_.push(x, true);
    auto body = continuation();
    scope_.pop();
    auto v = Name::variable(x);
    return rep ? pi::rep_input(a, v, body) : pi::input(a, v, body);
  }
};

// ---------------------------------------------------------------------------
// higher-order pi

class HopiParser : ParserBase {
 public:
  using ParserBase::ParserBase;

  hopi::Term run() {
    auto t = proc();
    expect_end();
    return t;
  }

 private:
  Scope scope_;

  std::string name() { return expect_kind(Token::Kind::Lower, "a name"); }

  std::vector<std::string> name_list(std::string_view close) {
    std::vector<std::string> ids;
    if (at(close)) return ids;
    ids.push_back(name());
    while (accept(",")) ids.push_back(name());
    return ids;
  }

  hopi::Term applications(hopi::Term head) {
    while (accept("<")) {
      std::vector<Name> args;
      for (const auto& id : name_list(">")) args.push_back(scope_.resolve(id));
      expect(">");
      head = hopi::application(head, std::move(args));
    }
    return head;
  }

  hopi::Term proc() {
    std::vector<hopi::Term> parts{prefix()};
    while (accept("|")) parts.push_back(prefix());
    return hopi::par(std::move(parts));
  }

  hopi::Term continuation() { return accept(".") ? prefix() : hopi::nil(); }

  hopi::Term atom() {
    if (at_kind(Token::Kind::Number) && peek().text == "0") {
      take();
      return hopi::nil();
    }
    if (at_kind(Token::Kind::Upper)) return applications(hopi::var(take().text));
    if (accept("(")) {
      auto t = proc();
      expect(")");
      return applications(t);
    }
    fail({"'0'", "a process variable", "'('"});
  }

  hopi::Term prefix() {
    if (at_kind(Token::Kind::Number)) {
      if (peek().text != "0") fail({"'0'", "a prefix"});
      take();
      return hopi::nil();
    }
    if (at_kind(Token::Kind::Upper)) return applications(hopi::var(take().text));
    if (accept("!")) return hopi::replicate(prefix());
    if (accept("<")) {
      auto ids = name_list(">");
      expect(">");
      if (ids.empty()) fail({"a parameter name"});
      std::set<std::string> distinct(ids.begin(), ids.end());
      if (distinct.size() != ids.size()) throw ArityError("repeated abstraction parameter");
      for (const auto& id : ids) scope_.push(id, true);
      auto body = prefix();
      scope_.pop(ids.size());
      std::vector<Name> params;
      for (const auto& id : ids) params.push_back(Name::variable(id));
      return hopi::abstraction(std::move(params), body);
    }
    if (at("(") && peek(1).kind == Token::Kind::Lower && peek(1).text == "new" &&
        peek(2).kind == Token::Kind::Lower) {
      take();
      take();
      auto ids = name_list(")");
      expect(")");
      for (const auto& id : ids) scope_.push(id, false);
      auto body = prefix();
      scope_.pop(ids.size());
      std::vector<Name> cs;
      for (const auto& id : ids) cs.push_back(Name::constant(id));
      return hopi::restrict_all(cs, body);
    }
    if (accept("(")) {
      auto t = proc();
      expect(")");
      return applications(t);
    }
    if (at_kind(Token::Kind::Lower)) {
      auto a = scope_.resolve(name());
      if (accept("(")) {
        auto x = expect_kind(Token::Kind::Upper, "a process variable");
        expect(")");
        return hopi::input(a, x, continuation());
      }
      if (accept("!")) {
        auto payload = atom();
        return hopi::output(a, payload, continuation());
      }
      fail({"'('", "'!'"});
    }
    fail({"'0'", "a name", "a process variable", "'!'", "'<'", "'('"});
  }
};

// ---------------------------------------------------------------------------
// recursive functions

class RfParser : protected ParserBase {
 public:
  RfParser(std::string_view src, const FunEnv& env) : ParserBase(src), env_(env) {}

  recfun::Fun run_expr() {
    auto f = expr();
    expect_end();
    recfun::arity_check(f);
    return f;
  }

  FunEnv run_defs() {
    while (!at_kind(Token::Kind::End)) {
      auto id = expect_kind(Token::Kind::Lower, "a definition name");
      expect("=");
      auto f = expr();
      recfun::arity_check(f);
      env_[id] = recfun::labelled(f, id);
      accept(";");
    }
    return env_;
  }

 protected:
  FunEnv env_;

  int number() {
    auto s = expect_kind(Token::Kind::Number, "a number");
    if (s.size() > 6) fail({"a small number"});
    return std::stoi(s);
  }

  recfun::Fun expr() {
    if (!at_kind(Token::Kind::Lower)) fail({"a function expression"});
    auto id = take().text;
    if (id == "succ") return recfun::succ();
    if (id == "zero") {
      expect("(");
      int n = number();
      expect(")");
      return recfun::zero(n);
    }
    if (id == "proj") {
      expect("(");
      int i = number();
      expect(",");
      int n = number();
      expect(")");
      return recfun::proj(i, n);
    }
    if (id == "comp") {
      expect("(");
      auto outer = expr();
      std::vector<recfun::Fun> inners;
      while (accept(",")) inners.push_back(expr());
      expect(")");
      return recfun::comp(outer, std::move(inners));
    }
    if (id == "primrec") {
      expect("(");
      auto base = expr();
      expect(",");
      auto step = expr();
      expect(")");
      return recfun::primrec(base, step);
    }
    if (id == "mu") {
      expect("(");
      auto body = expr();
      expect(")");
      return recfun::mu(body);
    }
    auto it = env_.find(id);
    if (it == env_.end()) throw Error("unknown function " + id);
    return it->second;
  }
};

// ---------------------------------------------------------------------------
// computation calculus

class CParser : RfParser {
 public:
  using RfParser::RfParser;

  cc::Term run() {
    auto t = proc();
    expect_end();
    cc::check_well_formed(t);
    return t;
  }

 private:
  cc::Term proc() {
    std::vector<cc::Term> parts{atom()};
    while (accept("|")) parts.push_back(atom());
    return cc::par(std::move(parts));
  }

  recfun::Natural value() {
    return recfun::Natural(expect_kind(Token::Kind::Number, "a natural number"));
  }

  cc::Term atom() {
    if (at_kind(Token::Kind::Number)) {
      if (peek().text != "0") fail({"'0'"});
      take();
      return cc::nil();
    }
    if (at_kind(Token::Kind::Upper) && peek().text == "Omega") {
      take();
      return cc::omega();
    }
    if (at_kind(Token::Kind::Upper) && peek().text == "F") {
      take();
      expect("[");
      auto a = Name::constant(expect_kind(Token::Kind::Lower, "a name"));
      expect("->");
      auto b = Name::constant(expect_kind(Token::Kind::Lower, "a name"));
      expect("]");
      expect("(");
      bool named = at_kind(Token::Kind::Lower) && at(")", 1) && env_.count(peek().text);
      std::string label = named ? peek().text : "";
      auto f = expr();
      expect(")");
      if (recfun::arity_check(f) < 1) {
        throw ArityError("function box " + recfun::show(f) + " must consume at least one value");
      }
      return cc::func_box(a, b, named ? label : recfun::show(f), f);
    }
    if (accept("(")) {
      auto t = proc();
      expect(")");
      return t;
    }
    if (at_kind(Token::Kind::Lower)) {
      auto a = Name::constant(take().text);
      expect("!");
      std::vector<recfun::Natural> vs;
      if (accept("(")) {
        vs.push_back(value());
        while (accept(",")) vs.push_back(value());
        expect(")");
      } else {
        vs.push_back(value());
      }
      return cc::out(a, std::move(vs));
    }
    fail({"'0'", "'Omega'", "'F'", "a name", "'('"});
  }
};

// ---------------------------------------------------------------------------
// Readable renaming.

bool is_keyword(const std::string& id) { return id == "new"; }

class NamePicker {
 public:
  void reserve(const std::string& id) { taken_.insert(id); }

  std::string pick(const std::string& raw, bool upper) {
    std::string stem;
    for (char c : stem_of(raw)) {
      if (ident_char(c)) stem += c;
    }
    while (!stem.empty() && !std::isalpha(static_cast<unsigned char>(stem.front()))) stem.erase(0, 1);
    if (stem.empty()) stem = upper ? "X" : "n";
    stem.front() = static_cast<char>(upper ? std::toupper(static_cast<unsigned char>(stem.front()))
                                           : std::tolower(static_cast<unsigned char>(stem.front())));
    std::string cand = stem;
    for (int k = 1; taken_.count(cand) || is_keyword(cand); ++k) cand = stem + std::to_string(k);
    taken_.insert(cand);
    return cand;
  }

 private:
  std::set<std::string> taken_;
};

Name map_name(const std::map<Name, Name>& m, const Name& n) {
  auto it = m.find(n);
  return it == m.end() ? n : it->second;
}

// Builds the renaming: generated names, and variables sharing an identifier
// with some constant.
std::map<Name, Name> readable_map(const NameSet& names, const std::set<std::string>& proc_ids,
                                  std::map<std::string, std::string>* proc_map) {
  NamePicker picker;
  std::set<std::string> const_ids;
  for (const auto& n : names) {
    if (!n.is_generated()) picker.reserve(n.id);
    if (n.is_constant()) const_ids.insert(n.id);
  }
  for (const auto& p : proc_ids) {
    if (!p.empty() && p.front() != '#') picker.reserve(p);
  }
  std::map<Name, Name> m;
  for (const auto& n : names) {
    bool clash = n.is_variable() && const_ids.count(n.id);
    if (n.is_generated() || clash) m[n] = Name{n.sort, picker.pick(n.id, false)};
  }
  if (proc_map) {
    for (const auto& p : proc_ids) {
      if (!p.empty() && p.front() == '#') (*proc_map)[p] = picker.pick(p, true);
    }
  }
  return m;
}

pi::Term raw_rename(const pi::Term& t, const std::map<Name, Name>& m) {
  using K = pi::Kind;
  switch (t->kind) {
    case K::Nil:
      return t;
    case K::Input:
      return pi::input(map_name(m, t->subject), map_name(m, t->object), raw_rename(t->body, m));
    case K::RepInput:
      return pi::rep_input(map_name(m, t->subject), map_name(m, t->object), raw_rename(t->body, m));
    case K::Output:
      return pi::output(map_name(m, t->subject), map_name(m, t->object), raw_rename(t->body, m));
    case K::RepOutput:
      return pi::rep_output(map_name(m, t->subject), map_name(m, t->object), raw_rename(t->body, m));
    case K::Restrict:
      return pi::restrict(map_name(m, t->object), raw_rename(t->body, m));
    case K::Par: {
      std::vector<pi::Term> parts;
      for (const auto& p : t->parts) parts.push_back(raw_rename(p, m));
      return pi::par(std::move(parts));
    }
  }
  return t;
}

void proc_ids_of(const hopi::Term& t, std::set<std::string>& out) {
  if (!t) return;
  if (t->kind == hopi::Kind::Var || t->kind == hopi::Kind::In) out.insert(t->var);
  proc_ids_of(t->payload, out);
  proc_ids_of(t->body, out);
  for (const auto& p : t->parts) proc_ids_of(p, out);
}

hopi::Term raw_rename(const hopi::Term& t, const std::map<Name, Name>& m,
                      const std::map<std::string, std::string>& pm) {
  using K = hopi::Kind;
  auto pv = [&pm](const std::string& v) {
    auto it = pm.find(v);
    return it == pm.end() ? v : it->second;
  };
  auto names = [&m](const std::vector<Name>& ns) {
    std::vector<Name> out;
    for (const auto& n : ns) out.push_back(map_name(m, n));
    return out;
  };
  switch (t->kind) {
    case K::Nil:
      return t;
    case K::Var:
      return hopi::var(pv(t->var));
    case K::In:
      return hopi::input(map_name(m, t->subject), pv(t->var), raw_rename(t->body, m, pm));
    case K::Out:
      return hopi::output(map_name(m, t->subject), raw_rename(t->payload, m, pm),
                          raw_rename(t->body, m, pm));
    case K::Par: {
      std::vector<hopi::Term> parts;
      for (const auto& p : t->parts) parts.push_back(raw_rename(p, m, pm));
      return hopi::par(std::move(parts));
    }
    case K::Res:
      return hopi::restrict(map_name(m, t->subject), raw_rename(t->body, m, pm));
    case K::Abs:
      return hopi::abstraction(names(t->names), raw_rename(t->body, m, pm));
    case K::App:
      return hopi::application(raw_rename(t->payload, m, pm), names(t->names));
    case K::Rep:
      return hopi::replicate(raw_rename(t->body, m, pm));
  }
  return t;
}

}  // namespace

pi::Term parse_pi(std::string_view src) { return PiParser(src).run(); }
hopi::Term parse_hopi(std::string_view src) { return HopiParser(src).run(); }
cc::Term parse_c(std::string_view src, const FunEnv& env) { return CParser(src, env).run(); }
FunEnv parse_rf(std::string_view src, const FunEnv& env) { return RfParser(src, env).run_defs(); }
recfun::Fun parse_rf_expr(std::string_view src, const FunEnv& env) {
  return RfParser(src, env).run_expr();
}

pi::Term readable(const pi::Term& t) {
  auto m = readable_map(pi::all_names(t), {}, nullptr);
  return m.empty() ? t : raw_rename(t, m);
}

hopi::Term readable(const hopi::Term& t) {
  std::set<std::string> procs;
  proc_ids_of(t, procs);
  std::map<std::string, std::string> pm;
  auto m = readable_map(hopi::all_names(t), procs, &pm);
  return m.empty() && pm.empty() ? t : raw_rename(t, m, pm);
}

std::string print(const pi::Term& t) { return pi::show(readable(t)); }
std::string print(const hopi::Term& t) { return hopi::show(readable(t)); }
std::string print(const cc::Term& t) { return cc::show(t); }
std::string print(const recfun::Fun& f) { return recfun::show(f); }

}  // namespace pcalc::syntax
