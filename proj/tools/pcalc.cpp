// Command line front end. One verb per subcommand; see README.md for the
// exit codes.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "pcalc/encodings.hpp"
#include "pcalc/equivalence.hpp"
#include "pcalc/syntax.hpp"

namespace {

using namespace pcalc;
using nlohmann::json;

constexpr int kUsage = 3;

// Raised for bad input; main turns it into a diagnostic and exit 3.
struct InputError {
  std::string message;
  std::string file;
  int line = 0;
  int column = 0;
  std::vector<std::string> expected;

  explicit InputError(std::string m, std::string f = {}, int l = 0, int col = 0, std::vector<std::string> e = {})
      : message(std::move(m)), file(std::move(f)), line(l), column(col), expected(std::move(e)) {}
};

struct Common {
  std::size_t budget_states = 20000;
  std::size_t budget_depth = 200;
  std::uint64_t fuel = 100000;
  bool json = false;
  std::string menu_file;
  std::vector<std::string> libs;
  std::vector<std::string> tuples;
  std::optional<std::size_t> default_arity;

  Budget budget() const { return {budget_states, budget_depth}; }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--budget-states", c.budget_states, "State budget")->capture_default_str();
  sub->add_option("--budget-depth", c.budget_depth, "Depth budget")->capture_default_str();
  sub->add_option("--fuel", c.fuel, "Evaluation fuel for function boxes")->capture_default_str();
  sub->add_flag("--json", c.json, "Machine-readable output");
  sub->add_option("--menu", c.menu_file, "Higher-order input menu, one term per line")
      ->check(CLI::ExistingFile);
  sub->add_option("--lib", c.libs, "Extra .rf definitions for function boxes")->check(CLI::ExistingFile);
  sub->add_option("--tuple", c.tuples, "Tuple offered to function boxes, e.g. 2,3");
  sub->add_option("--default-arity", c.default_arity,
                  "Arity assumed for unapplied process variables (higher-order to pi)");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError{"cannot read " + path, path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError{"cannot write " + path, path};
  out << text;
}

// what() of a SyntaxError without its "line L, column C: " prefix.
std::string syntax_message(const syntax::SyntaxError& e) {
  std::string w = e.what();
  auto colon = w.find(": ");
  return colon == std::string::npos ? w : w.substr(colon + 2);
}

template <class F>
auto parsing(const std::string& file, int line_offset, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const syntax::SyntaxError& e) {
    throw InputError{syntax_message(e), file, e.line() + line_offset, e.column(), e.expected()};
  } catch (const Error& e) {
    throw InputError{e.what(), file};
  }
}

syntax::FunEnv function_env(const Common& c) {
  syntax::FunEnv env = recfun::standard_library();
  for (auto& lib : c.libs) {
    auto text = slurp(lib);
    auto defs = parsing(lib, 0, [&] { return syntax::parse_rf(text, env); });
    for (auto& [k, v] : defs) env[k] = v;
  }
  return env;
}

AnyTerm parse_as(syntax::Calculus calc, const std::string& text, const std::string& file, int line_offset,
                 const syntax::FunEnv& env) {
  return parsing(file, line_offset, [&]() -> AnyTerm {
    switch (calc) {
      case syntax::Calculus::Pi: return syntax::parse_pi(text);
      case syntax::Calculus::Hopi: return syntax::parse_hopi(text);
      case syntax::Calculus::C: return syntax::parse_c(text, env);
      case syntax::Calculus::RecFun: break;
    }
    throw Error("expected a process file (.pi, .hopi or .cc)");
  });
}

syntax::Calculus calculus_of(const std::string& path) {
  try {
    return syntax::calculus_from_path(path);
  } catch (const Error& e) {
    throw InputError{e.what(), path};
  }
}

AnyTerm load_term(const std::string& path, const syntax::FunEnv& env) {
  return parse_as(calculus_of(path), slurp(path), path, 0, env);
}

// Files holding several terms: one per line, blank and comment lines skipped.
std::vector<AnyTerm> load_lines(const std::string& path, syntax::Calculus calc, const syntax::FunEnv& env) {
  std::vector<AnyTerm> out;
  std::istringstream in(slurp(path));
  std::string line;
  for (int n = 0; std::getline(in, line); ++n) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line.compare(first, 2, "//") == 0) continue;
    out.push_back(parse_as(calc, line, path, n, env));
  }
  return out;
}

Tuple parse_tuple(const std::string& s) {
  Tuple t;
  std::istringstream in(s);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      t.emplace_back(part);
    } catch (const std::exception&) {
      throw InputError{"bad tuple component '" + part + "' in --tuple " + s};
    }
  }
  return t;
}

ExploreOptions explore_options(const Common& c, const AnyTerm& t) {
  ExploreOptions o;
  o.budget = c.budget();
  o.fuel = c.fuel;
  for (auto& s : c.tuples) o.c_menu.push_back(parse_tuple(s));
  if (auto* p = std::get_if<pi::Term>(&t)) o.universe = pi::free_constants(*p);
  if (!c.menu_file.empty()) {
    std::vector<hopi::Term> payloads;
    for (auto& m : load_lines(c.menu_file, syntax::Calculus::Hopi, {})) payloads.push_back(std::get<hopi::Term>(m));
    o.menu = [payloads](const hopi::Term&) { return payloads; };
  }
  return o;
}

std::string print_any(const AnyTerm& t) {
  return std::visit([](const auto& x) { return syntax::print(x); }, t);
}

// ---------------------------------------------------------------------------
// Verbs.

int cmd_parse(const Common& c, const std::string& file) {
  auto env = function_env(c);
  if (calculus_of(file) == syntax::Calculus::RecFun) {
    auto text = slurp(file);
    auto defs = parsing(file, 0, [&] { return syntax::parse_rf(text, env); });
    json j = json::object();
    for (auto& [name, f] : defs) {
      auto prior = env.find(name);
      if (prior != env.end() && prior->second == f) continue;  // inherited, not defined here
      auto body = syntax::print(recfun::labelled(f, ""));
      if (c.json)
        j[name] = body;
      else
        std::cout << name << " = " << body << ";\n";
    }
    if (c.json) std::cout << j.dump() << "\n";
    return 0;
  }
  auto t = load_term(file, env);
  if (c.json)
    std::cout << json{{"calculus", std::string(syntax::calculus_name(calculus_of(file)))},
                      {"term", print_any(t)}}
                     .dump()
              << "\n";
  else
    std::cout << print_any(t) << "\n";
  return 0;
}

int cmd_step(const Common& c, const std::string& file) {
  auto t = load_term(file, function_env(c));
  auto o = explore_options(c, t);
  json arr = json::array();
  auto emit = [&](const Action& a, const std::string& target) {
    if (c.json)
      arr.push_back({{"action", label_key(a)}, {"target", target}});
    else
      std::cout << label_key(a) << " -> " << target << "\n";
  };
  if (auto* p = std::get_if<pi::Term>(&t)) {
    PiStepOptions so;
    so.universe = o.universe;
    for (auto& tr : step_pi(*p, so)) emit(tr.action, syntax::print(tr.target));
  } else if (auto* e = std::get_if<hopi::Term>(&t)) {
    for (auto& tr : step_hopi(*e, o.menu)) emit(tr.action, syntax::print(tr.target));
  } else {
    CStepOptions so;
    so.fuel = c.fuel;
    so.menu = o.c_menu;
    for (auto& tr : step_c(std::get<cc::Term>(t), so)) emit(tr.action, syntax::print(tr.target));
  }
  if (c.json) std::cout << arr.dump() << "\n";
  return 0;
}

int cmd_explore(const Common& c, const std::string& file, const std::string& dot, bool tau_only) {
  auto t = load_term(file, function_env(c));
  auto o = explore_options(c, t);
  o.tau_only = tau_only;
  Lts lts = std::visit([&](const auto& x) { return explore(x, o); }, t);
  if (!dot.empty()) write_file(dot, to_dot(lts));
  if (c.json)
    std::cout << to_json_lines(lts);
  else
    std::cout << "states " << lts.size() << ", transitions " << lts.edges.size() << ", "
              << (lts.exhausted ? "fully explored" : "budget reached") << "\n";
  return lts.exhausted ? 0 : 2;
}

int cmd_encode(const Common& c, const std::string& file, const std::string& from, const std::string& to,
               const std::string& out) {
  auto calc = calculus_of(file);
  auto t = load_term(file, function_env(c));
  std::string expect = std::string(syntax::calculus_name(calc));
  std::string result;
  if (from != "pi" && from != "c" && from != "hopi") throw InputError{"--from must be pi, c or hopi"};
  if ((from == "pi" && calc != syntax::Calculus::Pi) || (from == "c" && calc != syntax::Calculus::C) ||
      (from == "hopi" && calc != syntax::Calculus::Hopi))
    throw InputError{file + " is a " + expect + " file, not " + from, file};
  if (to == "hopi" && from == "pi")
    result = syntax::print(enc::encode_pi(std::get<pi::Term>(t)));
  else if (to == "hopi" && from == "c")
    result = syntax::print(enc::encode_c(std::get<cc::Term>(t)));
  else if (to == "pi" && from == "hopi")
    result = syntax::print(enc::encode_hopi(std::get<hopi::Term>(t), {c.default_arity}));
  else
    throw InputError{"no encoding from " + from + " to " + to};
  if (!out.empty())
    write_file(out, result + "\n");
  else if (c.json)
    std::cout << json{{"from", from}, {"to", to}, {"term", result}}.dump() << "\n";
  else
    std::cout << result << "\n";
  return 0;
}

int cmd_decode_nat(const Common& c, const std::string& file, const std::string& on) {
  auto t = load_term(file, function_env(c));
  auto* e = std::get_if<hopi::Term>(&t);
  if (!e) throw InputError{"decode-nat expects a .hopi file", file};
  hopi::Term numeral = *e;
  if (!on.empty()) {
    auto payload = enc::weak_output(*e, Name::constant(on), c.budget_states);
    if (!payload) {
      if (c.json)
        std::cout << json{{"ok", false}, {"reason", "no output on " + on + " within budget"}}.dump() << "\n";
      else
        std::cout << "no output on " << on << " within budget\n";
      return 2;
    }
    numeral = *payload;
  }
  auto d = enc::decode_nat(numeral, c.budget_states);
  if (c.json) {
    json j{{"ok", d.ok}};
    if (d.ok)
      j["value"] = d.value.str();
    else
      j["reason"] = d.reason;
    std::cout << j.dump() << "\n";
  } else if (d.ok) {
    std::cout << d.value << "\n";
  } else {
    std::cout << "not a numeral: " << d.reason << "\n";
  }
  return d.ok ? 0 : 1;
}

int cmd_eval_rf(const Common& c, const std::string& file, const std::string& fun, const std::string& args) {
  auto env = function_env(c);
  recfun::Fun f;
  if (!file.empty()) {
    if (calculus_of(file) != syntax::Calculus::RecFun) throw InputError{"eval-rf expects a .rf file", file};
    auto text = slurp(file);
    auto defs = parsing(file, 0, [&] { return syntax::parse_rf(text, env); });
    for (auto& [k, v] : defs) env[k] = v;
  }
  if (env.count(fun))
    f = env.at(fun);
  else
    f = parsing("<expression>", 0, [&] { return syntax::parse_rf_expr(fun, env); });
  Tuple tuple = args.empty() ? Tuple{} : parse_tuple(args);
  auto r = parsing(file, 0, [&] {
    if (recfun::arity_check(f) != static_cast<int>(tuple.size()))
      throw Error("arity mismatch: " + fun + " takes " + std::to_string(recfun::arity_check(f)) +
                  " arguments, got " + std::to_string(tuple.size()));
    return recfun::eval(f, tuple, c.fuel);
  });
  std::string status = r.defined() ? "defined" : r.status == recfun::EvalResult::Status::Undefined
                                                     ? "undefined"
                                                     : "out-of-fuel";
  std::optional<std::string> proof;
  if (!r.defined()) proof = recfun::prove_undefined(f, tuple);
  if (c.json) {
    json j{{"status", status}, {"steps", r.steps}};
    if (r.defined()) j["value"] = r.value.str();
    if (proof) j["undefined_because"] = *proof;
    std::cout << j.dump() << "\n";
  } else if (r.defined()) {
    std::cout << r.value << "\n";
  } else {
    std::cout << status << " after " << r.steps << " steps";
    if (proof) std::cout << "; undefined: " << *proof;
    std::cout << "\n";
  }
  if (r.defined()) return 0;
  return proof ? 1 : 2;
}

int cmd_check_bisim(const Common& c, const std::string& a, const std::string& b, bool div_sensitive,
                    bool direct) {
  auto env = function_env(c);
  auto ca = calculus_of(a), cb = calculus_of(b);
  if (ca != cb) throw InputError{"check-bisim needs two files of the same calculus"};
  auto p = load_term(a, env), q = load_term(b, env);
  auto o = explore_options(c, p);
  eq::BisimOptions bo;
  // 0 and Omega have the same visible behaviour; only divergence separates them.
  bo.divergence_sensitive = div_sensitive || ca == syntax::Calculus::C;
  eq::Verdict v;
  if (auto* pp = std::get_if<pi::Term>(&p)) {
    auto& qq = std::get<pi::Term>(q);
    auto fq = pi::free_constants(qq);
    o.universe.insert(fq.begin(), fq.end());
    v = eq::check_pi(*pp, qq, o, bo);
  } else if (auto* pe = std::get_if<hopi::Term>(&p)) {
    if (direct)
      v = eq::check_hopi(*pe, std::get<hopi::Term>(q), o, bo);
    else
      v = eq::hopi_ctx_bisim(*pe, std::get<hopi::Term>(q), c.budget(), {c.default_arity});
  } else {
    v = eq::check_c(std::get<cc::Term>(p), std::get<cc::Term>(q), o, bo);
  }
  std::cout << eq::to_json(v) << "\n";
  switch (v.kind) {
    case eq::Verdict::Kind::Equivalent: return 0;
    case eq::Verdict::Kind::Distinguished: return 1;
    case eq::Verdict::Kind::Inconclusive: return 2;
  }
  return 2;
}

int cmd_check_criteria(const Common& c, const std::string& encoder, const std::vector<std::string>& files,
                       std::uint64_t seed) {
  auto e = enc::parse_encoder(encoder);
  if (!e) throw InputError{"unknown encoder '" + encoder + "' (pi-hopi, c-hopi or hopi-pi)"};
  auto source = *e == enc::Encoder::PiToHopi ? syntax::Calculus::Pi
                : *e == enc::Encoder::CToHopi ? syntax::Calculus::C
                                              : syntax::Calculus::Hopi;
  auto env = function_env(c);
  std::vector<AnyTerm> samples;
  for (auto& f : files) {
    if (calculus_of(f) != source)
      throw InputError{f + " does not hold " + std::string(syntax::calculus_name(source)) + " terms", f};
    for (auto& t : load_lines(f, source, env)) samples.push_back(std::move(t));
  }
  enc::CriteriaOptions co;
  co.seed = seed;
  // The generic budget defaults suit single explorations; the criteria run
  // many of them, so keep their own default unless asked.
  if (c.budget_states != 20000) co.budget.max_states = c.budget_states;
  if (c.budget_depth != 200) co.budget.max_depth = c.budget_depth;
  if (!c.tuples.empty()) {
    co.c_menu.clear();
    for (auto& s : c.tuples) co.c_menu.push_back(parse_tuple(s));
  }
  co.hopi_to_pi.default_arity = c.default_arity;
  auto reports = enc::check_criteria(*e, samples, co);
  bool fail = false, inconclusive = false;
  for (auto& r : reports) {
    fail |= r.outcome == enc::EncodingReport::Outcome::Fail;
    inconclusive |= r.outcome == enc::EncodingReport::Outcome::Inconclusive;
  }
  if (c.json) {
    std::cout << enc::to_json(reports) << "\n";
  } else {
    for (auto& r : reports) {
      std::cout << r.sample << "\t" << enc::criterion_name(r.criterion) << "\t" << enc::outcome_name(r.outcome);
      if (!r.note.empty()) std::cout << "\t" << r.note;
      for (auto& w : r.witness) std::cout << "\n\twitness: " << w;
      std::cout << "\n";
    }
  }
  return fail ? 1 : inconclusive ? 2 : 0;
}

int cmd_check_lemma(const Common& c, const std::string& lemma, const std::vector<std::string>& files) {
  if (lemma != "padding") throw InputError{"unknown property '" + lemma + "' (known: padding)"};
  bool all = true;
  json arr = json::array();
  for (auto& f : files) {
    if (calculus_of(f) != syntax::Calculus::Pi) throw InputError{"padding takes .pi files", f};
    for (auto& t : load_lines(f, syntax::Calculus::Pi, {})) {
      auto& p = std::get<pi::Term>(t);
      enc::PaddingReport r;
      try {
        r = enc::check_tau_padding(p);
      } catch (const Error& e) {
        throw InputError{e.what(), f};
      }
      all &= r.pass();
      if (c.json) {
        arr.push_back(json::parse(enc::to_json(r)));
        continue;
      }
      std::cout << r.source << ": " << (r.pass() ? "ok" : "FAIL") << "\n";
      for (auto& k : r.cases) {
        std::cout << "  " << k.clause << " " << k.source_label << ":";
        for (auto& l : k.path) std::cout << " " << l;
        if (!k.ok) std::cout << "  (" << k.note << ")";
        std::cout << "\n";
      }
    }
  }
  if (c.json) std::cout << arr.dump() << "\n";
  return all ? 0 : 1;
}

void report(const InputError& e, bool as_json) {
  if (as_json) {
    json j{{"error", e.message}};
    if (!e.file.empty()) j["file"] = e.file;
    if (e.line) {
      j["line"] = e.line;
      j["column"] = e.column;
      j["expected"] = e.expected;
    }
    std::cout << j.dump() << "\n";
    return;
  }
  std::string where = e.file;
  if (e.line) where += ":" + std::to_string(e.line) + ":" + std::to_string(e.column);
  std::cerr << "pcalc: " << (where.empty() ? "" : where + ": ") << e.message << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Process calculi workbench"};
  app.require_subcommand(1);
  Common c;
  std::string file, file2, dot, from, to, out, on, fun, args, encoder, lemma;
  std::vector<std::string> files;
  bool tau_only = false, div_sensitive = false, direct = false;
  std::uint64_t seed = 1;

  auto* parse = app.add_subcommand("parse", "Parse a file and print it back");
  parse->add_option("file", file)->required();
  add_common(parse, c);

  auto* step = app.add_subcommand("step", "List the one-step transitions");
  step->add_option("file", file)->required();
  add_common(step, c);

  auto* expl = app.add_subcommand("explore", "Explore the transition graph within budget");
  expl->add_option("file", file)->required();
  expl->add_option("--dot", dot, "Write the graph in dot format");
  expl->add_flag("--tau-only", tau_only, "Follow internal steps only");
  add_common(expl, c);

  auto* encode = app.add_subcommand("encode", "Translate between calculi");
  encode->add_option("file", file)->required();
  encode->add_option("--from", from)->required();
  encode->add_option("--to", to)->required();
  encode->add_option("-o,--out", out, "Output file");
  add_common(encode, c);

  auto* decode = app.add_subcommand("decode-nat", "Read a numeral back");
  decode->add_option("file", file)->required();
  decode->add_option("--on", on, "Decode the first weak output on this channel instead");
  add_common(decode, c);

  auto* evalrf = app.add_subcommand("eval-rf", "Evaluate a recursive function");
  evalrf->add_option("fun", fun, "Function name or expression")->required();
  evalrf->add_option("args", args, "Comma separated arguments");
  evalrf->add_option("-f,--file", file, "Definitions (.rf)");
  add_common(evalrf, c);

  auto* bisim = app.add_subcommand("check-bisim", "Weak bisimilarity of two terms");
  bisim->add_option("first", file)->required();
  bisim->add_option("second", file2)->required();
  bisim->add_flag("--divergence-sensitive", div_sensitive);
  bisim->add_flag("--direct", direct, "Higher-order: match labels directly instead of translating");
  add_common(bisim, c);

  auto* crit = app.add_subcommand("check-criteria", "Encoding criteria on sample terms");
  crit->add_option("--encoder", encoder, "pi-hopi, c-hopi or hopi-pi")->required();
  crit->add_option("--seed", seed)->capture_default_str();
  crit->add_option("files", files, "Samples, one term per line")->required();
  add_common(crit, c);

  auto* lem = app.add_subcommand("check-lemma", "Check a structural property of an encoding");
  lem->add_option("property", lemma, "padding")->required();
  lem->add_option("files", files, "pi terms, one per line")->required();
  add_common(lem, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  reset_fresh_counter();
  try {
    if (*parse) return cmd_parse(c, file);
    if (*step) return cmd_step(c, file);
    if (*expl) return cmd_explore(c, file, dot, tau_only);
    if (*encode) return cmd_encode(c, file, from, to, out);
    if (*decode) return cmd_decode_nat(c, file, on);
    if (*evalrf) return cmd_eval_rf(c, file, fun, args);
    if (*bisim) return cmd_check_bisim(c, file, file2, div_sensitive, direct);
    if (*crit) return cmd_check_criteria(c, encoder, files, seed);
    if (*lem) return cmd_check_lemma(c, lemma, files);
  } catch (const InputError& e) {
    report(e, c.json);
    return kUsage;
  } catch (const Error& e) {
    report(InputError{e.what()}, c.json);
    return kUsage;
  }
  return kUsage;
}
