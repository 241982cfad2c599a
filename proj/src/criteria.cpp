#include <algorithm>
#include <json.hpp>
#include <random>
#include <set>

#include "pcalc/encodings.hpp"
#include "pcalc/equivalence.hpp"
#include "pcalc/syntax.hpp"

namespace pcalc::enc {

using Report = EncodingReport;
using Criterion = EncodingReport::Criterion;
using Outcome = EncodingReport::Outcome;

std::string encoder_name(Encoder e) {
  switch (e) {
    case Encoder::PiToHopi:
      return "pi-hopi";
    case Encoder::CToHopi:
      return "c-hopi";
    case Encoder::HopiToPi:
      return "hopi-pi";
  }
  return "?";
}

std::optional<Encoder> parse_encoder(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), '>', '-');
  for (auto e : {Encoder::PiToHopi, Encoder::CToHopi, Encoder::HopiToPi})
    if (encoder_name(e) == t) return e;
  return std::nullopt;
}

std::string criterion_name(Criterion c) {
  switch (c) {
    case Criterion::Compositionality:
      return "compositionality";
    case Criterion::NameInvariance:
      return "name-invariance";
    case Criterion::ForthCorrespondence:
      return "forth-correspondence";
    case Criterion::BackCorrespondence:
      return "back-correspondence";
    case Criterion::DivergenceReflection:
      return "divergence-reflection";
  }
  return "?";
}

std::string outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Pass:
      return "pass";
    case Outcome::Fail:
      return "fail";
    case Outcome::Inconclusive:
      return "inconclusive";
    case Outcome::NotClaimed:
      return "not-claimed";
  }
  return "?";
}

std::string to_json(const std::vector<EncodingReport>& reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["criterion"] = criterion_name(r.criterion);
    j["verdict"] = outcome_name(r.outcome);
    j["sample"] = r.sample;
    j["witness"] = r.witness;
    j["note"] = r.note;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

// ---------------------------------------------------------------------------
// Padding.

bool PaddingReport::pass() const {
  return std::all_of(cases.begin(), cases.end(), [](const PaddingCase& c) { return c.ok; });
}

std::string to_json(const PaddingReport& r) {
  nlohmann::ordered_json j;
  j["source"] = r.source;
  j["pass"] = r.pass();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : r.cases) {
    nlohmann::ordered_json k;
    k["clause"] = c.clause;
    k["label"] = c.source_label;
    k["expected"] = c.expected;
    k["path"] = c.path;
    k["states"] = c.states;
    k["ok"] = c.ok;
    if (!c.note.empty()) k["note"] = c.note;
    arr.push_back(std::move(k));
  }
  j["cases"] = std::move(arr);
  return j.dump(2);
}

namespace {

bool has_replication(const pi::Term& t) {
  switch (t->kind) {
    case pi::Kind::RepInput:
    case pi::Kind::RepOutput:
      return true;
    case pi::Kind::Par:
      return std::any_of(t->parts.begin(), t->parts.end(), has_replication);
    case pi::Kind::Nil:
      return false;
    default:
      return has_replication(t->body);
  }
}

// One position of the expected target path.
struct Slot {
  enum class Kind { Aux, Source, In, Out } kind;
  Name subject;                   // In/Out; Source when free
  std::optional<Name> object;     // pipe carried by In/Out
  std::optional<Name> extruded;   // Out of a private name
};

std::string tau_label(const Action& a) { return a.via ? "tau[" + a.via->id + "]" : "tau"; }

bool fits(const Slot& s, const Action& a) {
  switch (s.kind) {
    case Slot::Kind::Aux:
      return a.is_tau() && a.via && is_auxiliary(*a.via);
    case Slot::Kind::Source:
      if (!a.is_tau() || !a.via || is_auxiliary(*a.via)) return false;
      return s.subject.id.empty() || *a.via == s.subject;
    case Slot::Kind::In:
      return a.kind == Action::Kind::HoIn && a.subject == s.subject &&
             hopi::alpha_equal(a.payload, make_pipe(*s.object));
    case Slot::Kind::Out: {
      if (a.kind != Action::Kind::HoOut || a.subject != s.subject) return false;
      if (!hopi::alpha_equal(a.payload, make_pipe(*s.object))) return false;
      if (s.extruded) return a.extruded == std::vector<Name>{*s.extruded};
      return a.extruded.empty();
    }
  }
  return false;
}

struct Node {
  hopi::Term term;
  std::string key;
  std::size_t parent;
  std::string label;
};

}  // namespace

PaddingReport check_tau_padding(const pi::Term& p, const NameSet& universe) {
  if (has_replication(p)) throw UnsupportedForm("replicated prefixes are encoded with extra arming steps");
  PaddingReport rep;
  rep.source = syntax::print(p);
  NameSet names = universe;
  auto fn = pi::free_constants(p);
  names.insert(fn.begin(), fn.end());
  PiStepOptions so;
  so.universe = names;
  auto root = canonical_state(encode_pi(p));
  auto menu = pipe_menu(names);

  for (const auto& tr : step_pi(p, so)) {
    PaddingCase c;
    const auto& a = tr.action;
    c.source_label = label_key(a);
    std::vector<Slot> slots;
    switch (a.kind) {
      case Action::Kind::PiIn:
        c.clause = "input";
        slots = {{Slot::Kind::Aux, {}, {}, {}}, {Slot::Kind::In, a.subject, a.object, {}},
                 {Slot::Kind::Aux, {}, {}, {}}};
        c.expected = {"tau", a.subject.id + "?", "tau"};
        break;
      case Action::Kind::PiOut:
        c.clause = "output";
        slots = {{Slot::Kind::Aux, {}, {}, {}}, {Slot::Kind::Aux, {}, {}, {}},
                 {Slot::Kind::Out, a.subject, a.object, {}}};
        c.expected = {"tau", "tau", a.subject.id + "!"};
        break;
      case Action::Kind::PiBoundOut:
        c.clause = "bound-output";
        slots = {{Slot::Kind::Aux, {}, {}, {}}, {Slot::Kind::Aux, {}, {}, {}},
                 {Slot::Kind::Out, a.subject, a.object, a.object}};
        c.expected = {"tau", "tau", a.subject.id + "!"};
        break;
      default: {
        c.clause = "tau";
        Slot src{Slot::Kind::Source, {}, {}, {}};
        if (a.via && !a.via->is_generated()) src.subject = *a.via;
        slots = {{Slot::Kind::Aux, {}, {}, {}}, {Slot::Kind::Aux, {}, {}, {}},
                 {Slot::Kind::Aux, {}, {}, {}}, src, {Slot::Kind::Aux, {}, {}, {}}};
        c.expected = {"tau", "tau", "tau", "tau[" + (src.subject.id.empty() ? "*" : src.subject.id) + "]",
                      "tau"};
        break;
      }
    }
    const auto goal = hopi::show(canonical_state(encode_pi(tr.target)));

    // Breadth-first over paths of the required shape, one node per state and
    // depth.
    std::vector<Node> nodes{{root, hopi::show(root), 0, ""}};
    std::vector<std::size_t> layer{0};
    for (std::size_t d = 0; d < slots.size() && !layer.empty(); ++d) {
      std::vector<std::size_t> next;
      std::set<std::string> seen;
      const bool wants_input = slots[d].kind == Slot::Kind::In;
      for (auto ni : layer) {
        auto cur = nodes[ni].term;
        for (const auto& st : step_hopi(cur, wants_input ? menu : HopiMenu{})) {
          if (!fits(slots[d], st.action)) continue;
          auto t = canonical_state(st.target);
          auto k = hopi::show(t);
          if (!seen.insert(k).second) continue;
          std::string lbl = st.action.is_tau() ? tau_label(st.action) : label_key(st.action);
          nodes.push_back({t, k, ni, lbl});
          next.push_back(nodes.size() - 1);
        }
      }
      layer = std::move(next);
    }
    for (auto ni : layer) {
      if (nodes[ni].key != goal) continue;
      c.ok = true;
      std::vector<std::size_t> chain;
      for (auto x = ni; x != 0; x = nodes[x].parent) chain.push_back(x);
      c.states.push_back(nodes[0].key);
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        c.path.push_back(nodes[*it].label);
        c.states.push_back(nodes[*it].key);
      }
      break;
    }
    if (!c.ok)
      c.note = layer.empty() ? "no target path of the expected shape"
                             : "paths of the expected shape miss the encoding of the residual";
    rep.cases.push_back(std::move(c));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Criteria.

namespace {

cc::Term rename_c(const cc::Term& t, const std::map<Name, Name>& m) {
  auto r = [&](const Name& n) {
    auto it = m.find(n);
    return it == m.end() ? n : it->second;
  };
  switch (t->kind) {
    case cc::Kind::Out:
      return cc::out(r(t->subject), t->values);
    case cc::Kind::FuncBox:
      return cc::func_box(r(t->subject), r(t->target), t->fun_name, t->fun);
    case cc::Kind::Par: {
      std::vector<cc::Term> parts;
      for (const auto& p : t->parts) parts.push_back(rename_c(p, m));
      return cc::par(parts);
    }
    default:
      return t;
  }
}

AnyTerm encode_any(Encoder e, const AnyTerm& t, const CriteriaOptions& o) {
  switch (e) {
    case Encoder::PiToHopi:
      return encode_pi(std::get<pi::Term>(t));
    case Encoder::CToHopi:
      return encode_c(std::get<cc::Term>(t));
    case Encoder::HopiToPi:
      return encode_hopi(std::get<hopi::Term>(t), o.hopi_to_pi);
  }
  throw Error("unknown encoder");
}

bool alpha_equal_any(const AnyTerm& a, const AnyTerm& b) {
  if (a.index() != b.index()) return false;
  if (auto p = std::get_if<pi::Term>(&a)) return pi::alpha_equal(*p, std::get<pi::Term>(b));
  if (auto h = std::get_if<hopi::Term>(&a)) return hopi::alpha_equal(*h, std::get<hopi::Term>(b));
  return cc::key(std::get<cc::Term>(a)) == cc::key(std::get<cc::Term>(b));
}

std::string print_any(const AnyTerm& t) {
  return std::visit([](const auto& x) { return syntax::print(x); }, t);
}

NameSet free_of(const AnyTerm& t) {
  if (auto p = std::get_if<pi::Term>(&t)) return pi::free_constants(*p);
  if (auto h = std::get_if<hopi::Term>(&t)) return hopi::free_constants(*h);
  return cc::free_names(std::get<cc::Term>(t));
}

AnyTerm rename_any(const AnyTerm& t, const std::map<Name, Name>& m) {
  if (auto p = std::get_if<pi::Term>(&t)) return pi::substitute(*p, m);
  if (auto h = std::get_if<hopi::Term>(&t)) return hopi::rename(*h, m);
  return rename_c(std::get<cc::Term>(t), m);
}

AnyTerm par_any(const AnyTerm& a, const AnyTerm& b) {
  if (auto p = std::get_if<pi::Term>(&a)) return pi::par(*p, std::get<pi::Term>(b));
  if (auto h = std::get_if<hopi::Term>(&a)) return hopi::par(*h, std::get<hopi::Term>(b));
  return cc::par(std::get<cc::Term>(a), std::get<cc::Term>(b));
}

std::optional<AnyTerm> restrict_any(const Name& c, const AnyTerm& a) {
  if (auto p = std::get_if<pi::Term>(&a)) return AnyTerm{pi::restrict(c, *p)};
  if (auto h = std::get_if<hopi::Term>(&a)) return AnyTerm{hopi::restrict(c, *h)};
  return std::nullopt;
}

eq::BarbSet barbs_any(const AnyTerm& t, const Budget& b) {
  return std::visit([&](const auto& x) { return eq::weak_barbs(x, b); }, t);
}

DivergenceResult divergence_any(const AnyTerm& t, const Budget& b) {
  return std::visit([&](const auto& x) { return detect_divergence(x, b); }, t);
}

std::string show_barb(const eq::Barb& b) { return b.subject.id + (b.output ? "!" : "?"); }

Name unused_name(const NameSet& avoid, const std::string& stem) {
  for (int k = 0;; ++k) {
    auto n = Name::constant(stem + std::to_string(k));
    if (!avoid.count(n)) return n;
  }
}

Report compositionality(Encoder e, const AnyTerm& s, const AnyTerm& other, const CriteriaOptions& o) {
  Report r{Criterion::Compositionality, Outcome::Pass, print_any(s), {}, ""};
  auto whole = encode_any(e, par_any(s, other), o);
  auto parts = par_any(encode_any(e, s, o), encode_any(e, other, o));
  if (!alpha_equal_any(whole, parts)) {
    r.outcome = Outcome::Fail;
    r.witness = {print_any(par_any(s, other)), print_any(whole), print_any(parts)};
    r.note = "parallel composition";
    return r;
  }
  auto c = unused_name(free_of(s), "c");
  if (auto res = restrict_any(c, s)) {
    auto lhs = encode_any(e, *res, o);
    auto rhs = *restrict_any(c, encode_any(e, s, o));
    if (!alpha_equal_any(lhs, rhs)) {
      r.outcome = Outcome::Fail;
      r.witness = {print_any(*res), print_any(lhs), print_any(rhs)};
      r.note = "restriction";
      return r;
    }
    r.note = "parallel composition and restriction";
  } else {
    r.note = "parallel composition";
  }
  return r;
}

Report name_invariance(Encoder e, const AnyTerm& s, const CriteriaOptions& o, std::mt19937_64& rng) {
  Report r{Criterion::NameInvariance, Outcome::Pass, print_any(s), {}, ""};
  auto fn = free_of(s);
  std::vector<Name> v(fn.begin(), fn.end());
  for (std::size_t round = 0; round < o.renamings; ++round) {
    // Injective: a random permutation of the free names, some of them moved
    // onto new names.
    auto img = v;
    std::shuffle(img.begin(), img.end(), rng);
    NameSet used = fn;
    std::map<Name, Name> m;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (rng() % 2) {
        img[i] = unused_name(used, "r");
        used.insert(img[i]);
      }
      m[v[i]] = img[i];
    }
    // Keep it injective: fresh images never collide, permuted ones are distinct.
    auto lhs = encode_any(e, rename_any(s, m), o);
    auto rhs = rename_any(encode_any(e, s, o), m);
    if (!alpha_equal_any(lhs, rhs)) {
      r.outcome = Outcome::Fail;
      std::string sigma;
      for (const auto& [a, b] : m) sigma += (sigma.empty() ? "" : ",") + a.id + "->" + b.id;
      r.witness = {"{" + sigma + "}", print_any(lhs), print_any(rhs)};
      return r;
    }
  }
  r.note = std::to_string(o.renamings) + " renamings";
  return r;
}

Report forth(Encoder e, const AnyTerm& s, const AnyTerm& t, const CriteriaOptions& o) {
  Report r{Criterion::ForthCorrespondence, Outcome::Pass, print_any(s), {}, ""};
  if (e == Encoder::PiToHopi && !has_replication(std::get<pi::Term>(s))) {
    auto pad = check_tau_padding(std::get<pi::Term>(s));
    for (const auto& c : pad.cases) {
      if (c.ok) continue;
      r.outcome = Outcome::Fail;
      r.witness = {c.source_label, c.note};
      return r;
    }
    r.note = std::to_string(pad.cases.size()) + " transitions replayed with their padding";
    return r;
  }

  auto tb = barbs_any(t, o.budget);
  std::vector<Action> moves;
  if (e == Encoder::PiToHopi) {
    for (auto& tr : step_pi(std::get<pi::Term>(s))) moves.push_back(tr.action);
  } else if (e == Encoder::HopiToPi) {
    for (auto& tr : step_hopi(std::get<hopi::Term>(s), pipe_menu())) moves.push_back(tr.action);
  } else {
    CStepOptions so;
    so.menu = o.c_menu;
    for (auto& tr : step_c(std::get<cc::Term>(s), so)) moves.push_back(tr.action);
  }
  bool target_moves_internally = false;
  if (std::any_of(moves.begin(), moves.end(), [](const Action& a) { return a.is_tau(); })) {
    auto has_tau = [](const auto& steps) {
      return std::any_of(steps.begin(), steps.end(), [](const auto& st) { return st.action.is_tau(); });
    };
    if (auto h = std::get_if<hopi::Term>(&t)) target_moves_internally = has_tau(step_hopi(*h));
    else target_moves_internally = has_tau(step_pi(std::get<pi::Term>(t)));
  }
  for (const auto& a : moves) {
    bool ok;
    if (a.is_tau()) {
      ok = target_moves_internally;
    } else {
      ok = tb.barbs.count(eq::Barb{a.subject, a.is_output()}) > 0;
      if (ok && a.kind == Action::Kind::COut && a.tuple.size() == 1) {
        // The numeral itself must come out; encoded outputs are not guarded.
        ok = false;
        for (const auto& st : step_hopi(std::get<hopi::Term>(t))) {
          if (st.action.kind != Action::Kind::HoOut || st.action.subject != a.subject) continue;
          auto d = decode_nat(st.action.payload);
          if (d.ok && d.value == a.tuple[0]) ok = true;
        }
      }
    }
    if (!ok) {
      r.outcome = tb.complete ? Outcome::Fail : Outcome::Inconclusive;
      r.witness = {label_key(a), print_any(t)};
      r.note = "no matching weak transition of the encoding";
      return r;
    }
  }
  r.note = std::to_string(moves.size()) + " transitions matched by subject";
  return r;
}

Report back(Encoder e, const AnyTerm& s, const AnyTerm& t, const CriteriaOptions& o) {
  Report r{Criterion::BackCorrespondence, Outcome::Pass, print_any(s), {}, ""};
  if (e == Encoder::CToHopi) {
    r.outcome = Outcome::NotClaimed;
    r.note = "back correspondence is not claimed for this encoding";
    return r;
  }
  auto sb = barbs_any(s, o.budget), tb = barbs_any(t, o.budget);
  for (const auto& b : tb.barbs) {
    if (is_auxiliary(b.subject) || sb.barbs.count(b)) continue;
    r.outcome = sb.complete ? Outcome::Fail : Outcome::Inconclusive;
    r.witness = {show_barb(b), print_any(t)};
    r.note = "barb of the encoding without a source counterpart";
    return r;
  }
  if (!tb.complete) {
    r.outcome = Outcome::Inconclusive;
    r.note = "internal closure of the encoding not explored in full";
    return r;
  }
  r.note = "weak barbs of the encoding are barbs of the source";
  return r;
}

Report divergence(const AnyTerm& s, const AnyTerm& t, const CriteriaOptions& o) {
  using V = DivergenceResult::Verdict;
  Report r{Criterion::DivergenceReflection, Outcome::Pass, print_any(s), {}, ""};
  auto dt = divergence_any(t, o.budget);
  if (dt.verdict == V::NoDivergenceWithinBudget) {
    r.note = "encoding does not diverge";
    return r;
  }
  if (dt.verdict == V::BudgetExhausted) {
    r.outcome = Outcome::Inconclusive;
    r.note = "budget exhausted on the encoding";
    return r;
  }
  auto ds = divergence_any(s, o.budget);
  if (ds.verdict == V::Divergent) {
    r.note = "both sides diverge";
  } else {
    r.outcome = ds.verdict == V::BudgetExhausted ? Outcome::Inconclusive : Outcome::Fail;
    r.witness = dt.witness;
    r.note = "encoding diverges, source does not";
  }
  return r;
}

}  // namespace

std::vector<EncodingReport> check_criteria(Encoder e, const std::vector<AnyTerm>& samples,
                                           const CriteriaOptions& opts) {
  std::vector<EncodingReport> out;
  std::mt19937_64 rng(opts.seed);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const auto& other = samples[(i + 1) % samples.size()];
    auto t = encode_any(e, s, opts);
    out.push_back(compositionality(e, s, other, opts));
    out.push_back(name_invariance(e, s, opts, rng));
    out.push_back(forth(e, s, t, opts));
    out.push_back(back(e, s, t, opts));
    out.push_back(divergence(s, t, opts));
  }
  return out;
}

}  // namespace pcalc::enc
