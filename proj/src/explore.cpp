#include <deque>
#include <json.hpp>
#include <set>

#include "pcalc/semantics.hpp"

namespace pcalc {

namespace detail {
std::vector<Transition<pi::Term>> step_pi_canonical(const pi::Term& p, const NameSet& universe);
std::vector<Transition<hopi::Term>> step_hopi_canonical(const hopi::Term& e, const HopiMenu& menu);
}  // namespace detail

// ---------------------------------------------------------------------------
// Garbage collection.

namespace {

struct Prefixes {
  NameSet restricted;
  std::map<Name, int> polarity;  // bit 0: input, bit 1: output
  bool opaque = false;

  void note(const Name& n, int bit) { polarity[n] |= bit; }

  bool dead() const {
    if (opaque) return false;
    for (const auto& [n, bits] : polarity) {
      if (!restricted.count(n) || bits == 3) return false;
    }
    return true;
  }
};

void active_prefixes(const pi::Term& t, Prefixes& acc) {
  switch (t->kind) {
    case pi::Kind::Nil:
      return;
    case pi::Kind::Input:
    case pi::Kind::RepInput:
      acc.note(t->subject, 1);
      return;
    case pi::Kind::Output:
    case pi::Kind::RepOutput:
      acc.note(t->subject, 2);
      return;
    case pi::Kind::Restrict:
      acc.restricted.insert(t->object);
      active_prefixes(t->body, acc);
      return;
    case pi::Kind::Par:
      for (const auto& p : t->parts) active_prefixes(p, acc);
      return;
  }
}

void active_prefixes(const hopi::Term& t, Prefixes& acc) {
  switch (t->kind) {
    case hopi::Kind::Nil:
    case hopi::Kind::Abs:
      return;
    case hopi::Kind::Var:
    case hopi::Kind::App:
      acc.opaque = true;
      return;
    case hopi::Kind::In:
      acc.note(t->subject, 1);
      return;
    case hopi::Kind::Out:
      acc.note(t->subject, 2);
      return;
    case hopi::Kind::Res:
      acc.restricted.insert(t->subject);
      active_prefixes(t->body, acc);
      return;
    case hopi::Kind::Par:
      for (const auto& p : t->parts) active_prefixes(p, acc);
      return;
    case hopi::Kind::Rep:
      active_prefixes(t->body, acc);
      return;
  }
}

// Every prefix anywhere in a term (payloads and replicated bodies included),
// and the names that travel as data and so may reach other users.
struct Usage {
  std::map<Name, int> polarity;
  NameSet escaping;
};

void usage(const pi::Term& t, Usage& u) {
  switch (t->kind) {
    case pi::Kind::Nil:
      return;
    case pi::Kind::Input:
    case pi::Kind::RepInput:
      u.polarity[t->subject] |= 1;
      usage(t->body, u);
      return;
    case pi::Kind::Output:
    case pi::Kind::RepOutput:
      u.polarity[t->subject] |= 2;
      u.escaping.insert(t->object);
      usage(t->body, u);
      return;
    case pi::Kind::Restrict:
      usage(t->body, u);
      return;
    case pi::Kind::Par:
      for (const auto& p : t->parts) usage(p, u);
      return;
  }
}

void usage(const hopi::Term& t, Usage& u) {
  switch (t->kind) {
    case hopi::Kind::Nil:
    case hopi::Kind::Var:
      return;
    case hopi::Kind::App:
      u.escaping.insert(t->names.begin(), t->names.end());
      usage(t->payload, u);
      return;
    case hopi::Kind::In:
      u.polarity[t->subject] |= 1;
      usage(t->body, u);
      return;
    case hopi::Kind::Out:
      u.polarity[t->subject] |= 2;
      usage(t->payload, u);
      usage(t->body, u);
      return;
    case hopi::Kind::Par:
      for (const auto& p : t->parts) usage(p, u);
      return;
    default:
      usage(t->body, u);
      return;
  }
}

// A component is dead when none of its active prefixes can ever meet a
// partner: each sits on a private name that nobody else uses with the
// opposite direction and that is never handed out.
template <class Term, class Kind, class ParFn, class ResFn>
Term drop_dead(const Term& t, Kind par_kind, Kind res_kind, ParFn make_par, ResFn make_res) {
  std::vector<Name> outer;
  Term body = t;
  while (body->kind == res_kind) {
    if constexpr (std::is_same_v<Term, pi::Term>) outer.push_back(body->object);
    else outer.push_back(body->subject);
    body = body->body;
  }
  const NameSet outer_set(outer.begin(), outer.end());
  std::vector<Term> comps = body->kind == par_kind ? body->parts : std::vector<Term>{body};
  bool changed = false;
  // A restricted component hides its own dead parts.
  for (auto& c : comps) {
    if (c->kind != res_kind) continue;
    auto inner = drop_dead(c, par_kind, res_kind, make_par, make_res);
    changed = changed || inner != c;
    c = inner;
  }
  Usage all;
  for (const auto& c : comps) usage(c, all);
  std::vector<Term> live;
  for (const auto& c : comps) {
    Prefixes pf;
    active_prefixes(c, pf);
    bool dead = !pf.opaque;
    for (const auto& [n, bits] : pf.polarity) {
      if (!dead) break;
      if (pf.restricted.count(n)) {
        dead = bits != 3;
      } else if (outer_set.count(n)) {
        dead = !all.escaping.count(n) && (all.polarity[n] & (3 - bits)) == 0 && bits != 3;
      } else {
        dead = false;
      }
    }
    if (!dead) live.push_back(c);
  }
  if (live.size() == comps.size() && !changed) return t;
  return make_res(outer, make_par(std::move(live)));
}

}  // namespace

pi::Term collect_garbage(const pi::Term& p) {
  return drop_dead(
      p, pi::Kind::Par, pi::Kind::Restrict, [](std::vector<pi::Term> v) { return pi::par(std::move(v)); },
      [](const std::vector<Name>& ns, pi::Term b) {
        for (auto it = ns.rbegin(); it != ns.rend(); ++it) b = pi::restrict(*it, b);
        return b;
      });
}

hopi::Term collect_garbage(const hopi::Term& e) {
  return drop_dead(
      e, hopi::Kind::Par, hopi::Kind::Res, [](std::vector<hopi::Term> v) { return hopi::par(std::move(v)); },
      [](const std::vector<Name>& ns, hopi::Term b) { return hopi::restrict_all(ns, b); });
}

pi::Term canonical_state(const pi::Term& p, bool gc) {
  auto n = pi::normalize(p);
  if (!gc) return n;
  auto g = collect_garbage(n);
  return g == n ? n : pi::normalize(g);
}

hopi::Term canonical_state(const hopi::Term& e, bool gc) {
  auto n = hopi::normalize(e);
  if (!gc) return n;
  auto g = collect_garbage(n);
  return g == n ? n : hopi::normalize(g);
}

cc::Term canonical_state(const cc::Term& p) { return cc::normalize(p); }

std::string show_any(const AnyTerm& t) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, pi::Term>) return pi::show(x);
        if constexpr (std::is_same_v<T, hopi::Term>) return hopi::show(x);
        if constexpr (std::is_same_v<T, cc::Term>) return cc::show(x);
      },
      t);
}

// ---------------------------------------------------------------------------
// Exploration.

namespace {

template <class Term, class CanonFn, class StepFn>
Lts explore_with(const Term& root, const ExploreOptions& opts, CanonFn canon, StepFn step) {
  Lts lts;
  lts.budget = opts.budget;
  lts.tau_only = opts.tau_only;
  lts.exhausted = true;

  auto add = [&lts](Term t, std::size_t depth) {
    auto k = show_any(AnyTerm{t});
    auto [it, fresh] = lts.index.emplace(k, lts.states.size());
    if (fresh) {
      lts.states.emplace_back(std::move(t));
      lts.keys.push_back(std::move(k));
      lts.depth.push_back(depth);
      lts.expanded.push_back(false);
      lts.out.emplace_back();
    }
    return std::pair{it->second, fresh};
  };

  std::deque<std::size_t> queue;
  queue.push_back(add(canon(root), 0).first);
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    if (lts.depth[s] >= opts.budget.max_depth) {
      lts.exhausted = false;
      continue;
    }
    auto trans = step(std::get<Term>(lts.states[s]));
    std::vector<std::pair<Action, Term>> targets;
    std::size_t unseen = 0;
    std::set<std::string> unseen_keys;
    for (auto& tr : trans) {
      if (opts.tau_only && !tr.action.is_tau()) continue;
      auto c = canon(tr.target);
      auto k = show_any(AnyTerm{c});
      if (!lts.index.count(k) && unseen_keys.insert(k).second) ++unseen;
      targets.emplace_back(std::move(tr.action), std::move(c));
    }
    if (lts.states.size() + unseen > opts.budget.max_states) {
      lts.exhausted = false;
      continue;
    }
    lts.expanded[s] = true;
    std::set<std::pair<std::string, std::size_t>> seen_edges;
    for (auto& [a, c] : targets) {
      auto [d, fresh] = add(std::move(c), lts.depth[s] + 1);
      if (fresh) queue.push_back(d);
      if (!seen_edges.emplace(label_key(a), d).second) continue;
      lts.out[s].push_back(lts.edges.size());
      lts.edges.push_back({s, std::move(a), d});
    }
  }
  return lts;
}

}  // namespace

Lts explore(const pi::Term& p, const ExploreOptions& opts) {
  bool gc = opts.collect_garbage;
  return explore_with(
      p, opts, [gc](const pi::Term& t) { return canonical_state(t, gc); },
      [&opts](const pi::Term& t) { return detail::step_pi_canonical(t, opts.universe); });
}

Lts explore(const hopi::Term& e, const ExploreOptions& opts) {
  bool gc = opts.collect_garbage;
  HopiMenu menu = opts.tau_only ? HopiMenu{} : opts.menu;
  return explore_with(
      e, opts, [gc](const hopi::Term& t) { return canonical_state(t, gc); },
      [menu](const hopi::Term& t) { return detail::step_hopi_canonical(t, menu); });
}

Lts explore(const cc::Term& p, const ExploreOptions& opts) {
  cc::check_well_formed(p);
  CStepOptions so{opts.fuel, opts.tau_only ? std::vector<Tuple>{} : opts.c_menu};
  return explore_with(
      p, opts, [](const cc::Term& t) { return canonical_state(t); },
      [so](const cc::Term& t) { return step_c(t, so); });
}

// ---------------------------------------------------------------------------
// Export.

namespace {

std::string dot_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '"' || c == '\\') o += '\\';
    o += c;
  }
  return o;
}

}  // namespace

std::string to_dot(const Lts& lts) {
  std::string s = "digraph lts {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < lts.size(); ++i) {
    s += "  s" + std::to_string(i) + " [label=\"" + dot_escape(lts.keys[i]) + "\"";
    if (i == lts.root) s += ", penwidth=2";
    if (!lts.expanded[i]) s += ", style=dashed";
    s += "];\n";
  }
  for (const auto& e : lts.edges) {
    s += "  s" + std::to_string(e.src) + " -> s" + std::to_string(e.dst) + " [label=\"" +
         dot_escape(label_key(e.action)) + "\"];\n";
  }
  return s + "}\n";
}

std::string to_json_lines(const Lts& lts) {
  std::string s;
  for (const auto& e : lts.edges) {
    nlohmann::json j = {{"src", lts.keys[e.src]},
                        {"action", label_key(e.action)},
                        {"dst", lts.keys[e.dst]}};
    s += j.dump() + "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Divergence.

namespace {

std::vector<std::size_t> tau_path(const Lts& g, std::size_t target) {
  std::vector<std::size_t> parent(g.size(), SIZE_MAX);
  std::deque<std::size_t> q{g.root};
  parent[g.root] = g.root;
  while (!q.empty()) {
    auto s = q.front();
    q.pop_front();
    if (s == target) break;
    for (auto ei : g.out[s]) {
      const auto& e = g.edges[ei];
      if (!e.action.is_tau() || parent[e.dst] != SIZE_MAX) continue;
      parent[e.dst] = s;
      q.push_back(e.dst);
    }
  }
  std::vector<std::size_t> path;
  if (parent[target] == SIZE_MAX) return path;
  for (auto s = target;; s = parent[s]) {
    path.push_back(s);
    if (s == g.root) break;
  }
  return {path.rbegin(), path.rend()};
}

}  // namespace

DivergenceResult detect_divergence(const Lts& g) {
  DivergenceResult r;
  r.states_explored = g.size();
  if (g.size() == 0) return r;

  // Iterative DFS over tau edges looking for a back edge.
  enum Color : char { White, Grey, Black };
  std::vector<Color> color(g.size(), White);
  std::vector<std::pair<std::size_t, std::size_t>> stack{{g.root, 0}};
  color[g.root] = Grey;
  while (!stack.empty()) {
    auto& [s, next] = stack.back();
    if (next == g.out[s].size()) {
      color[s] = Black;
      stack.pop_back();
      continue;
    }
    const auto& e = g.edges[g.out[s][next++]];
    if (!e.action.is_tau()) continue;
    if (color[e.dst] == Grey) {
      r.verdict = DivergenceResult::Verdict::Divergent;
      r.certificate = DivergenceResult::Certificate::Cycle;
      for (const auto& fr : stack) {
        if (fr.first == e.dst) r.cycle_start = r.witness.size();
        r.witness.push_back(g.keys[fr.first]);
      }
      return r;
    }
    if (color[e.dst] == White) {
      color[e.dst] = Grey;
      stack.emplace_back(e.dst, 0);
    }
  }

  if (g.exhausted) {
    r.verdict = DivergenceResult::Verdict::NoDivergenceWithinBudget;
    return r;
  }
  for (std::size_t s = 0; s < g.size(); ++s) {
    if (g.expanded[s] || g.depth[s] < g.budget.max_depth) continue;
    auto path = tau_path(g, s);
    if (path.empty()) continue;
    r.verdict = DivergenceResult::Verdict::Divergent;
    r.certificate = DivergenceResult::Certificate::DepthBound;
    for (auto i : path) r.witness.push_back(g.keys[i]);
    r.cycle_start = r.witness.size();
    return r;
  }
  return r;
}

DivergenceResult detect_divergence(const pi::Term& p, const Budget& budget) {
  ExploreOptions o;
  o.budget = budget;
  o.tau_only = true;
  return detect_divergence(explore(p, o));
}

DivergenceResult detect_divergence(const hopi::Term& e, const Budget& budget) {
  ExploreOptions o;
  o.budget = budget;
  o.tau_only = true;
  return detect_divergence(explore(e, o));
}

DivergenceResult detect_divergence(const cc::Term& p, const Budget& budget, std::uint64_t fuel) {
  ExploreOptions o;
  o.budget = budget;
  o.tau_only = true;
  o.fuel = fuel;
  return detect_divergence(explore(p, o));
}

}  // namespace pcalc
