#include "pcalc/equivalence.hpp"

#include "pcalc/syntax.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <json.hpp>
#include <unordered_map>
#include <unordered_set>

namespace pcalc::eq {

std::string verdict_name(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Equivalent:
      return "Equivalent";
    case Verdict::Kind::Distinguished:
      return "Distinguished";
    case Verdict::Kind::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

std::string to_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["verdict"] = verdict_name(v.kind);
  j["bound"] = {{"states", v.states}, {"complete", v.complete}};
  if (!v.witness.empty()) {
    auto w = nlohmann::ordered_json::array();
    for (const auto& s : v.witness) w.push_back({{"state", s.state}, {"action", s.action}});
    j["witness"] = w;
  }
  if (!v.note.empty()) j["note"] = v.note;
  return j.dump();
}

LabelMatcher pipe_matcher() {
  return [](const Action& a) -> std::string {
    if (a.kind != Action::Kind::HoIn) return label_key(a);
    auto fn = hopi::free_constants(a.payload);
    if (fn.size() != 1 || hopi::parameter_count(a.payload) != 3) return "";
    if (hopi::key(a.payload) != hopi::key(enc::make_pipe(*fn.begin()))) return "";
    return label_key(a);
  };
}

namespace {

// Union of explored graphs, states shared by key.
struct Graph {
  std::vector<std::string> keys;
  std::vector<AnyTerm> terms;

  std::string shown(std::size_t i) const {
    return std::visit([](const auto& t) { return syntax::print(t); }, terms[i]);
  }
  std::vector<bool> expanded;
  std::vector<std::vector<std::pair<int, std::size_t>>> out;  // label id (0 = tau), target
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::string> labels{"tau"};
  std::map<std::string, int> label_ids{{"tau", 0}};
  LabelMatcher matcher;

  int label_id(const std::string& s) {
    auto [it, fresh] = label_ids.emplace(s, static_cast<int>(labels.size()));
    if (fresh) labels.push_back(s);
    return it->second;
  }

  std::size_t node(const Lts& l, std::size_t i) {
    auto [it, fresh] = index.emplace(l.keys[i], keys.size());
    if (fresh) {
      keys.push_back(l.keys[i]);
      terms.push_back(l.states[i]);
      expanded.push_back(false);
      out.emplace_back();
    }
    return it->second;
  }

  std::vector<std::size_t> add(const Lts& l) {
    std::vector<std::size_t> map(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) map[i] = node(l, i);
    std::vector<bool> fill(keys.size(), false);
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (l.expanded[i] && !expanded[map[i]]) {
        expanded[map[i]] = true;
        fill[map[i]] = true;
      }
    }
    for (const auto& e : l.edges) {
      auto s = map[e.src];
      if (!fill[s]) continue;
      int id = 0;
      if (!e.action.is_tau()) {
        auto cls = matcher ? matcher(e.action) : label_key(e.action);
        if (cls.empty()) continue;
        id = label_id(cls);
      }
      out[s].emplace_back(id, map[e.dst]);
    }
    return map;
  }

  std::size_t size() const { return keys.size(); }
};

struct Saturation {
  std::vector<std::vector<std::size_t>> closure;  // sorted tau-closure, self included
  std::vector<std::vector<std::pair<int, std::size_t>>> weak;  // sorted unique weak moves
  std::vector<bool> divergent;
};

Saturation saturate(const Graph& g) {
  Saturation s;
  const auto n = g.size();
  s.closure.resize(n);
  std::vector<std::size_t> stamp(n, SIZE_MAX);
  std::vector<std::size_t> work;
  for (std::size_t v = 0; v < n; ++v) {
    work.assign(1, v);
    stamp[v] = v;
    while (!work.empty()) {
      auto u = work.back();
      work.pop_back();
      s.closure[v].push_back(u);
      for (auto [l, w] : g.out[u]) {
        if (l == 0 && stamp[w] != v) {
          stamp[w] = v;
          work.push_back(w);
        }
      }
    }
    std::sort(s.closure[v].begin(), s.closure[v].end());
  }
  s.weak.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto& wk = s.weak[v];
    for (auto u : s.closure[v]) wk.emplace_back(0, u);
    for (auto u : s.closure[v]) {
      for (auto [l, w] : g.out[u]) {
        if (l == 0) continue;
        for (auto x : s.closure[w]) wk.emplace_back(l, x);
      }
    }
    std::sort(wk.begin(), wk.end());
    wk.erase(std::unique(wk.begin(), wk.end()), wk.end());
  }
  // On a tau-cycle: reachable again from one of its own tau-successors.
  std::vector<bool> cyclic(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    for (auto [l, w] : g.out[v]) {
      if (l == 0 && std::binary_search(s.closure[w].begin(), s.closure[w].end(), v)) cyclic[v] = true;
    }
  }
  s.divergent.assign(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    for (auto u : s.closure[v]) {
      if (cyclic[u]) s.divergent[v] = true;
    }
  }
  return s;
}

// Coarsest stable partition. Unexpanded states stay in singleton blocks.
std::vector<std::size_t> refine(const Graph& g, const Saturation& s, bool div) {
  const auto n = g.size();
  std::vector<std::size_t> block(n);
  std::size_t singles = 2;
  for (std::size_t v = 0; v < n; ++v) {
    if (!g.expanded[v]) block[v] = singles++;
    else block[v] = div && s.divergent[v] ? 1 : 0;
  }
  std::size_t count = 0;
  for (;;) {
    std::map<std::pair<std::size_t, std::vector<std::pair<int, std::size_t>>>, std::size_t> ids;
    std::vector<std::size_t> next(n);
    for (std::size_t v = 0; v < n; ++v) {
      std::vector<std::pair<int, std::size_t>> sig;
      if (g.expanded[v]) {
        for (auto [l, w] : s.weak[v]) sig.emplace_back(l, block[w]);
        std::sort(sig.begin(), sig.end());
        sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
      }
      auto [it, fresh] = ids.emplace(std::make_pair(block[v], std::move(sig)), ids.size());
      next[v] = it->second;
    }
    block.swap(next);
    if (ids.size() == count) break;
    count = ids.size();
  }
  return block;
}

BarbSet barbs_of(const Graph& g, const Saturation& s, std::size_t v,
                 const std::vector<std::vector<Action>>& actions) {
  BarbSet b;
  for (auto u : s.closure[v]) {
    if (!g.expanded[u]) b.complete = false;
    for (const auto& a : actions[u]) {
      if (!a.is_tau()) b.barbs.insert({a.subject, a.is_output()});
    }
  }
  return b;
}

// Raw actions per node, for barbs (independent of the label matcher).
std::vector<std::vector<Action>> raw_actions(const Graph& g, const std::vector<const Lts*>& ls,
                                             const std::vector<std::vector<std::size_t>>& maps) {
  std::vector<std::vector<Action>> acts(g.size());
  std::vector<bool> done(g.size(), false);
  for (std::size_t k = 0; k < ls.size(); ++k) {
    std::vector<bool> mine(g.size(), false);
    for (std::size_t i = 0; i < ls[k]->size(); ++i) {
      if (ls[k]->expanded[i] && !done[maps[k][i]]) mine[maps[k][i]] = done[maps[k][i]] = true;
    }
    for (const auto& e : ls[k]->edges) {
      if (mine[maps[k][e.src]]) acts[maps[k][e.src]].push_back(e.action);
    }
  }
  return acts;
}

std::string barb_text(const Barb& b) { return b.subject.id + (b.output ? "!" : "?"); }

// A weak trace of `x` that `y` provably cannot follow: every defender state
// along the way is fully expanded. Returns the attacker's moves.
std::optional<std::vector<WitnessStep>> trace_gap(const Graph& g, const Saturation& s, std::size_t x,
                                                  std::size_t y, std::size_t limit = 100000) {
  struct Item {
    std::size_t node;
    std::vector<std::size_t> defenders;
    std::size_t parent;
    int label;
  };
  std::vector<Item> items{{x, s.closure[y], SIZE_MAX, -1}};
  std::set<std::pair<std::size_t, std::vector<std::size_t>>> seen{{x, s.closure[y]}};
  auto steps_of = [&](std::size_t i, int label, std::size_t target) {
    std::vector<WitnessStep> out;
    std::vector<std::size_t> chain;
    for (auto k = i; k != SIZE_MAX; k = items[k].parent) chain.push_back(k);
    std::reverse(chain.begin(), chain.end());
    for (std::size_t c = 1; c < chain.size(); ++c) {
      out.push_back({g.shown(items[chain[c - 1]].node),
                     g.labels[static_cast<std::size_t>(items[chain[c]].label)]});
    }
    out.push_back({g.shown(items[i].node), g.labels[static_cast<std::size_t>(label)]});
    out.push_back({g.shown(target), ""});
    return out;
  };
  for (std::size_t i = 0; i < items.size() && items.size() < limit; ++i) {
    auto defenders = items[i].defenders;
    bool known = true;
    for (auto d : defenders) {
      if (!g.expanded[d]) known = false;
    }
    if (!known) continue;
    for (auto [l, w] : s.weak[items[i].node]) {
      if (l == 0) continue;
      std::set<std::size_t> next;
      for (auto d : defenders) {
        for (auto [l2, w2] : s.weak[d]) {
          if (l2 == l) next.insert(w2);
        }
      }
      if (next.empty()) return steps_of(i, l, w);
      std::vector<std::size_t> nd(next.begin(), next.end());
      if (seen.emplace(w, nd).second) items.push_back({w, std::move(nd), i, l});
    }
  }
  return std::nullopt;
}

}  // namespace

std::string show(const BarbSet& b) {
  std::string s = "{";
  bool first = true;
  for (const auto& x : b.barbs) {
    if (!first) s += ", ";
    first = false;
    s += barb_text(x);
  }
  return s + "}" + (b.complete ? "" : " (partial)");
}

Verdict weak_bisim(const Lts& a, const Lts& b, const BisimOptions& opts) {
  Graph g;
  g.matcher = opts.matcher;
  auto ma = g.add(a);
  auto mb = g.add(b);
  auto s = saturate(g);
  auto block = refine(g, s, opts.divergence_sensitive);
  const auto ra = ma[a.root], rb = mb[b.root];

  Verdict v;
  v.states = g.size();
  v.complete = a.exhausted && b.exhausted;
  if (block[ra] == block[rb]) {
    v.kind = Verdict::Kind::Equivalent;
    if (!v.complete) v.note = "bisimulation found inside the explored region";
    return v;
  }
  if (v.complete) {
    v.kind = Verdict::Kind::Distinguished;
    for (auto [x, y] : {std::pair{ra, rb}, std::pair{rb, ra}}) {
      if (auto w = trace_gap(g, s, x, y)) {
        v.witness = *w;
        v.note = "weak trace the other side cannot follow";
        return v;
      }
    }
    // An attacker move the defender cannot answer, visible moves first.
    for (int pass = 0; pass < 2; ++pass) {
      for (auto [x, y] : {std::pair{ra, rb}, std::pair{rb, ra}}) {
        for (auto [l, w] : s.weak[x]) {
          if ((l == 0) != (pass == 1)) continue;
          bool answered = false;
          for (auto [l2, w2] : s.weak[y]) {
            if (l2 == l && block[w2] == block[w]) answered = true;
          }
          if (!answered) {
            const auto& lab = g.labels[static_cast<std::size_t>(l)];
            v.witness.push_back({g.shown(x), lab});
            v.witness.push_back({g.shown(w), ""});
            v.note = "the other side has no weak '" + lab + "' move to an equivalent state";
            return v;
          }
        }
      }
    }
    v.note = "the roots differ in divergence";
    v.witness.push_back({g.shown(s.divergent[ra] ? ra : rb), "tau^omega"});
    return v;
  }
  auto acts = raw_actions(g, {&a, &b}, {ma, mb});
  auto ba = barbs_of(g, s, ra, acts), bb = barbs_of(g, s, rb, acts);
  if (ba.complete && bb.complete && ba.barbs != bb.barbs) {
    v.kind = Verdict::Kind::Distinguished;
    for (auto [x, bx, by] : {std::tuple{ra, &ba, &bb}, std::tuple{rb, &bb, &ba}}) {
      for (const auto& barb : bx->barbs) {
        if (!by->barbs.count(barb)) {
          v.witness.push_back({g.shown(x), barb_text(barb)});
          v.note = "weak barb " + barb_text(barb) + " on one side only";
          return v;
        }
      }
    }
  }
  for (auto [x, y] : {std::pair{ra, rb}, std::pair{rb, ra}}) {
    if (auto w = trace_gap(g, s, x, y)) {
      v.kind = Verdict::Kind::Distinguished;
      v.witness = *w;
      v.note = "weak trace the other side cannot follow";
      return v;
    }
  }
  v.kind = Verdict::Kind::Inconclusive;
  v.note = "budget exhausted before a bisimulation or a difference was found";
  return v;
}

std::vector<std::size_t> bisim_classes(const std::vector<Lts>& graphs, const BisimOptions& opts) {
  Graph g;
  g.matcher = opts.matcher;
  std::vector<std::size_t> roots;
  for (const auto& l : graphs) roots.push_back(g.add(l)[l.root]);
  auto s = saturate(g);
  auto block = refine(g, s, opts.divergence_sensitive);
  std::vector<std::size_t> out;
  for (auto r : roots) out.push_back(block[r]);
  return out;
}

BarbSet weak_barbs(const Lts& lts, std::size_t state) {
  BarbSet b;
  std::vector<bool> seen(lts.size(), false);
  std::deque<std::size_t> work{state};
  seen[state] = true;
  while (!work.empty()) {
    auto u = work.front();
    work.pop_front();
    if (!lts.expanded[u]) b.complete = false;
    for (auto ei : lts.out[u]) {
      const auto& e = lts.edges[ei];
      if (e.action.is_tau()) {
        if (!seen[e.dst]) {
          seen[e.dst] = true;
          work.push_back(e.dst);
        }
      } else {
        b.barbs.insert({e.action.subject, e.action.is_output()});
      }
    }
  }
  return b;
}

namespace {

template <class T>
BarbSet barbs_for(const T& t, const Budget& budget) {
  ExploreOptions o;
  o.budget = budget;
  o.tau_only = true;
  auto l = explore(t, o);
  BarbSet b;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (!l.expanded[i]) b.complete = false;
    const auto& st = std::get<T>(l.states[i]);
    std::vector<Action> acts;
    if constexpr (std::is_same_v<T, pi::Term>) {
      for (auto& tr : step_pi(st)) acts.push_back(tr.action);
    } else if constexpr (std::is_same_v<T, hopi::Term>) {
      // Inputs need a menu to fire; any payload will do to expose the barb.
      for (auto& tr : step_hopi(st, [](const hopi::Term&) { return std::vector<hopi::Term>{hopi::nil()}; })) {
        acts.push_back(tr.action);
      }
    } else {
      for (auto& tr : step_c(st)) acts.push_back(tr.action);
    }
    for (const auto& a : acts) {
      if (!a.is_tau()) b.barbs.insert({a.subject, a.is_output()});
    }
  }
  return b;
}

}  // namespace

BarbSet weak_barbs(const pi::Term& p, const Budget& budget) { return barbs_for(p, budget); }
BarbSet weak_barbs(const hopi::Term& e, const Budget& budget) { return barbs_for(e, budget); }
BarbSet weak_barbs(const cc::Term& p, const Budget& budget) { return barbs_for(p, budget); }


namespace {

// Attacker search along single traces of p. All weak derivatives of q along
// the same trace are tracked together; a gap is a point where none is left,
// or where every one differs from the attacker in fully explored weak barbs.
// Both sides step with the same known names, so fresh names agree.
class GuidedSearch {
 public:
  GuidedSearch(NameSet universe, std::size_t budget)
      : known_(std::move(universe)), budget_(budget), initial_(budget) {}

  std::optional<Verdict> run(const pi::Term& p, const pi::Term& q) {
    std::vector<WitnessStep> trace;
    std::string why;
    if (!search(canonical_state(p), closure({canonical_state(q)}), 0, trace, why)) return std::nullopt;
    Verdict v;
    v.kind = Verdict::Kind::Distinguished;
    v.witness = std::move(trace);
    v.states = initial_ - budget_;
    v.note = why;
    return v;
  }

 private:
  static constexpr std::size_t kMaxDepth = 16;
  static constexpr std::size_t kClosureLimit = 400;

  NameSet known_;
  std::size_t budget_;
  std::size_t initial_;
  std::unordered_map<std::string, BarbSet> barbs_;
  std::unordered_set<std::string> seen_;

  static int recency(const Name& n) {
    if (n.id.rfind("#e:", 0) != 0) return -1;
    return std::stoi(n.id.substr(3));
  }

  std::vector<Transition<pi::Term>> moves(const pi::Term& p) {
    auto ts = step_pi(p, PiStepOptions{known_});
    for (auto& t : ts) t.target = canonical_state(t.target);
    // Follow the conversation: newest names first, fresh objects first.
    auto score = [](const Transition<pi::Term>& t) {
      if (t.action.is_tau()) return std::pair{-2, 0};
      return std::pair{recency(t.action.subject), recency(t.action.object)};
    };
    std::stable_sort(ts.begin(), ts.end(), [&](const auto& a, const auto& b) { return score(a) > score(b); });
    return ts;
  }

  const BarbSet& barbs(const pi::Term& p) {
    auto k = pi::show(p);
    auto it = barbs_.find(k);
    if (it == barbs_.end()) {
      Budget b;
      b.max_states = kClosureLimit;
      it = barbs_.emplace(k, weak_barbs(p, b)).first;
    }
    return it->second;
  }

  // Tau closure; nullopt when it is too large to enumerate.
  std::optional<std::vector<pi::Term>> closure(std::vector<pi::Term> qs) {
    std::unordered_set<std::string> seen;
    std::vector<pi::Term> out;
    while (!qs.empty()) {
      auto q = qs.back();
      qs.pop_back();
      if (!seen.insert(pi::show(q)).second) continue;
      if (seen.size() > kClosureLimit) return std::nullopt;
      out.push_back(q);
      for (auto& t : step_pi(q, PiStepOptions{known_})) {
        if (t.action.is_tau()) qs.push_back(canonical_state(t.target));
      }
    }
    return out;
  }

  std::optional<std::vector<pi::Term>> answer(const std::vector<pi::Term>& qs, const std::string& label) {
    std::vector<pi::Term> next;
    for (const auto& q : qs) {
      for (auto& t : step_pi(q, PiStepOptions{known_})) {
        if (!t.action.is_tau() && label_key(t.action) == label) next.push_back(canonical_state(t.target));
      }
    }
    return closure(std::move(next));
  }

  bool gap(const pi::Term& p, const std::vector<pi::Term>& qs, std::string& why) {
    if (qs.empty()) {
      why = "the other side cannot follow the trace";
      return true;
    }
    const auto& bp = barbs(p);
    if (!bp.complete) return false;
    for (const auto& q : qs) {
      const auto& bq = barbs(q);
      if (!bq.complete || bq.barbs == bp.barbs) return false;
    }
    why = "after the trace the weak barbs differ from every answer of the other side";
    return true;
  }

  bool search(const pi::Term& p, const std::optional<std::vector<pi::Term>>& qs, std::size_t depth,
              std::vector<WitnessStep>& trace, std::string& why) {
    if (!qs) return false;
    if (gap(p, *qs, why)) {
      trace.push_back({syntax::print(p), ""});
      return true;
    }
    if (depth >= kMaxDepth || budget_ == 0) return false;
    std::vector<std::string> ks;
    for (const auto& q : *qs) ks.push_back(pi::show(q));
    std::sort(ks.begin(), ks.end());
    std::string k = pi::show(p);
    for (const auto& x : ks) k += "|" + x;
    if (!seen_.insert(k).second) return false;
    --budget_;
    for (auto& t : moves(p)) {
      auto label = t.action.is_tau() ? std::string("tau") : label_key(t.action);
      auto answers = t.action.is_tau() ? closure(*qs) : answer(*qs, label);
      auto added = known_;
      if (!t.action.is_tau()) {
        known_.insert(t.action.subject);
        if (!t.action.object.id.empty()) known_.insert(t.action.object);
      }
      trace.push_back({syntax::print(p), label});
      if (search(t.target, answers, depth + 1, trace, why)) return true;
      trace.pop_back();
      known_ = std::move(added);
      if (budget_ == 0) return false;
    }
    return false;
  }
};

}  // namespace

Verdict check_pi(const pi::Term& p, const pi::Term& q, const ExploreOptions& opts,
                 const BisimOptions& bopts) {
  // Cheap test first: weak barbs of the whole terms.
  if (!bopts.matcher) {
    auto bp = weak_barbs(p, opts.budget), bq = weak_barbs(q, opts.budget);
    if (bp.complete && bq.complete && bp.barbs != bq.barbs) {
      Verdict v;
      v.kind = Verdict::Kind::Distinguished;
      for (auto [t, bx, by] : {std::tuple{p, &bp, &bq}, std::tuple{q, &bq, &bp}}) {
        for (const auto& barb : bx->barbs) {
          if (!by->barbs.count(barb) && v.witness.empty()) {
            v.witness.push_back({pi::show(t), barb_text(barb)});
            v.note = "weak barb " + barb_text(barb) + " on one side only";
          }
        }
      }
      return v;
    }
  }
  auto cp = canonical_state(p, opts.collect_garbage);
  auto cq = canonical_state(q, opts.collect_garbage);
  if (!bopts.divergence_sensitive) {
    // Cancel common parallel components.
    std::multimap<std::string, pi::Term> left;
    for (const auto& c : cp->kind == pi::Kind::Par ? cp->parts : std::vector<pi::Term>{cp}) {
      left.emplace(pi::key(c), c);
    }
    std::vector<pi::Term> right;
    for (const auto& c : cq->kind == pi::Kind::Par ? cq->parts : std::vector<pi::Term>{cq}) {
      auto it = left.find(pi::key(c));
      if (it != left.end()) left.erase(it);
      else right.push_back(c);
    }
    std::vector<pi::Term> lp;
    for (auto& [k, c] : left) lp.push_back(c);
    cp = pi::par(lp);
    cq = pi::par(right);
  }
  ExploreOptions o = opts;
  auto fp = pi::free_constants(p), fq = pi::free_constants(q);
  o.universe.insert(fp.begin(), fp.end());
  o.universe.insert(fq.begin(), fq.end());
  if (!bopts.matcher && !bopts.divergence_sensitive && pi::key(cp) != pi::key(cq)) {
    // A short directed attack is often enough where the full graphs are not.
    for (auto [x, y] : {std::pair{cp, cq}, std::pair{cq, cp}}) {
      if (auto v = GuidedSearch(o.universe, 400).run(x, y)) return *v;
    }
  }
  return weak_bisim(explore(cp, o), explore(cq, o), bopts);
}

namespace {

LabelMatcher payload_matcher(const ExploreOptions& opts, int depth);

// Payloads are placed in the trigger contexts X and X<fresh names> and the
// resulting processes compared one level down.
bool same_payload(const hopi::Term& x, const hopi::Term& y, const ExploreOptions& opts, int depth) {
  if (hopi::key(x) == hopi::key(y)) return true;
  if (depth <= 0) return false;
  auto n = hopi::parameter_count(x);
  if (n != hopi::parameter_count(y)) return false;
  hopi::Term px = x, py = y;
  if (n > 0) {
    std::vector<Name> args;
    for (std::size_t i = 0; i < n; ++i) args.push_back(fresh_constant("probe"));
    px = hopi::apply_abstraction(x, args);
    py = hopi::apply_abstraction(y, args);
  }
  ExploreOptions inner = opts;
  inner.budget.max_states = std::max<std::size_t>(200, opts.budget.max_states / 10);
  BisimOptions b;
  b.matcher = payload_matcher(opts, depth - 1);
  return weak_bisim(explore(px, inner), explore(py, inner), b).equivalent();
}

LabelMatcher payload_matcher(const ExploreOptions& opts, int depth) {
  auto reps = std::make_shared<std::vector<hopi::Term>>();
  return [reps, opts, depth](const Action& a) -> std::string {
    if (a.kind != Action::Kind::HoOut) return label_key(a);
    std::string head = a.subject.id + "!";
    for (const auto& e : a.extruded) head += "(new " + e.id + ")";
    for (std::size_t i = 0; i < reps->size(); ++i) {
      if (same_payload((*reps)[i], a.payload, opts, depth)) return head + "#" + std::to_string(i);
    }
    reps->push_back(a.payload);
    return head + "#" + std::to_string(reps->size() - 1);
  };
}

}  // namespace

Verdict check_hopi(const hopi::Term& p, const hopi::Term& q, const ExploreOptions& opts,
                   const BisimOptions& bopts) {
  BisimOptions b = bopts;
  if (!b.matcher) b.matcher = payload_matcher(opts, 2);
  auto v = weak_bisim(explore(p, opts), explore(q, opts), b);
  v.note += v.note.empty() ? "" : "; ";
  v.note += bopts.matcher ? "labels compared by the supplied matcher"
                          : "higher-order payloads compared in trigger contexts to depth 2 (heuristic)";
  return v;
}

Verdict check_c(const cc::Term& p, const cc::Term& q, const ExploreOptions& opts,
                const BisimOptions& bopts) {
  return weak_bisim(explore(p, opts), explore(q, opts), bopts);
}

Verdict hopi_ctx_bisim(const hopi::Term& p, const hopi::Term& q, const Budget& budget,
                       const enc::HopiToPiOptions& tr) {
  ExploreOptions o;
  o.budget = budget;
  auto fp = hopi::free_constants(p), fq = hopi::free_constants(q);
  o.universe.insert(fp.begin(), fp.end());
  o.universe.insert(fq.begin(), fq.end());
  auto v = check_pi(enc::encode_hopi(p, tr), enc::encode_hopi(q, tr), o);
  v.note += v.note.empty() ? "" : "; ";
  v.note += "verdict transferred from the first-order translation";
  return v;
}

}  // namespace pcalc::eq
