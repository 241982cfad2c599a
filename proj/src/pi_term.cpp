#include "pcalc/pi_term.hpp"

#include "pcalc/detail/scoped.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <utility>

namespace pcalc::pi {

namespace {

Term make(Node n) { return std::make_shared<const Node>(std::move(n)); }

const Term& shared_nil() {
  static const Term t = make(Node{});
  return t;
}

void collect_free(const Term& t, NameSet& bound, FreeNames& out) {
  auto note = [&](const Name& n) {
    if (bound.count(n)) return;
    (n.is_constant() ? out.constants : out.variables).insert(n);
  };
  switch (t->kind) {
    case Kind::Nil:
      return;
    case Kind::Input:
    case Kind::RepInput: {
      note(t->subject);
      bool fresh = bound.insert(t->object).second;
      collect_free(t->body, bound, out);
      if (fresh) bound.erase(t->object);
      return;
    }
    case Kind::Output:
    case Kind::RepOutput:
      note(t->subject);
      note(t->object);
      collect_free(t->body, bound, out);
      return;
    case Kind::Restrict: {
      bool fresh = bound.insert(t->object).second;
      collect_free(t->body, bound, out);
      if (fresh) bound.erase(t->object);
      return;
    }
    case Kind::Par:
      for (const auto& p : t->parts) collect_free(p, bound, out);
      return;
  }
}

void collect_all(const Term& t, NameSet& out) {
  switch (t->kind) {
    case Kind::Nil:
      return;
    case Kind::Par:
      for (const auto& p : t->parts) collect_all(p, out);
      return;
    case Kind::Restrict:
      out.insert(t->object);
      collect_all(t->body, out);
      return;
    default:
      out.insert(t->subject);
      out.insert(t->object);
      collect_all(t->body, out);
      return;
  }
}

Term with_body(const Term& t, Name subject, Name object, Term body) {
  Node n = *t;
  n.subject = std::move(subject);
  n.object = std::move(object);
  n.body = std::move(body);
  return make(std::move(n));
}

Name lookup(const NameMap& m, const Name& n) {
  auto it = m.find(n);
  return it == m.end() ? n : it->second;
}

Term subst(const Term& t, const NameMap& map, const NameSet& range) {
  if (map.empty()) return t;
  switch (t->kind) {
    case Kind::Nil:
      return t;
    case Kind::Output:
    case Kind::RepOutput:
      return with_body(t, lookup(map, t->subject), lookup(map, t->object),
                       subst(t->body, map, range));
    case Kind::Par: {
      std::vector<Term> parts;
      parts.reserve(t->parts.size());
      for (const auto& p : t->parts) parts.push_back(subst(p, map, range));
      return par(std::move(parts));
    }
    case Kind::Input:
    case Kind::RepInput:
    case Kind::Restrict: {
      NameMap inner = map;
      inner.erase(t->object);
      Name binder = t->object;
      if (range.count(binder)) {
        Name renamed{binder.sort, fresh_id(binder.id)};
        inner[binder] = renamed;
        binder = renamed;
      }
      Name subject = t->kind == Kind::Restrict ? t->subject : lookup(map, t->subject);
      return with_body(t, subject, binder, subst(t->body, inner, range));
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Normalization.

// Gives every binder a unique generated name so later phases can ignore
// shadowing and capture.
Term freshen(const Term& t, const NameMap& env) {
  switch (t->kind) {
    case Kind::Nil:
      return t;
    case Kind::Output:
    case Kind::RepOutput:
      return with_body(t, lookup(env, t->subject), lookup(env, t->object), freshen(t->body, env));
    case Kind::Par: {
      std::vector<Term> parts;
      for (const auto& p : t->parts) parts.push_back(freshen(p, env));
      return par(std::move(parts));
    }
    default: {
      NameMap inner = env;
      Name binder{t->object.sort, fresh_id(t->object.id)};
      inner[t->object] = binder;
      Name subject = t->kind == Kind::Restrict ? t->subject : lookup(env, t->subject);
      return with_body(t, subject, binder, freshen(t->body, inner));
    }
  }
}

std::vector<Term> components(const Term& t) {
  if (t->kind == Kind::Nil) return {};
  if (t->kind == Kind::Par) return t->parts;
  return {t};
}

Term from_components(std::vector<Term> comps) {
  if (comps.empty()) return nil();
  if (comps.size() == 1) return comps.front();
  return par(std::move(comps));
}

Term restrict_all(const std::vector<Name>& names, Term body) {
  for (auto it = names.rbegin(); it != names.rend(); ++it) body = restrict(*it, std::move(body));
  return body;
}

std::vector<Term> scope(std::vector<Name> names, std::vector<Term> comps);

// Assumes binders are unique (see freshen).
Term simplify(const Term& t) {
  switch (t->kind) {
    case Kind::Nil:
      return t;
    case Kind::Input:
    case Kind::Output:
    case Kind::RepInput:
    case Kind::RepOutput:
      return with_body(t, t->subject, t->object, simplify(t->body));
    case Kind::Par: {
      std::vector<Term> flat;
      for (const auto& p : t->parts) {
        auto s = simplify(p);
        for (auto& c : components(s)) flat.push_back(std::move(c));
      }
      return from_components(std::move(flat));
    }
    case Kind::Restrict: {
      std::vector<Name> names;
      Term cur = t;
      while (cur->kind == Kind::Restrict) {
        names.push_back(cur->object);
        cur = cur->body;
      }
      return from_components(scope(std::move(names), components(simplify(cur))));
    }
  }
  return t;
}

// Splits a restriction block over parallel components into the tightest
// independent blocks (scope extrusion read right to left).
std::vector<Term> scope(std::vector<Name> names, std::vector<Term> comps) {
  const std::size_t n = comps.size();
  std::vector<NameSet> fns(n);
  for (std::size_t i = 0; i < n; ++i) fns[i] = free_constants(comps[i]);

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<Name, std::size_t> owner;
  for (const auto& c : names) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!fns[i].count(c)) continue;
      auto [it, inserted] = owner.emplace(c, i);
      if (!inserted) parent[find(i)] = find(it->second);
    }
  }

  std::vector<Term> out;
  std::map<std::size_t, std::pair<std::vector<Name>, std::vector<Term>>> groups;
  std::vector<std::size_t> order;
  for (const auto& c : names) {
    auto it = owner.find(c);
    if (it == owner.end()) continue;  // (c)P = P when c is not free in P
    auto root = find(it->second);
    if (!groups.count(root)) order.push_back(root);
    groups[root].first.push_back(c);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto root = find(i);
    if (groups.count(root)) {
      groups[root].second.push_back(comps[i]);
    } else {
      out.push_back(comps[i]);
    }
  }
  for (auto root : order) {
    auto& [gnames, gcomps] = groups[root];
    if (gcomps.size() == 1 && gcomps.front()->kind == Kind::Restrict) {
      Term cur = gcomps.front();
      while (cur->kind == Kind::Restrict) {
        gnames.push_back(cur->object);
        cur = cur->body;
      }
      for (auto& c : scope(gnames, components(cur))) out.push_back(std::move(c));
    } else {
      out.push_back(restrict_all(gnames, from_components(std::move(gcomps))));
    }
  }
  return out;
}

// Shape keys: bound names are anonymised so that sorting does not depend on
// the particular binder names chosen.
struct ShapeEnv {
  struct Binding {
    bool variable;
    int depth;  // variables: input depth; restrictions: unique id
  };
  std::map<Name, Binding> bound;
  int var_depth = 0;
  int next_uid = 0;
};

void number(std::string& out, int k) {
  char buf[16];
  auto [end, _] = std::to_chars(buf, buf + sizeof buf, k);
  out.append(buf, end);
}

void shape(const Term& t, ShapeEnv& env, std::map<int, int>& local, std::string& out) {
  auto name = [&](const Name& n) {
    auto it = env.bound.find(n);
    if (it == env.bound.end()) {
      if (n.is_variable()) out += '?';
      out += n.id;
      return;
    }
    if (it->second.variable) {
      out += '^';
      number(out, env.var_depth - it->second.depth);
      return;
    }
    auto [lit, _] = local.emplace(it->second.depth, static_cast<int>(local.size()));
    out += '_';
    if (is_auxiliary(n)) out += stem_of(n.id) + ':';
    number(out, lit->second);
  };
  switch (t->kind) {
    case Kind::Nil:
      out += '0';
      return;
    case Kind::Input:
    case Kind::RepInput: {
      if (t->kind == Kind::RepInput) out += '!';
      name(t->subject);
      out += "(.)";
      {
        detail::Scoped bind(env.bound, t->object, ShapeEnv::Binding{true, env.var_depth++});
        shape(t->body, env, local, out);
      }
      --env.var_depth;
      return;
    }
    case Kind::Output:
    case Kind::RepOutput:
      if (t->kind == Kind::RepOutput) out += '!';
      name(t->subject);
      out += '!';
      name(t->object);
      out += '.';
      shape(t->body, env, local, out);
      return;
    case Kind::Restrict: {
      out += "(new)";
      detail::Scoped bind(env.bound, t->object, ShapeEnv::Binding{false, env.next_uid++});
      shape(t->body, env, local, out);
      return;
    }
    case Kind::Par:
      out += '(';
      for (std::size_t i = 0; i < t->parts.size(); ++i) {
        if (i) out += '|';
        shape(t->parts[i], env, local, out);
      }
      out += ')';
      return;
  }
}

Term sort_tree(const Term& t, ShapeEnv& env) {
  switch (t->kind) {
    case Kind::Nil:
      return t;
    case Kind::Input:
    case Kind::RepInput: {
      Term body;
      {
        detail::Scoped bind(env.bound, t->object, ShapeEnv::Binding{true, env.var_depth++});
        body = sort_tree(t->body, env);
      }
      --env.var_depth;
      return with_body(t, t->subject, t->object, std::move(body));
    }
    case Kind::Output:
    case Kind::RepOutput:
      return with_body(t, t->subject, t->object, sort_tree(t->body, env));
    case Kind::Restrict: {
      Term body;
      {
        detail::Scoped bind(env.bound, t->object, ShapeEnv::Binding{false, env.next_uid++});
        body = sort_tree(t->body, env);
      }
      return with_body(t, t->subject, t->object, std::move(body));
    }
    case Kind::Par: {
      std::vector<std::pair<std::string, Term>> keyed;
      for (const auto& p : t->parts) {
        auto sorted = sort_tree(p, env);
        std::string k;
        std::map<int, int> local;
        shape(sorted, env, local, k);
        keyed.emplace_back(std::move(k), std::move(sorted));
      }
      std::stable_sort(keyed.begin(), keyed.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<Term> parts;
      for (auto& [k, p] : keyed) parts.push_back(std::move(p));
      return par(std::move(parts));
    }
  }
  return t;
}

void first_occurrences(const Term& t, std::vector<Name>& seen, NameSet& seen_set) {
  auto note = [&](const Name& n) {
    if (seen_set.insert(n).second) seen.push_back(n);
  };
  switch (t->kind) {
    case Kind::Nil:
      return;
    case Kind::Par:
      for (const auto& p : t->parts) first_occurrences(p, seen, seen_set);
      return;
    case Kind::Restrict:
      first_occurrences(t->body, seen, seen_set);
      return;
    case Kind::Input:
    case Kind::RepInput:
      note(t->subject);
      first_occurrences(t->body, seen, seen_set);
      return;
    case Kind::Output:
    case Kind::RepOutput:
      note(t->subject);
      note(t->object);
      first_occurrences(t->body, seen, seen_set);
      return;
  }
}

struct Renamer {
  const NameSet& avoid;
  bool reorder_blocks;
  int counter = 0;

  Name next(const Name& old) {
    for (;;) {
      Name n{old.sort, "#" + canonical_stem(old) + "." + std::to_string(counter++)};
      if (!avoid.count(n)) return n;
    }
  }

  Term run(const Term& t, const NameMap& env) {
    switch (t->kind) {
      case Kind::Nil:
        return t;
      case Kind::Output:
      case Kind::RepOutput:
        return with_body(t, lookup(env, t->subject), lookup(env, t->object), run(t->body, env));
      case Kind::Par: {
        std::vector<Term> parts;
        for (const auto& p : t->parts) parts.push_back(run(p, env));
        return par(std::move(parts));
      }
      case Kind::Input:
      case Kind::RepInput: {
        NameMap inner = env;
        Name b = next(t->object);
        inner[t->object] = b;
        return with_body(t, lookup(env, t->subject), b, run(t->body, inner));
      }
      case Kind::Restrict: {
        std::vector<Name> block;
        Term cur = t;
        if (reorder_blocks) {
          while (cur->kind == Kind::Restrict) {
            block.push_back(cur->object);
            cur = cur->body;
          }
          std::vector<Name> seen;
          NameSet seen_set;
          first_occurrences(cur, seen, seen_set);
          std::vector<Name> ordered;
          for (const auto& n : seen)
            if (std::find(block.begin(), block.end(), n) != block.end()) ordered.push_back(n);
          for (const auto& n : block)
            if (std::find(ordered.begin(), ordered.end(), n) == ordered.end()) ordered.push_back(n);
          block = std::move(ordered);
        } else {
          block.push_back(t->object);
          cur = t->body;
        }
        NameMap inner = env;
        std::vector<Name> renamed;
        for (const auto& n : block) {
          renamed.push_back(next(n));
          inner[n] = renamed.back();
        }
        return restrict_all(renamed, run(cur, inner));
      }
    }
    return t;
  }
};

void show_into(const Term& t, std::string& out) {
  switch (t->kind) {
    case Kind::Nil:
      out += '0';
      return;
    case Kind::Input:
    case Kind::RepInput:
      if (t->kind == Kind::RepInput) out += '!';
      out += t->subject.id;
      out += '(';
      out += t->object.id;
      out += ").";
      show_into(t->body, out);
      return;
    case Kind::Output:
    case Kind::RepOutput:
      if (t->kind == Kind::RepOutput) out += '!';
      out += t->subject.id;
      out += '!';
      out += t->object.id;
      out += '.';
      show_into(t->body, out);
      return;
    case Kind::Restrict:
      out += "(new ";
      out += t->object.id;
      out += ") ";
      show_into(t->body, out);
      return;
    case Kind::Par:
      out += '(';
      for (std::size_t i = 0; i < t->parts.size(); ++i) {
        if (i) out += " | ";
        show_into(t->parts[i], out);
      }
      out += ')';
      return;
  }
}

}  // namespace

Term nil() { return shared_nil(); }

Term input(Name subject, Name binder, Term body) {
  return make(Node{Kind::Input, std::move(subject), std::move(binder), std::move(body), {}});
}

Term output(Name subject, Name object, Term body) {
  return make(Node{Kind::Output, std::move(subject), std::move(object), std::move(body), {}});
}

Term restrict(Name constant, Term body) {
  if (!constant.is_constant()) throw Error("restriction binds constants only: " + constant.id);
  return make(Node{Kind::Restrict, {}, std::move(constant), std::move(body), {}});
}

Term par(Term left, Term right) { return par(std::vector<Term>{std::move(left), std::move(right)}); }

Term par(std::vector<Term> parts) {
  if (parts.empty()) return nil();
  if (parts.size() == 1) return std::move(parts.front());
  return make(Node{Kind::Par, {}, {}, nullptr, std::move(parts)});
}

Term rep_input(Name subject, Name binder, Term body) {
  return make(Node{Kind::RepInput, std::move(subject), std::move(binder), std::move(body), {}});
}

Term rep_output(Name subject, Name object, Term body) {
  return make(Node{Kind::RepOutput, std::move(subject), std::move(object), std::move(body), {}});
}

FreeNames free_names(const Term& t) {
  FreeNames out;
  NameSet bound;
  collect_free(t, bound, out);
  return out;
}

NameSet free_constants(const Term& t) { return free_names(t).constants; }

bool is_closed(const Term& t) { return free_names(t).variables.empty(); }

NameSet all_names(const Term& t) {
  NameSet out;
  collect_all(t, out);
  return out;
}

Term substitute(const Term& t, const NameMap& map) {
  NameSet range;
  for (const auto& [from, to] : map) range.insert(to);
  return subst(t, map, range);
}

Term freshen(const Term& t) { return freshen(t, NameMap{}); }

Term normalize(const Term& t) {
  auto simple = simplify(freshen(t, {}));
  ShapeEnv env;
  auto sorted = sort_tree(simple, env);
  auto fn = free_names(sorted);
  NameSet avoid = fn.constants;
  avoid.insert(fn.variables.begin(), fn.variables.end());
  Renamer r{avoid, true};
  return r.run(sorted, {});
}

Term alpha_canonical(const Term& t) {
  auto fn = free_names(t);
  NameSet avoid = fn.constants;
  avoid.insert(fn.variables.begin(), fn.variables.end());
  Renamer r{avoid, false};
  return r.run(t, {});
}

bool alpha_equal(const Term& a, const Term& b) {
  return show(alpha_canonical(a)) == show(alpha_canonical(b));
}

bool struct_congruent(const Term& a, const Term& b) { return key(a) == key(b); }

std::string show(const Term& t) {
  std::string out;
  show_into(t, out);
  return out;
}

std::string key(const Term& t) { return show(normalize(t)); }

std::size_t size(const Term& t) {
  switch (t->kind) {
    case Kind::Nil:
      return 1;
    case Kind::Par: {
      std::size_t s = 1;
      for (const auto& p : t->parts) s += size(p);
      return s;
    }
    default:
      return 1 + size(t->body);
  }
}

Term forget_auxiliary(const Term& t) {
  switch (t->kind) {
    case Kind::Nil:
      return t;
    case Kind::Par: {
      std::vector<Term> parts;
      for (const auto& p : t->parts) parts.push_back(forget_auxiliary(p));
      return par(std::move(parts));
    }
    default:
      return with_body(t, without_aux_marker(t->subject), without_aux_marker(t->object),
                       forget_auxiliary(t->body));
  }
}

}  // namespace pcalc::pi
