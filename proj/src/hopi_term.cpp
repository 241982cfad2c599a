#include "pcalc/hopi_term.hpp"

#include "pcalc/detail/scoped.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <utility>

namespace pcalc::hopi {

namespace {

Term make(Node n) { return std::make_shared<const Node>(std::move(n)); }

Name lookup(const std::map<Name, Name>& m, const Name& n) {
  auto it = m.find(n);
  return it == m.end() ? n : it->second;
}

std::vector<Name> lookup_all(const std::map<Name, Name>& m, const std::vector<Name>& ns) {
  std::vector<Name> out;
  out.reserve(ns.size());
  for (const auto& n : ns) out.push_back(lookup(m, n));
  return out;
}

// Rebuilds a node from its children, keeping every other field.
Term rebuild(const Term& t, Term payload, Term body) {
  Node n = *t;
  n.payload = std::move(payload);
  n.body = std::move(body);
  return make(std::move(n));
}

struct FreeCollector {
  FreeNames out;
  std::map<Name, int> bound;
  std::map<std::string, int> bound_vars;

  void note(const Name& n) {
    if (bound.count(n) && bound[n] > 0) return;
    (n.is_constant() ? out.constants : out.variables).insert(n);
  }

  void run(const Term& t) {
    switch (t->kind) {
      case Kind::Nil:
        return;
      case Kind::Var:
        if (!(bound_vars.count(t->var) && bound_vars[t->var] > 0)) out.process_vars.insert(t->var);
        return;
      case Kind::In:
        note(t->subject);
        ++bound_vars[t->var];
        run(t->body);
        --bound_vars[t->var];
        return;
      case Kind::Out:
        note(t->subject);
        run(t->payload);
        run(t->body);
        return;
      case Kind::Par:
        for (const auto& p : t->parts) run(p);
        return;
      case Kind::Res:
        ++bound[t->subject];
        run(t->body);
        --bound[t->subject];
        return;
      case Kind::Abs:
        for (const auto& p : t->names) ++bound[p];
        run(t->body);
        for (const auto& p : t->names) --bound[p];
        return;
      case Kind::App:
        run(t->payload);
        for (const auto& a : t->names) note(a);
        return;
      case Kind::Rep:
        run(t->body);
        return;
    }
  }
};

void collect_all(const Term& t, NameSet& out) {
  switch (t->kind) {
    case Kind::Nil:
    case Kind::Var:
      return;
    case Kind::In:
      out.insert(t->subject);
      collect_all(t->body, out);
      return;
    case Kind::Out:
      out.insert(t->subject);
      collect_all(t->payload, out);
      collect_all(t->body, out);
      return;
    case Kind::Par:
      for (const auto& p : t->parts) collect_all(p, out);
      return;
    case Kind::Res:
      out.insert(t->subject);
      collect_all(t->body, out);
      return;
    case Kind::Abs:
      out.insert(t->names.begin(), t->names.end());
      collect_all(t->body, out);
      return;
    case Kind::App:
      out.insert(t->names.begin(), t->names.end());
      collect_all(t->payload, out);
      return;
    case Kind::Rep:
      collect_all(t->body, out);
      return;
  }
}

struct Substituter {
  NameSet range_names;
  std::set<std::string> range_vars;

  Term run(const Term& t, const Substitution& s) {
    if (s.names.empty() && s.processes.empty()) return t;
    switch (t->kind) {
      case Kind::Nil:
        return t;
      case Kind::Var: {
        auto it = s.processes.find(t->var);
        return it == s.processes.end() ? t : it->second;
      }
      case Kind::In: {
        Substitution inner = s;
        inner.processes.erase(t->var);
        std::string binder = t->var;
        if (range_vars.count(binder)) {
          binder = fresh_id(binder);
          inner.processes[t->var] = var(binder);
        }
        return input(lookup(s.names, t->subject), binder, run(t->body, inner));
      }
      case Kind::Out:
        return output(lookup(s.names, t->subject), run(t->payload, s), run(t->body, s));
      case Kind::Par: {
        std::vector<Term> parts;
        parts.reserve(t->parts.size());
        for (const auto& p : t->parts) parts.push_back(run(p, s));
        return par(std::move(parts));
      }
      case Kind::Res: {
        Substitution inner = s;
        inner.names.erase(t->subject);
        Name c = t->subject;
        if (range_names.count(c)) {
          c = fresh_constant(c.id);
          inner.names[t->subject] = c;
        }
        return restrict(c, run(t->body, inner));
      }
      case Kind::Abs: {
        Substitution inner = s;
        std::vector<Name> params;
        for (const auto& p : t->names) {
          inner.names.erase(p);
          Name q = p;
          if (range_names.count(q)) {
            q = fresh_variable(q.id);
            inner.names[p] = q;
          }
          params.push_back(q);
        }
        return abstraction(std::move(params), run(t->body, inner));
      }
      case Kind::App: {
        auto fun = run(t->payload, s);
        auto args = lookup_all(s.names, t->names);
        if (fun->kind == Kind::Abs && fun->names.size() != args.size()) {
          throw ArityError("application of a " + std::to_string(fun->names.size()) +
                           "-ary abstraction to " + std::to_string(args.size()) + " names");
        }
        return application(std::move(fun), std::move(args));
      }
      case Kind::Rep:
        return replicate(run(t->body, s));
    }
    return t;
  }
};

// ---------------------------------------------------------------------------
// Normalization.

struct Freshener {
  std::map<Name, Name> env;
  std::map<std::string, std::string> venv;

  Term run(const Term& t) {
    switch (t->kind) {
      case Kind::Nil:
        return t;
      case Kind::Var: {
        auto it = venv.find(t->var);
        return it == venv.end() ? t : var(it->second);
      }
      case Kind::In: {
        auto b = fresh_id(t->var);
        detail::Scoped bind(venv, t->var, b);
        return input(lookup(env, t->subject), b, run(t->body));
      }
      case Kind::Out: {
        auto payload = run(t->payload);
        return output(lookup(env, t->subject), std::move(payload), run(t->body));
      }
      case Kind::Par: {
        std::vector<Term> parts;
        for (const auto& p : t->parts) parts.push_back(run(p));
        return par(std::move(parts));
      }
      case Kind::Res: {
        auto c = fresh_constant(t->subject.id);
        detail::Scoped bind(env, t->subject, c);
        return restrict(c, run(t->body));
      }
      case Kind::Abs: {
        std::vector<Name> params;
        std::vector<detail::Scoped<Name, Name>> binds;
        for (const auto& p : t->names) {
          params.push_back(fresh_variable(p.id));
          binds.emplace_back(env, p, params.back());
        }
        auto body = run(t->body);
        while (!binds.empty()) binds.pop_back();
        return abstraction(std::move(params), std::move(body));
      }
      case Kind::App:
        return application(run(t->payload), lookup_all(env, t->names));
      case Kind::Rep:
        return replicate(run(t->body));
    }
    return t;
  }
};

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

std::vector<Term> scope(std::vector<Name> names, std::vector<Term> comps);

// Assumes unique binders (see Freshener).
Term simplify(const Term& t) {
  switch (t->kind) {
    case Kind::Nil:
    case Kind::Var:
      return t;
    case Kind::In:
      return rebuild(t, nullptr, simplify(t->body));
    case Kind::Out:
      return rebuild(t, simplify(t->payload), simplify(t->body));
    case Kind::Rep:
      return rebuild(t, nullptr, simplify(t->body));
    case Kind::Abs:
      return rebuild(t, nullptr, simplify(t->body));
    case Kind::App: {
      auto fun = simplify(t->payload);
      if (fun->kind == Kind::Abs) {
        if (fun->names.size() != t->names.size()) {
          throw ArityError("application of a " + std::to_string(fun->names.size()) +
                           "-ary abstraction to " + std::to_string(t->names.size()) + " names");
        }
        std::map<Name, Name> m;
        for (std::size_t i = 0; i < t->names.size(); ++i) m[fun->names[i]] = t->names[i];
        return simplify(rename(fun->body, m));
      }
      if (fun->kind == Kind::Var) {
        if (t->names.empty()) return fun;
        return application(fun, t->names);
      }
      throw NotAnAbstraction("application of a non-parameterized process");
    }
    case Kind::Par: {
      std::vector<Term> flat;
      for (const auto& p : t->parts) {
        for (auto& c : components(simplify(p))) flat.push_back(std::move(c));
      }
      return from_components(std::move(flat));
    }
    case Kind::Res: {
      std::vector<Name> names;
      Term cur = t;
      while (cur->kind == Kind::Res) {
        names.push_back(cur->subject);
        cur = cur->body;
      }
      return from_components(scope(std::move(names), components(simplify(cur))));
    }
  }
  return t;
}

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
    if (it == owner.end()) continue;
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
    if (gcomps.size() == 1 && gcomps.front()->kind == Kind::Res) {
      Term cur = gcomps.front();
      while (cur->kind == Kind::Res) {
        gnames.push_back(cur->subject);
        cur = cur->body;
      }
      for (auto& c : scope(gnames, components(cur))) out.push_back(std::move(c));
    } else {
      out.push_back(restrict_all(gnames, from_components(std::move(gcomps))));
    }
  }
  return out;
}

struct ShapeEnv {
  std::map<Name, std::pair<bool, int>> bound;  // (is parameter, depth-or-uid)
  std::map<Name, int> param_index;
  std::map<std::string, int> vars;
  int abs_depth = 0;
  int var_depth = 0;
  int next_uid = 0;
};

// Runs f with the parameters of abstraction t bound in env.
template <class F>
void with_params(ShapeEnv& env, const Term& t, F f) {
  ++env.abs_depth;
  std::vector<detail::Scoped<Name, std::pair<bool, int>>> bound;
  std::vector<detail::Scoped<Name, int>> index;
  for (std::size_t i = 0; i < t->names.size(); ++i) {
    bound.emplace_back(env.bound, t->names[i], std::pair<bool, int>{true, env.abs_depth});
    index.emplace_back(env.param_index, t->names[i], static_cast<int>(i));
  }
  f();
  while (!index.empty()) index.pop_back();
  while (!bound.empty()) bound.pop_back();
  --env.abs_depth;
}

struct Shaper {
  ShapeEnv& env;
  std::vector<std::pair<int, int>> local;  // restriction uid, order of first use
  std::string out;

  void number(int k) {
    char buf[16];
    auto [end, _] = std::to_chars(buf, buf + sizeof buf, k);
    out.append(buf, end);
  }

  void name(const Name& n) {
    auto it = env.bound.find(n);
    if (it == env.bound.end()) {
      if (n.is_variable()) out += '?';
      out += n.id;
      return;
    }
    if (it->second.first) {
      out += '^';
      number(env.abs_depth - it->second.second);
      out += '.';
      number(env.param_index.find(n)->second);
      return;
    }
    int uid = it->second.second, slot = -1;
    for (const auto& [u, k] : local) {
      if (u == uid) {
        slot = k;
        break;
      }
    }
    if (slot < 0) {
      slot = static_cast<int>(local.size());
      local.emplace_back(uid, slot);
    }
    out += '_';
    if (is_auxiliary(n)) out += stem_of(n.id) + ':';
    number(slot);
  }

  void run(const Term& t) {
    switch (t->kind) {
      case Kind::Nil:
        out += '0';
        return;
      case Kind::Var: {
        auto it = env.vars.find(t->var);
        if (it == env.vars.end()) {
          out += t->var;
        } else {
          out += '%';
          number(env.var_depth - it->second);
        }
        return;
      }
      case Kind::In: {
        name(t->subject);
        out += "(.).";
        {
          detail::Scoped bind(env.vars, t->var, env.var_depth++);
          run(t->body);
        }
        --env.var_depth;
        return;
      }
      case Kind::Out:
        name(t->subject);
        out += "!{";
        run(t->payload);
        out += "}.";
        run(t->body);
        return;
      case Kind::Par:
        out += '(';
        for (std::size_t i = 0; i < t->parts.size(); ++i) {
          if (i) out += '|';
          run(t->parts[i]);
        }
        out += ')';
        return;
      case Kind::Res: {
        out += "(new)";
        detail::Scoped bind(env.bound, t->subject, std::pair<bool, int>{false, env.next_uid++});
        run(t->body);
        return;
      }
      case Kind::Abs: {
        out += '<';
        out += std::to_string(t->names.size());
        out += '>';
        with_params(env, t, [&] { run(t->body); });
        return;
      }
      case Kind::App:
        out += '{';
        run(t->payload);
        out += "}<";
        for (const auto& a : t->names) {
          name(a);
          out += ',';
        }
        out += '>';
        return;
      case Kind::Rep:
        out += '!';
        run(t->body);
        return;
    }
  }
};

Term sort_tree(const Term& t, ShapeEnv& env) {
  switch (t->kind) {
    case Kind::Nil:
    case Kind::Var:
      return t;
    case Kind::In: {
      Term body;
      {
        detail::Scoped bind(env.vars, t->var, env.var_depth++);
        body = sort_tree(t->body, env);
      }
      --env.var_depth;
      return rebuild(t, nullptr, std::move(body));
    }
    case Kind::Out:
      return rebuild(t, sort_tree(t->payload, env), sort_tree(t->body, env));
    case Kind::Rep:
      return rebuild(t, nullptr, sort_tree(t->body, env));
    case Kind::App:
      return rebuild(t, sort_tree(t->payload, env), nullptr);
    case Kind::Res: {
      Term body;
      {
        detail::Scoped bind(env.bound, t->subject, std::pair<bool, int>{false, env.next_uid++});
        body = sort_tree(t->body, env);
      }
      return rebuild(t, nullptr, std::move(body));
    }
    case Kind::Abs: {
      Term body;
      with_params(env, t, [&] { body = sort_tree(t->body, env); });
      return rebuild(t, nullptr, std::move(body));
    }
    case Kind::Par: {
      std::vector<std::pair<std::string, Term>> keyed;
      for (const auto& p : t->parts) {
        auto sorted = sort_tree(p, env);
        Shaper sh{env, {}, {}};
        sh.run(sorted);
        keyed.emplace_back(std::move(sh.out), std::move(sorted));
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
    case Kind::Var:
      return;
    case Kind::In:
      note(t->subject);
      first_occurrences(t->body, seen, seen_set);
      return;
    case Kind::Out:
      note(t->subject);
      first_occurrences(t->payload, seen, seen_set);
      first_occurrences(t->body, seen, seen_set);
      return;
    case Kind::Par:
      for (const auto& p : t->parts) first_occurrences(p, seen, seen_set);
      return;
    case Kind::Res:
    case Kind::Abs:
    case Kind::Rep:
      first_occurrences(t->body, seen, seen_set);
      return;
    case Kind::App:
      first_occurrences(t->payload, seen, seen_set);
      for (const auto& a : t->names) note(a);
      return;
  }
}

struct Renamer {
  NameSet avoid;
  std::set<std::string> avoid_vars;
  bool reorder_blocks;
  int counter = 0;

  Name next(const Name& old) {
    for (;;) {
      Name n{old.sort, "#" + canonical_stem(old) + "." + std::to_string(counter++)};
      if (!avoid.count(n)) return n;
    }
  }

  std::string next_var() {
    for (;;) {
      auto v = "#X." + std::to_string(counter++);
      if (!avoid_vars.count(v)) return v;
    }
  }

  std::map<Name, Name> env;
  std::map<std::string, std::string> venv;

  Term run(const Term& t) {
    switch (t->kind) {
      case Kind::Nil:
        return t;
      case Kind::Var: {
        auto it = venv.find(t->var);
        return it == venv.end() ? t : var(it->second);
      }
      case Kind::In: {
        auto b = next_var();
        detail::Scoped bind(venv, t->var, b);
        return input(lookup(env, t->subject), b, run(t->body));
      }
      case Kind::Out: {
        auto subject = lookup(env, t->subject);
        auto payload = run(t->payload);
        return output(subject, payload, run(t->body));
      }
      case Kind::Par: {
        std::vector<Term> parts;
        for (const auto& p : t->parts) parts.push_back(run(p));
        return par(std::move(parts));
      }
      case Kind::Res: {
        std::vector<Name> block;
        Term cur = t;
        if (reorder_blocks) {
          while (cur->kind == Kind::Res) {
            block.push_back(cur->subject);
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
          block.push_back(t->subject);
          cur = t->body;
        }
        std::vector<Name> renamed;
        std::vector<detail::Scoped<Name, Name>> binds;
        for (const auto& n : block) {
          renamed.push_back(next(n));
          binds.emplace_back(env, n, renamed.back());
        }
        auto body = run(cur);
        while (!binds.empty()) binds.pop_back();
        return restrict_all(renamed, std::move(body));
      }
      case Kind::Abs: {
        std::vector<Name> params;
        std::vector<detail::Scoped<Name, Name>> binds;
        for (const auto& p : t->names) {
          params.push_back(next(p));
          binds.emplace_back(env, p, params.back());
        }
        auto body = run(t->body);
        while (!binds.empty()) binds.pop_back();
        return abstraction(std::move(params), std::move(body));
      }
      case Kind::App: {
        auto fun = run(t->payload);
        return application(std::move(fun), lookup_all(env, t->names));
      }
      case Kind::Rep:
        return replicate(run(t->body));
    }
    return t;
  }
};

Renamer make_renamer(const Term& t, bool reorder) {
  auto fn = free_names(t);
  Renamer r{fn.constants, fn.process_vars, reorder};
  r.avoid.insert(fn.variables.begin(), fn.variables.end());
  return r;
}

void show_into(const Term& t, std::string& out);

void show_atom(const Term& t, std::string& out) {
  if (t->kind == Kind::Nil || t->kind == Kind::Var || t->kind == Kind::Par) {
    show_into(t, out);
  } else {
    out += '(';
    show_into(t, out);
    out += ')';
  }
}

void show_names(const std::vector<Name>& ns, std::string& out) {
  out += '<';
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (i) out += ',';
    out += ns[i].id;
  }
  out += '>';
}

void show_into(const Term& t, std::string& out) {
  switch (t->kind) {
    case Kind::Nil:
      out += '0';
      return;
    case Kind::Var:
      out += t->var;
      return;
    case Kind::In:
      out += t->subject.id;
      out += '(';
      out += t->var;
      out += ").";
      show_into(t->body, out);
      return;
    case Kind::Out:
      out += t->subject.id;
      out += '!';
      show_atom(t->payload, out);
      out += '.';
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
    case Kind::Res:
      out += "(new ";
      out += t->subject.id;
      out += ") ";
      show_into(t->body, out);
      return;
    case Kind::Abs:
      show_names(t->names, out);
      out += ' ';
      show_into(t->body, out);
      return;
    case Kind::App:
      show_atom(t->payload, out);
      show_names(t->names, out);
      return;
    case Kind::Rep:
      out += '!';
      show_atom(t->body, out);
      return;
  }
}

Term expand(const Term& t) {
  switch (t->kind) {
    case Kind::Nil:
    case Kind::Var:
      return t;
    case Kind::In:
    case Kind::Res:
    case Kind::Abs:
      return rebuild(t, nullptr, expand(t->body));
    case Kind::Out:
      return rebuild(t, expand(t->payload), expand(t->body));
    case Kind::App:
      return rebuild(t, expand(t->payload), nullptr);
    case Kind::Par: {
      std::vector<Term> parts;
      for (const auto& p : t->parts) parts.push_back(expand(p));
      return par(std::move(parts));
    }
    case Kind::Rep: {
      auto c = fresh_constant("rep");
      auto x = fresh_id("X");
      auto q = input(c, x, par({var(x), expand(t->body), output(c, var(x), nil())}));
      return restrict(c, par(q, output(c, q, nil())));
    }
  }
  return t;
}

}  // namespace

Term nil() {
  static const Term t = make(Node{});
  return t;
}

Term var(std::string id) {
  Node n;
  n.kind = Kind::Var;
  n.var = std::move(id);
  return make(std::move(n));
}

Term input(Name subject, std::string binder, Term body) {
  Node n;
  n.kind = Kind::In;
  n.subject = std::move(subject);
  n.var = std::move(binder);
  n.body = std::move(body);
  return make(std::move(n));
}

Term output(Name subject, Term payload, Term body) {
  Node n;
  n.kind = Kind::Out;
  n.subject = std::move(subject);
  n.payload = std::move(payload);
  n.body = std::move(body);
  return make(std::move(n));
}

Term par(Term left, Term right) { return par(std::vector<Term>{std::move(left), std::move(right)}); }

Term par(std::vector<Term> parts) {
  if (parts.empty()) return nil();
  if (parts.size() == 1) return std::move(parts.front());
  Node n;
  n.kind = Kind::Par;
  n.parts = std::move(parts);
  return make(std::move(n));
}

Term restrict(Name constant, Term body) {
  if (!constant.is_constant()) throw Error("restriction binds constants only: " + constant.id);
  Node n;
  n.kind = Kind::Res;
  n.subject = std::move(constant);
  n.body = std::move(body);
  return make(std::move(n));
}

Term restrict_all(const std::vector<Name>& constants, Term body) {
  for (auto it = constants.rbegin(); it != constants.rend(); ++it) body = restrict(*it, std::move(body));
  return body;
}

Term abstraction(std::vector<Name> params, Term body) {
  if (params.empty()) throw Error("abstraction needs at least one parameter");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].is_variable()) throw Error("abstraction parameters must be name variables");
    for (std::size_t j = 0; j < i; ++j)
      if (params[i] == params[j]) throw Error("duplicate abstraction parameter " + params[i].id);
  }
  Node n;
  n.kind = Kind::Abs;
  n.names = std::move(params);
  n.body = std::move(body);
  return make(std::move(n));
}

Term application(Term fun, std::vector<Name> args) {
  Node n;
  n.kind = Kind::App;
  n.payload = std::move(fun);
  n.names = std::move(args);
  return make(std::move(n));
}

Term replicate(Term body) {
  Node n;
  n.kind = Kind::Rep;
  n.body = std::move(body);
  return make(std::move(n));
}

FreeNames free_names(const Term& t) {
  FreeCollector c;
  c.run(t);
  return std::move(c.out);
}

NameSet free_constants(const Term& t) { return free_names(t).constants; }

bool is_closed(const Term& t) {
  auto fn = free_names(t);
  return fn.variables.empty() && fn.process_vars.empty();
}

NameSet all_names(const Term& t) {
  NameSet out;
  collect_all(t, out);
  return out;
}

Term substitute(const Term& t, const Substitution& s) {
  Substituter sub;
  for (const auto& [from, to] : s.names) sub.range_names.insert(to);
  for (const auto& [x, image] : s.processes) {
    auto fn = free_names(image);
    sub.range_names.insert(fn.constants.begin(), fn.constants.end());
    sub.range_names.insert(fn.variables.begin(), fn.variables.end());
    sub.range_vars.insert(fn.process_vars.begin(), fn.process_vars.end());
  }
  return sub.run(t, s);
}

Term rename(const Term& t, const std::map<Name, Name>& names) {
  return substitute(t, Substitution{names, {}});
}

Term apply_abstraction(const Term& fun, const std::vector<Name>& args) {
  Term f = fun;
  while (f->kind == Kind::App) f = apply_abstraction(f->payload, f->names);
  if (f->kind != Kind::Abs) throw NotAnAbstraction("not an abstraction: " + show(fun));
  if (f->names.size() != args.size()) {
    throw ArityError("abstraction expects " + std::to_string(f->names.size()) + " names, got " +
                     std::to_string(args.size()));
  }
  std::map<Name, Name> m;
  for (std::size_t i = 0; i < args.size(); ++i) m[f->names[i]] = args[i];
  return rename(f->body, m);
}

std::size_t parameter_count(const Term& t) {
  return t->kind == Kind::Abs ? t->names.size() : 0;
}

Term freshen(const Term& t) { return Freshener{}.run(t); }

Term normalize(const Term& t) {
  auto simple = simplify(Freshener{}.run(t));
  ShapeEnv env;
  auto sorted = sort_tree(simple, env);
  auto r = make_renamer(sorted, true);
  return r.run(sorted);
}

Term alpha_canonical(const Term& t) {
  auto r = make_renamer(t, false);
  return r.run(t);
}

bool alpha_equal(const Term& a, const Term& b) {
  return show(alpha_canonical(a)) == show(alpha_canonical(b));
}

bool struct_congruent(const Term& a, const Term& b) { return key(a) == key(b); }

Term expand_replication(const Term& t) { return expand(t); }

std::string show(const Term& t) {
  std::string out;
  show_into(t, out);
  return out;
}

std::string key(const Term& t) { return show(normalize(t)); }

std::size_t size(const Term& t) {
  switch (t->kind) {
    case Kind::Nil:
    case Kind::Var:
      return 1;
    case Kind::Out:
      return 1 + size(t->payload) + size(t->body);
    case Kind::App:
      return 1 + size(t->payload);
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
  Node n = *t;
  n.subject = without_aux_marker(n.subject);
  for (auto& m : n.names) m = without_aux_marker(m);
  if (n.payload) n.payload = forget_auxiliary(n.payload);
  if (n.body) n.body = forget_auxiliary(n.body);
  for (auto& p : n.parts) p = forget_auxiliary(p);
  return make(std::move(n));
}

}  // namespace pcalc::hopi
