#include "pcalc/c_term.hpp"

#include <algorithm>

namespace pcalc::cc {

namespace {

Term make(Node n) { return std::make_shared<const Node>(std::move(n)); }

void flatten(const Term& t, std::vector<Term>& atoms) {
  if (t->kind == Kind::Par) {
    for (const auto& p : t->parts) flatten(p, atoms);
  } else if (t->kind != Kind::Nil) {
    atoms.push_back(t);
  }
}

void show_into(const Term& t, std::string& s) {
  switch (t->kind) {
    case Kind::Nil:
      s += '0';
      return;
    case Kind::Omega:
      s += "Omega";
      return;
    case Kind::Stuck:
      s += "Stuck";
      return;
    case Kind::Out:
      s += t->subject.id;
      s += "!(";
      for (std::size_t i = 0; i < t->values.size(); ++i) {
        if (i) s += ',';
        s += t->values[i].str();
      }
      s += ')';
      return;
    case Kind::FuncBox:
      s += "F[" + t->subject.id + "->" + t->target.id + "](" + t->fun_name + ")";
      return;
    case Kind::Par:
      s += '(';
      for (std::size_t i = 0; i < t->parts.size(); ++i) {
        if (i) s += " | ";
        show_into(t->parts[i], s);
      }
      s += ')';
      return;
  }
}

}  // namespace

Term nil() {
  static const Term t = make(Node{});
  return t;
}

Term omega() {
  static const Term t = make(Node{Kind::Omega, {}, {}, {}, {}, nullptr, {}});
  return t;
}

Term stuck() {
  static const Term t = make(Node{Kind::Stuck, {}, {}, {}, {}, nullptr, {}});
  return t;
}

Term out(Name subject, std::vector<Natural> values) {
  if (values.empty()) throw Error("output needs at least one value");
  return make(Node{Kind::Out, std::move(subject), {}, std::move(values), {}, nullptr, {}});
}

Term func_box(Name in, Name out, std::string fun_name, recfun::Fun fun) {
  return make(Node{Kind::FuncBox, std::move(in), std::move(out), {}, std::move(fun_name),
                   std::move(fun), {}});
}

Term par(Term left, Term right) { return par(std::vector<Term>{std::move(left), std::move(right)}); }

Term par(std::vector<Term> parts) {
  if (parts.empty()) return nil();
  if (parts.size() == 1) return std::move(parts.front());
  return make(Node{Kind::Par, {}, {}, {}, {}, nullptr, std::move(parts)});
}

void check_well_formed(const Term& t) {
  if (t->kind == Kind::Par) {
    for (const auto& p : t->parts) check_well_formed(p);
  } else if (t->kind == Kind::FuncBox) {
    if (!t->fun) throw Error("unresolved function " + t->fun_name);
    if (recfun::arity_check(t->fun) < 1) {
      throw ArityError("function box " + t->fun_name + " must consume at least one value");
    }
  }
}

NameSet free_names(const Term& t) {
  NameSet out;
  std::vector<Term> atoms;
  flatten(t, atoms);
  for (const auto& a : atoms) {
    if (a->kind == Kind::Out) out.insert(a->subject);
    if (a->kind == Kind::FuncBox) {
      out.insert(a->subject);
      out.insert(a->target);
    }
  }
  return out;
}

Term normalize(const Term& t) {
  std::vector<Term> atoms;
  flatten(t, atoms);
  std::vector<std::pair<std::string, Term>> keyed;
  bool seen_omega = false;
  for (auto& a : atoms) {
    if (a->kind == Kind::Omega) {
      if (seen_omega) continue;
      seen_omega = true;
    }
    keyed.emplace_back(show(a), a);
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Term> parts;
  for (auto& [k, a] : keyed) parts.push_back(std::move(a));
  return par(std::move(parts));
}

bool c_congruent(const Term& a, const Term& b) { return key(a) == key(b); }
bool struct_congruent(const Term& a, const Term& b) { return c_congruent(a, b); }

std::string show(const Term& t) {
  std::string s;
  show_into(t, s);
  return s;
}

std::string key(const Term& t) { return show(normalize(t)); }

}  // namespace pcalc::cc
