#include <functional>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_map>

#include "pcalc/semantics.hpp"

namespace pcalc {

Action Action::tau(std::optional<Name> via) {
  Action a;
  a.kind = Kind::Tau;
  a.via = std::move(via);
  return a;
}

namespace {

std::string show_tuple(const Tuple& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ',';
    s += t[i].str();
  }
  return s + ")";
}

}  // namespace

std::string label_key(const Action& a) {
  switch (a.kind) {
    case Action::Kind::Tau:
      return "tau";
    case Action::Kind::PiIn:
      return a.subject.id + "(" + a.object.id + ")";
    case Action::Kind::PiOut:
      return a.subject.id + "!" + a.object.id;
    case Action::Kind::PiBoundOut:
      return a.subject.id + "!(new " + a.object.id + ")";
    case Action::Kind::HoIn:
      return a.subject.id + "?[" + hopi::key(a.payload) + "]";
    case Action::Kind::HoOut: {
      std::string s;
      if (!a.extruded.empty()) {
        s = "(new ";
        for (std::size_t i = 0; i < a.extruded.size(); ++i) {
          if (i) s += ',';
          s += a.extruded[i].id;
        }
        s += ") ";
      }
      return s + a.subject.id + "![" + hopi::key(a.payload) + "]";
    }
    case Action::Kind::CIn:
      return a.subject.id + "?" + show_tuple(a.tuple);
    case Action::Kind::COut:
      return a.subject.id + "!" + show_tuple(a.tuple);
  }
  return "?";
}

Name canonical_fresh(const NameSet& avoid, std::size_t skip) {
  for (std::size_t k = 0;; ++k) {
    Name n = Name::constant("#e:" + std::to_string(k));
    if (avoid.count(n)) continue;
    if (skip == 0) return n;
    --skip;
  }
}

// ---------------------------------------------------------------------------
// pi

namespace {

struct PiCommit {
  enum class Kind { Tau, In, Out, BoundOut };
  Kind kind;
  Name subject;
  Name object;
  std::optional<Name> via;
  pi::Term residual;
  std::function<pi::Term(const Name&)> build;
};

void require_constant(const Name& n) {
  if (!n.is_constant()) throw OpenTermError("free variable " + n.id + " in a prefix");
}

std::vector<PiCommit> pi_commits(const pi::Term& t) {
  using K = pi::Kind;
  std::vector<PiCommit> out;
  switch (t->kind) {
    case K::Nil:
      break;
    case K::Input:
    case K::RepInput: {
      require_constant(t->subject);
      bool rep = t->kind == K::RepInput;
      out.push_back({PiCommit::Kind::In, t->subject, {}, {}, nullptr,
                     [t, rep](const Name& b) {
                       auto r = pi::substitute(t->body, {{t->object, b}});
                       return rep ? pi::par(r, t) : r;
                     }});
      break;
    }
    case K::Output:
    case K::RepOutput: {
      require_constant(t->subject);
      require_constant(t->object);
      auto r = t->kind == K::RepOutput ? pi::par(t->body, t) : t->body;
      out.push_back({PiCommit::Kind::Out, t->subject, t->object, {}, r, nullptr});
      break;
    }
    case K::Restrict: {
      const Name& c = t->object;
      for (auto& m : pi_commits(t->body)) {
        switch (m.kind) {
          case PiCommit::Kind::Tau:
            m.residual = pi::restrict(c, m.residual);
            break;
          case PiCommit::Kind::In: {
            if (m.subject == c) continue;
            auto inner = std::move(m.build);
            m.build = [c, inner](const Name& b) { return pi::restrict(c, inner(b)); };
            break;
          }
          case PiCommit::Kind::Out:
            if (m.subject == c) continue;
            if (m.object == c) {
              m.kind = PiCommit::Kind::BoundOut;
            } else {
              m.residual = pi::restrict(c, m.residual);
            }
            break;
          case PiCommit::Kind::BoundOut:
            if (m.subject == c) continue;
            m.residual = pi::restrict(c, m.residual);
            break;
        }
        out.push_back(std::move(m));
      }
      break;
    }
    case K::Par: {
      const auto& parts = t->parts;
      std::vector<std::vector<PiCommit>> each;
      for (const auto& p : parts) each.push_back(pi_commits(p));
      auto with = [&parts](std::size_t i, pi::Term r) {
        auto v = parts;
        v[i] = std::move(r);
        return v;
      };
      // Structurally equal components have congruent moves; only the first
      // of each kind is stepped (and each pair of kinds communicates once).
      std::vector<std::size_t> rep(parts.size());
      std::iota(rep.begin(), rep.end(), 0);
      if (parts.size() > 4) {
        std::unordered_map<std::string, std::size_t> first;
        for (std::size_t i = 0; i < parts.size(); ++i) rep[i] = first.emplace(pi::key(parts[i]), i).first->second;
      }
      std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> paired;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (rep[i] != i) continue;
        for (const auto& m : each[i]) {
          PiCommit w = m;
          if (m.kind == PiCommit::Kind::In) {
            w.build = [with, i, inner = m.build](const Name& b) { return pi::par(with(i, inner(b))); };
          } else {
            w.residual = pi::par(with(i, m.residual));
          }
          out.push_back(std::move(w));
        }
      }
      for (std::size_t i = 0; i < parts.size(); ++i) {
        for (std::size_t oi = 0; oi < each[i].size(); ++oi) {
          const auto& o = each[i][oi];
          if (o.kind != PiCommit::Kind::Out && o.kind != PiCommit::Kind::BoundOut) continue;
          for (std::size_t j = 0; j < parts.size(); ++j) {
            if (j == i) continue;
            for (std::size_t ii = 0; ii < each[j].size(); ++ii) {
              const auto& in = each[j][ii];
              if (in.kind != PiCommit::Kind::In || in.subject != o.subject) continue;
              if (!paired.insert({rep[i], oi, rep[j], ii}).second) continue;
              auto v = with(i, o.residual);
              v[j] = in.build(o.object);
              pi::Term r = pi::par(std::move(v));
              if (o.kind == PiCommit::Kind::BoundOut) r = pi::restrict(o.object, r);
              out.push_back({PiCommit::Kind::Tau, {}, {}, o.subject, r, nullptr});
            }
          }
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace

namespace detail {

std::vector<Transition<pi::Term>> step_pi_canonical(const pi::Term& p, const NameSet& universe) {
  auto fn = pi::free_constants(p);
  NameSet avoid = fn;
  avoid.insert(universe.begin(), universe.end());
  Name fresh = canonical_fresh(avoid);
  NameSet objects = avoid;
  objects.insert(fresh);

  std::vector<Transition<pi::Term>> out;
  for (auto& m : pi_commits(p)) {
    Action a;
    a.subject = m.subject;
    switch (m.kind) {
      case PiCommit::Kind::Tau:
        out.push_back({Action::tau(m.via), m.residual});
        break;
      case PiCommit::Kind::Out:
        a.kind = Action::Kind::PiOut;
        a.object = m.object;
        out.push_back({a, m.residual});
        break;
      case PiCommit::Kind::BoundOut:
        a.kind = Action::Kind::PiBoundOut;
        a.object = fresh;
        out.push_back({a, pi::substitute(m.residual, {{m.object, fresh}})});
        break;
      case PiCommit::Kind::In:
        a.kind = Action::Kind::PiIn;
        for (const auto& b : objects) {
          a.object = b;
          out.push_back({a, m.build(b)});
        }
        break;
    }
  }
  return out;
}

}  // namespace detail

std::vector<Transition<pi::Term>> step_pi(const pi::Term& p, const PiStepOptions& opts) {
  return detail::step_pi_canonical(pi::freshen(p), opts.universe);
}

// ---------------------------------------------------------------------------
// higher-order pi

namespace {

struct HoCommit {
  enum class Kind { Tau, In, Out };
  Kind kind;
  Name subject;
  std::vector<Name> extruded;
  hopi::Term payload;
  std::optional<Name> via;
  hopi::Term residual;
  std::function<hopi::Term(const hopi::Term&)> build;
};

hopi::Term reduce_head(const hopi::Term& t) {
  if (t->kind != hopi::Kind::App) return t;
  auto f = reduce_head(t->payload);
  if (f->kind == hopi::Kind::Var) {
    throw OpenTermError("application of free process variable " + f->var);
  }
  return reduce_head(hopi::apply_abstraction(f, t->names));
}

std::vector<HoCommit> ho_commits(const hopi::Term& t);

void communicate(const std::vector<HoCommit>& outs, const std::vector<HoCommit>& ins,
                 const std::function<hopi::Term(hopi::Term, hopi::Term)>& combine,
                 std::vector<HoCommit>& acc) {
  for (const auto& o : outs) {
    if (o.kind != HoCommit::Kind::Out) continue;
    for (const auto& in : ins) {
      if (in.kind != HoCommit::Kind::In || in.subject != o.subject) continue;
      auto r = hopi::restrict_all(o.extruded, combine(o.residual, in.build(o.payload)));
      acc.push_back({HoCommit::Kind::Tau, {}, {}, nullptr, o.subject, r, nullptr});
    }
  }
}

std::vector<HoCommit> ho_commits(const hopi::Term& t) {
  using K = hopi::Kind;
  std::vector<HoCommit> out;
  switch (t->kind) {
    case K::Nil:
    case K::Abs:
      break;
    case K::Var:
      throw OpenTermError("free process variable " + t->var);
    case K::App:
      return ho_commits(reduce_head(t));
    case K::In: {
      require_constant(t->subject);
      out.push_back({HoCommit::Kind::In, t->subject, {}, nullptr, {}, nullptr,
                     [t](const hopi::Term& p) {
                       hopi::Substitution s;
                       s.processes[t->var] = p;
                       return hopi::substitute(t->body, s);
                     }});
      break;
    }
    case K::Out:
      require_constant(t->subject);
      out.push_back({HoCommit::Kind::Out, t->subject, {}, t->payload, {}, t->body, nullptr});
      break;
    case K::Res: {
      const Name& c = t->subject;
      for (auto& m : ho_commits(t->body)) {
        switch (m.kind) {
          case HoCommit::Kind::Tau:
            m.residual = hopi::restrict(c, m.residual);
            break;
          case HoCommit::Kind::In: {
            if (m.subject == c) continue;
            auto inner = std::move(m.build);
            m.build = [c, inner](const hopi::Term& p) { return hopi::restrict(c, inner(p)); };
            break;
          }
          case HoCommit::Kind::Out:
            if (m.subject == c) continue;
            if (hopi::free_constants(m.payload).count(c)) {
              m.extruded.insert(m.extruded.begin(), c);
            } else {
              m.residual = hopi::restrict(c, m.residual);
            }
            break;
        }
        out.push_back(std::move(m));
      }
      break;
    }
    case K::Par: {
      const auto& parts = t->parts;
      std::vector<std::vector<HoCommit>> each;
      for (const auto& p : parts) each.push_back(ho_commits(p));
      for (std::size_t i = 0; i < parts.size(); ++i) {
        for (const auto& m : each[i]) {
          HoCommit w = m;
          if (m.kind == HoCommit::Kind::In) {
            w.build = [parts, i, inner = m.build](const hopi::Term& p) {
              auto v = parts;
              v[i] = inner(p);
              return hopi::par(std::move(v));
            };
          } else {
            auto v = parts;
            v[i] = m.residual;
            w.residual = hopi::par(std::move(v));
          }
          out.push_back(std::move(w));
        }
      }
      for (std::size_t i = 0; i < parts.size(); ++i) {
        for (std::size_t j = 0; j < parts.size(); ++j) {
          if (i == j) continue;
          communicate(each[i], each[j],
                      [&parts, i, j](hopi::Term ri, hopi::Term rj) {
                        auto v = parts;
                        v[i] = std::move(ri);
                        v[j] = std::move(rj);
                        return hopi::par(std::move(v));
                      },
                      out);
        }
      }
      break;
    }
    case K::Rep: {
      // !P behaves as P | !P.
      auto copy = ho_commits(t->body);
      for (const auto& m : copy) {
        HoCommit w = m;
        if (m.kind == HoCommit::Kind::In) {
          w.build = [t, inner = m.build](const hopi::Term& p) { return hopi::par(inner(p), t); };
        } else {
          w.residual = hopi::par(m.residual, t);
        }
        out.push_back(std::move(w));
      }
      bool may_talk = false;
      for (const auto& o : copy) {
        for (const auto& in : copy) {
          may_talk |= o.kind == HoCommit::Kind::Out && in.kind == HoCommit::Kind::In &&
                      o.subject == in.subject;
        }
      }
      if (may_talk) {
        auto second = ho_commits(hopi::freshen(t->body));
        communicate(copy, second,
                    [t](hopi::Term a, hopi::Term b) {
                      return hopi::par(std::vector<hopi::Term>{std::move(a), std::move(b), t});
                    },
                    out);
      }
      break;
    }
  }
  return out;
}

}  // namespace

namespace detail {

std::vector<Transition<hopi::Term>> step_hopi_canonical(const hopi::Term& e, const HopiMenu& menu) {
  std::vector<Transition<hopi::Term>> out;
  auto commits = ho_commits(e);
  NameSet fn;
  std::vector<hopi::Term> offered;
  bool have_menu = false;
  for (auto& m : commits) {
    Action a;
    a.subject = m.subject;
    switch (m.kind) {
      case HoCommit::Kind::Tau:
        out.push_back({Action::tau(m.via), m.residual});
        break;
      case HoCommit::Kind::Out: {
        a.kind = Action::Kind::HoOut;
        if (m.extruded.empty()) {
          a.payload = m.payload;
          out.push_back({a, m.residual});
          break;
        }
        if (fn.empty()) fn = hopi::free_constants(e);
        std::map<Name, Name> ren;
        for (std::size_t k = 0; k < m.extruded.size(); ++k) {
          ren[m.extruded[k]] = canonical_fresh(fn, k);
          a.extruded.push_back(ren[m.extruded[k]]);
        }
        a.payload = hopi::rename(m.payload, ren);
        out.push_back({a, hopi::rename(m.residual, ren)});
        break;
      }
      case HoCommit::Kind::In:
        if (!menu) break;
        if (!have_menu) {
          offered = menu(e);
          have_menu = true;
        }
        a.kind = Action::Kind::HoIn;
        for (const auto& p : offered) {
          a.payload = p;
          out.push_back({a, m.build(p)});
        }
        break;
    }
  }
  return out;
}

}  // namespace detail

std::vector<Transition<hopi::Term>> step_hopi(const hopi::Term& e, const HopiMenu& menu) {
  return detail::step_hopi_canonical(hopi::freshen(e), menu);
}

// ---------------------------------------------------------------------------
// computation calculus

namespace {

cc::Term box_result(const cc::Term& box, const Tuple& args, std::uint64_t fuel) {
  auto r = recfun::eval(box->fun, args, fuel);
  if (r.defined()) return cc::out(box->target, {r.value});
  if (recfun::prove_undefined(box->fun, args)) return cc::omega();
  return cc::stuck();
}

void atoms_of(const cc::Term& t, std::vector<cc::Term>& atoms) {
  if (t->kind == cc::Kind::Par) {
    for (const auto& p : t->parts) atoms_of(p, atoms);
  } else if (t->kind != cc::Kind::Nil) {
    atoms.push_back(t);
  }
}

}  // namespace

std::vector<Transition<cc::Term>> step_c(const cc::Term& p, const CStepOptions& opts) {
  std::vector<cc::Term> atoms;
  atoms_of(p, atoms);
  auto replaced = [&atoms](std::size_t i, cc::Term r) {
    auto v = atoms;
    v[i] = std::move(r);
    return cc::par(std::move(v));
  };
  std::vector<Transition<cc::Term>> out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    Action act;
    act.subject = a->subject;
    switch (a->kind) {
      case cc::Kind::Omega:
        out.push_back({Action::tau(), p});
        break;
      case cc::Kind::Out:
        act.kind = Action::Kind::COut;
        act.tuple = a->values;
        out.push_back({act, replaced(i, cc::nil())});
        break;
      case cc::Kind::FuncBox: {
        auto width = static_cast<std::size_t>(recfun::arity_check(a->fun));
        act.kind = Action::Kind::CIn;
        for (const auto& tup : opts.menu) {
          if (tup.size() != width) continue;
          act.tuple = tup;
          out.push_back({act, replaced(i, box_result(a, tup, opts.fuel))});
        }
        for (std::size_t j = 0; j < atoms.size(); ++j) {
          const auto& o = atoms[j];
          if (o->kind != cc::Kind::Out || o->subject != a->subject || o->values.size() != width) {
            continue;
          }
          auto v = atoms;
          v[i] = box_result(a, o->values, opts.fuel);
          v[j] = cc::nil();
          out.push_back({Action::tau(a->subject), cc::par(std::move(v))});
        }
        break;
      }
      default:
        break;
    }
  }
  return out;
}

}  // namespace pcalc
