#include "pcalc/encodings.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <unordered_set>

namespace pcalc::enc {

namespace {

using hopi::Term;

Name V(const char* s) { return Name::variable(s); }

// a!.P and a.P: CCS-like prefixes carrying / ignoring the empty process.
Term signal(const Name& a, Term cont) { return hopi::output(a, hopi::nil(), std::move(cont)); }
Term await(const Name& a, Term cont) { return hopi::input(a, fresh_id("W"), std::move(cont)); }
Term send(const Name& a, Term payload) { return hopi::output(a, std::move(payload), hopi::nil()); }

// c1!X1. ... .cn!Xn.cont
Term send_all(const std::vector<Name>& chans, const std::vector<std::string>& vars, Term cont) {
  for (std::size_t i = chans.size(); i-- > 0;) cont = hopi::output(chans[i], hopi::var(vars[i]), cont);
  return cont;
}

// a1(X1). ... .an(Xn).cont
Term read_all(const std::vector<Name>& chans, const std::vector<std::string>& vars, Term cont) {
  for (std::size_t i = chans.size(); i-- > 0;) cont = hopi::input(chans[i], vars[i], cont);
  return cont;
}

std::vector<std::string> fresh_vars(std::size_t n, const char* stem = "X") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(fresh_id(stem));
  return out;
}

std::vector<Name> fresh_chans(std::size_t n, const char* stem) {
  std::vector<Name> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(fresh_constant(stem));
  return out;
}

// e(X).g![<x,y> x!X.0].0
Term successor_box(const Name& e, const Name& g) {
  auto x = fresh_id("X");
  return hopi::input(e, x,
                     send(g, hopi::abstraction({V("x"), V("y")}, send(V("x"), hopi::var(x)))));
}

template <class... Ts>
std::vector<Name> cat(const std::vector<Name>& a, Ts... more) {
  std::vector<Name> out = a;
  (out.push_back(more), ...);
  return out;
}

std::vector<Name> cat(std::vector<Name> a, const std::vector<Name>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------

hopi::Term encode_nat(const Natural& n) {
  if (n < 0) throw Error("negative numeral");
  Term t = hopi::abstraction({V("x"), V("y")}, send(V("y"), hopi::nil()));
  for (Natural k = 0; k < n; ++k) t = hopi::abstraction({V("x"), V("y")}, send(V("x"), t));
  return t;
}

namespace {

// Payloads of the outputs on `s` and `z` reachable by internal steps.
struct Observed {
  std::vector<Term> on_s;
  bool on_z = false;
  bool exhausted = false;
};

Observed observe(const Term& start, const Name& s, const Name& z, std::size_t budget) {
  Observed obs;
  std::unordered_set<std::string> seen;
  std::vector<Term> stack{start};
  while (!stack.empty()) {
    auto cur = stack.back();
    stack.pop_back();
    if (!seen.insert(hopi::key(cur)).second) continue;
    if (seen.size() > budget) {
      obs.exhausted = true;
      break;
    }
    for (auto& tr : step_hopi(cur)) {
      if (tr.action.is_tau()) {
        stack.push_back(tr.target);
      } else if (tr.action.kind == Action::Kind::HoOut && tr.action.extruded.empty()) {
        if (tr.action.subject == s) obs.on_s.push_back(tr.action.payload);
        if (tr.action.subject == z) obs.on_z = true;
      }
    }
  }
  return obs;
}

}  // namespace

std::optional<hopi::Term> weak_output(const hopi::Term& e, const Name& on, std::size_t budget) {
  std::unordered_set<std::string> seen;
  std::vector<Term> stack{e};
  while (!stack.empty() && seen.size() <= budget) {
    auto cur = canonical_state(stack.back());
    stack.pop_back();
    if (!seen.insert(hopi::show(cur)).second) continue;
    auto steps = step_hopi(cur);
    std::vector<Term> next;
    for (auto& tr : steps) {
      if (tr.action.kind == Action::Kind::HoOut && tr.action.subject == on && tr.action.extruded.empty()) {
        return tr.action.payload;
      }
      if (tr.action.is_tau()) next.push_back(std::move(tr.target));
    }
    // Depth first, smallest successor first: copies of replicated boxes that
    // talk among themselves only leave debris behind.
    std::stable_sort(next.begin(), next.end(),
                     [](const Term& a, const Term& b) { return hopi::size(a) > hopi::size(b); });
    for (auto& t : next) stack.push_back(std::move(t));
  }
  return std::nullopt;
}

NatDecode decode_nat(const hopi::Term& t, std::size_t budget) {
  NatDecode r;
  auto s = fresh_constant("s");
  auto z = fresh_constant("z");
  Term cur = t;
  for (;;) {
    Term applied;
    try {
      applied = hopi::apply_abstraction(cur, {s, z});
    } catch (const Error& e) {
      r.reason = e.what();
      return r;
    }
    if (!hopi::free_names(applied).process_vars.empty()) {
      r.reason = "open term";
      return r;
    }
    auto obs = observe(applied, s, z, budget);
    if (obs.exhausted) {
      r.reason = "budget exhausted";
      return r;
    }
    if (obs.on_z && obs.on_s.empty()) {
      r.ok = true;
      return r;
    }
    if (obs.on_s.empty()) {
      r.reason = "no output on either selector";
      return r;
    }
    if (obs.on_z) {
      r.reason = "outputs on both selectors";
      return r;
    }
    std::set<std::string> distinct;
    for (auto& p : obs.on_s) distinct.insert(hopi::key(p));
    if (distinct.size() > 1) {
      r.reason = "several different predecessors";
      return r;
    }
    cur = obs.on_s.front();
    r.value += 1;
  }
}

// ---------------------------------------------------------------------------

hopi::Term encode_recfun(const recfun::Fun& f, const std::vector<Name>& in, const Name& out) {
  using recfun::Kind;
  const auto n = in.size();
  if (static_cast<int>(n) != recfun::arity_check(f)) {
    throw ArityError("box for " + recfun::show(f) + " wired to " + std::to_string(n) + " inputs");
  }
  switch (f->kind) {
    case Kind::Zero:
      return read_all(in, fresh_vars(n), send(out, encode_nat(0)));

    case Kind::Succ:
      return successor_box(in[0], out);

    case Kind::Proj: {
      auto xs = fresh_vars(n);
      return read_all(in, xs, send(out, hopi::var(xs[static_cast<std::size_t>(f->index - 1)])));
    }

    case Kind::Comp: {
      const auto k = f->inners.size();
      auto xs = fresh_vars(n);
      std::vector<Name> bound;
      std::vector<Name> results = fresh_chans(k, "b");
      std::vector<Term> body;
      for (std::size_t l = 0; l < k; ++l) {
        auto cl = fresh_chans(n, "c");
        bound.insert(bound.end(), cl.begin(), cl.end());
        body.push_back(send_all(cl, xs, hopi::nil()));
        body.push_back(encode_recfun(f->inners[l], cl, results[l]));
      }
      body.push_back(encode_recfun(f->outer, results, out));
      bound.insert(bound.end(), results.begin(), results.end());
      return hopi::restrict_all(bound, read_all(in, xs, hopi::par(body)));
    }

    case Kind::PrimRec: {
      // Arguments x1..xn-1 then the recursion argument.
      const auto m = n - 1;
      std::vector<Name> params(in.begin(), in.end() - 1);
      auto xs = fresh_vars(m);
      auto y = fresh_id("X");
      auto c = fresh_chans(m, "c");
      auto d = fresh_constant("d"), e = fresh_constant("e"), fc = fresh_constant("f"),
           g = fresh_constant("g"), h = fresh_constant("h");
      auto i = fresh_constant("i"), j = fresh_constant("j"), k = fresh_constant("k");
      auto acc = fresh_id("X"), cnt = fresh_id("Y"), rest = fresh_id("Z"), pred = fresh_id("Z");
      // One round: the remaining count decides between another step and the answer.
      Term round = hopi::par({
          hopi::application(hopi::var(rest), {i, j}),
          hopi::input(i, pred,
                      hopi::par({encode_recfun(f->step, cat(cat({h}, c), k), fc),
                                 hopi::output(k, hopi::var(cnt), send(e, hopi::var(cnt))),
                                 send(h, hopi::var(acc)), send(d, hopi::var(pred))})),
          await(j, send(out, hopi::var(acc))),
      });
      Term loop = hopi::input(fc, acc, hopi::input(g, cnt, hopi::input(d, rest, round)));
      Term body = hopi::par({
          m > 0 ? hopi::replicate(send_all(c, xs, hopi::nil())) : hopi::nil(),
          send(d, hopi::var(y)),
          encode_recfun(f->outer, c, fc),
          send(g, encode_nat(0)),
          hopi::replicate(successor_box(e, g)),
          hopi::replicate(hopi::restrict_all({i, j, k}, loop)),
      });
      auto bound = cat(c, d, e, fc, g, h);
      return hopi::restrict_all(bound, read_all(params, xs, hopi::input(in.back(), y, body)));
    }

    case Kind::Mu: {
      auto xs = fresh_vars(n);
      auto c = fresh_chans(n, "c");
      auto d = fresh_constant("d"), e = fresh_constant("e"), fc = fresh_constant("f"),
           g = fresh_constant("g"), s = fresh_constant("s");
      auto i = fresh_constant("i"), j = fresh_constant("j");
      auto cand = fresh_id("X"), answer = fresh_id("Y"), last = fresh_id("X");
      Term next = hopi::par({
          await(s, successor_box(e, g)),
          hopi::input(g, cand, hopi::output(d, hopi::var(cand), send(e, hopi::var(cand)))),
      });
      Term judge = hopi::input(
          fc, answer,
          hopi::par({
              hopi::application(hopi::var(answer), {i, j}),
              await(i, signal(s, send_all(c, xs, hopi::nil()))),
              await(j, hopi::input(e, last, send(out, hopi::var(last)))),
          }));
      Term body = hopi::par({
          send_all(c, xs, send(d, encode_nat(0))),
          hopi::replicate(encode_recfun(f->outer, cat(c, d), fc)),
          hopi::replicate(next),
          send(e, encode_nat(0)),
          hopi::replicate(hopi::restrict_all({i, j}, judge)),
      });
      return hopi::restrict_all(cat(c, d, e, fc, g, s), read_all(in, xs, body));
    }
  }
  throw Error("unknown function constructor");
}

hopi::Term divergence_loop() {
  auto c = fresh_constant("c");
  return hopi::restrict(c, hopi::par(signal(c, hopi::nil()),
                                     hopi::replicate(await(c, signal(c, hopi::nil())))));
}

hopi::Term encode_c(const cc::Term& p) {
  switch (p->kind) {
    case cc::Kind::Nil:
      return hopi::nil();
    case cc::Kind::Omega:
      return divergence_loop();
    case cc::Kind::Stuck:
      throw UnsupportedForm("a stuck function box has no encoding");
    case cc::Kind::Par: {
      std::vector<Term> parts;
      for (const auto& q : p->parts) parts.push_back(encode_c(q));
      return hopi::par(parts);
    }
    case cc::Kind::Out: {
      // A tuple travels as consecutive numerals on the same channel.
      Term t = hopi::nil();
      for (std::size_t i = p->values.size(); i-- > 0;) t = hopi::output(p->subject, encode_nat(p->values[i]), t);
      return t;
    }
    case cc::Kind::FuncBox: {
      const auto k = static_cast<std::size_t>(recfun::arity_check(p->fun));
      if (k == 1) return encode_recfun(p->fun, {p->subject}, p->target);
      // Relay: read k numerals on the public channel, hand them to private ports.
      auto ports = fresh_chans(k, "~r");
      auto xs = fresh_vars(k);
      std::vector<Term> fwd;
      for (std::size_t i = 0; i < k; ++i) fwd.push_back(send(ports[i], hopi::var(xs[i])));
      std::vector<Name> subj(k, p->subject);
      return hopi::restrict_all(ports, hopi::par(read_all(subj, xs, hopi::par(fwd)),
                                                 encode_recfun(p->fun, ports, p->target)));
    }
  }
  throw Error("unknown term");
}

hopi::Term compose_application(const recfun::Fun& f, const Tuple& args, const Name& out) {
  auto chans = fresh_chans(args.size(), "a");
  std::vector<Term> parts{encode_recfun(f, chans, out)};
  for (std::size_t i = 0; i < args.size(); ++i) parts.push_back(send(chans[i], encode_nat(args[i])));
  return hopi::restrict_all(chans, hopi::par(parts));
}

// ---------------------------------------------------------------------------

hopi::Term make_pipe(const Name& u) {
  auto x1 = fresh_variable("x"), x2 = fresh_variable("x"), x3 = fresh_variable("x");
  auto z1 = fresh_id("Z"), z2 = fresh_id("Z");
  return hopi::abstraction(
      {x1, x2, x3},
      hopi::par(await(x1, hopi::input(u, z1, send(x3, hopi::var(z1)))),
                await(x2, hopi::input(x3, z2, send(u, hopi::var(z2))))));
}

HopiMenu pipe_menu(NameSet names) {
  return [names](const hopi::Term& state) {
    NameSet pool = names;
    auto fn = hopi::free_constants(state);
    pool.insert(fn.begin(), fn.end());
    NameSet avoid = pool;
    pool.insert(canonical_fresh(avoid));
    std::vector<hopi::Term> out;
    for (const auto& n : pool) out.push_back(make_pipe(n));
    return out;
  };
}

namespace {

struct PiToHopi {
  std::map<Name, std::string> env;

  std::string var_of(const Name& n) const {
    auto it = env.find(n);
    if (it == env.end()) throw OpenTermError("name without a process variable: " + n.id);
    return it->second;
  }

  // (i)(o)(c)(X_u<i,o,c> | i!.c(X_x).cont)  or  (i)(o)(c)(X_u<i,o,c> | o!.c!X_v.cont)
  Term act(const pi::Node& n, bool is_input, const std::function<Term()>& cont_builder) {
    auto i = fresh_constant("~i"), o = fresh_constant("~o"), c = fresh_constant("~c");
    Term handshake = hopi::application(hopi::var(var_of(n.subject)), {i, o, c});
    Term mine;
    if (is_input) {
      auto x = fresh_id("X");
      auto saved = env;
      env[n.object] = x;
      Term cont = cont_builder();
      env = saved;
      mine = signal(i, hopi::input(c, x, cont));
    } else {
      mine = signal(o, hopi::output(c, hopi::var(var_of(n.object)), cont_builder()));
    }
    return hopi::restrict_all({i, o, c}, hopi::par(handshake, mine));
  }

  Term run(const pi::Term& p) {
    switch (p->kind) {
      case pi::Kind::Nil:
        return hopi::nil();
      case pi::Kind::Par: {
        std::vector<Term> parts;
        for (const auto& q : p->parts) parts.push_back(run(q));
        return hopi::par(parts);
      }
      case pi::Kind::Input:
        return act(*p, true, [&] { return run(p->body); });
      case pi::Kind::Output:
        return act(*p, false, [&] { return run(p->body); });
      case pi::Kind::Restrict: {
        auto x = fresh_id("X");
        auto saved = env;
        env[p->object] = x;
        Term body = run(p->body);
        env = saved;
        body = hopi::substitute(body, {{}, {{x, make_pipe(p->object)}}});
        return hopi::restrict(p->object, body);
      }
      case pi::Kind::RepInput:
      case pi::Kind::RepOutput: {
        // (d)(Q | d!Q.0) with Q = d(Z).((i)(o)(c)(X_u<i,o,c> | ...(Z | [[P]])) | d!Z.0):
        // a new copy is armed only after the previous one has acted.
        auto d = fresh_constant("~d");
        auto z = fresh_id("Z");
        Term copy = act(*p, p->kind == pi::Kind::RepInput,
                        [&] { return hopi::par(hopi::var(z), run(p->body)); });
        Term q = hopi::input(d, z, hopi::par(copy, send(d, hopi::var(z))));
        return hopi::restrict(d, hopi::par(q, send(d, q)));
      }
    }
    throw Error("unknown term");
  }
};

}  // namespace

Stage1 encode_pi_stage1(const pi::Term& p) {
  PiToHopi tr;
  Stage1 out;
  auto fn = pi::free_names(p);
  if (!fn.variables.empty()) throw OpenTermError("free variable " + fn.variables.begin()->id);
  for (const auto& n : fn.constants) {
    tr.env[n] = "X_" + n.id;
    out.free_vars[n] = "X_" + n.id;
  }
  out.term = tr.run(p);
  return out;
}

hopi::Term encode_pi(const pi::Term& p) {
  auto s1 = encode_pi_stage1(p);
  hopi::Substitution sub;
  for (const auto& [n, v] : s1.free_vars) sub.processes[v] = make_pipe(n);
  return hopi::substitute(s1.term, sub);
}

// ---------------------------------------------------------------------------

namespace {

// Parameter count of the applications of process variable `x` inside t,
// if any occurrence is not shadowed.
std::optional<std::size_t> applied_arity(const Term& t, const std::string& x) {
  switch (t->kind) {
    case hopi::Kind::App:
      if (t->payload->kind == hopi::Kind::Var && t->payload->var == x) return t->names.size();
      return applied_arity(t->payload, x);
    case hopi::Kind::Var:
      // Running a variable as a process applies it to nothing.
      if (t->var == x) return 0;
      return std::nullopt;
    case hopi::Kind::Nil:
      return std::nullopt;
    case hopi::Kind::In:
      if (t->var == x) return std::nullopt;
      return applied_arity(t->body, x);
    case hopi::Kind::Out:
      // Forwarding the variable is not a use site.
      if (t->payload->kind != hopi::Kind::Var) {
        if (auto a = applied_arity(t->payload, x)) return a;
      }
      return applied_arity(t->body, x);
    case hopi::Kind::Par:
      for (const auto& q : t->parts) {
        if (auto a = applied_arity(q, x)) return a;
      }
      return std::nullopt;
    default:
      return applied_arity(t->body, x);
  }
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

// Moves restrictions under the first prefix of a replicated body and splits
// parallel bodies, so that every replication ends up guarded:
// !(c)a(X).P ~ !a(X).(c)P when c is not a, and !(P | Q) ~ !P | !Q.
std::vector<Term> guard_replication(const Term& body, std::vector<Name> pending) {
  switch (body->kind) {
    case hopi::Kind::Nil:
      return {};
    case hopi::Kind::Par: {
      if (!pending.empty()) break;
      std::vector<Term> out;
      for (const auto& q : body->parts) {
        auto part = guard_replication(q, {});
        out.insert(out.end(), part.begin(), part.end());
      }
      return out;
    }
    case hopi::Kind::Res: {
      pending.push_back(body->subject);
      return guard_replication(body->body, pending);
    }
    case hopi::Kind::In:
    case hopi::Kind::Out: {
      for (const auto& c : pending) {
        if (c == body->subject) return {hopi::replicate(hopi::restrict_all(pending, body))};
      }
      if (body->kind == hopi::Kind::In) {
        return {hopi::replicate(
            hopi::input(body->subject, body->var, hopi::restrict_all(pending, body->body)))};
      }
      // The payload may mention the pending names; keep them outside then.
      auto fn = hopi::free_constants(body->payload);
      for (const auto& c : pending) {
        if (fn.count(c)) return {hopi::replicate(hopi::restrict_all(pending, body))};
      }
      return {hopi::replicate(
          hopi::output(body->subject, body->payload, hopi::restrict_all(pending, body->body)))};
    }
    default:
      break;
  }
  return {hopi::replicate(hopi::restrict_all(pending, body))};
}

struct HopiToPi {
  HopiToPiOptions opts;
  std::map<std::string, Name> vars;               // process variable -> pi variable
  std::map<std::string, std::optional<std::size_t>> arity;

  Name name_of_var(const std::string& x) const {
    auto it = vars.find(x);
    if (it != vars.end()) return it->second;
    return Name::variable(lower(x));
  }

  std::optional<std::size_t> arity_of(const std::string& x) const {
    auto it = arity.find(x);
    if (it != arity.end() && it->second) return it->second;
    return opts.default_arity;
  }

  // x!(g).g!d1. ... .g!dn.0, and x!x.0 when there is nothing to send.
  pi::Term call(const std::string& x, const std::vector<Name>& args) {
    auto xv = name_of_var(x);
    if (args.empty()) return pi::output(xv, xv, pi::nil());
    auto g = fresh_constant("~g");
    pi::Term t = pi::nil();
    for (std::size_t i = args.size(); i-- > 0;) t = pi::output(g, args[i], t);
    return pi::restrict(g, pi::output(xv, g, t));
  }

  // !f(z).z(x1). ... .z(xn).[[Q']] when Q is <x~>Q', and !f.[[Q]] otherwise.
  pi::Term trigger(const Name& f, const Term& q) {
    auto z = fresh_variable("z");
    Term payload = q;
    while (payload->kind == hopi::Kind::App && payload->payload->kind != hopi::Kind::Var) {
      payload = hopi::apply_abstraction(payload->payload, payload->names);
    }
    std::vector<Name> params;
    pi::Term body;
    if (payload->kind == hopi::Kind::Abs) {
      params = payload->names;
      body = run(payload->body);
    } else if (payload->kind == hopi::Kind::Var && arity_of(payload->var).value_or(0) > 0) {
      // Eta-expand a transmitted variable of known arity.
      for (std::size_t i = *arity_of(payload->var); i-- > 0;) params.push_back(fresh_variable("x"));
      std::reverse(params.begin(), params.end());
      body = call(payload->var, params);
    } else {
      body = run(payload);
    }
    if (params.empty()) return pi::rep_input(f, z, body);
    for (std::size_t i = params.size(); i-- > 0;) body = pi::input(z, params[i], body);
    return pi::rep_input(f, z, body);
  }

  pi::Term run(const Term& t) {
    switch (t->kind) {
      case hopi::Kind::Nil:
      case hopi::Kind::Abs:
        return pi::nil();
      case hopi::Kind::Var:
        return call(t->var, {});
      case hopi::Kind::App: {
        if (t->payload->kind == hopi::Kind::Var) return call(t->payload->var, t->names);
        if (t->payload->kind == hopi::Kind::Abs || t->payload->kind == hopi::Kind::App) {
          return run(hopi::apply_abstraction(t->payload, t->names));
        }
        throw UnsupportedForm("application of a non-abstraction: " + hopi::show(t));
      }
      case hopi::Kind::Par: {
        std::vector<pi::Term> parts;
        for (const auto& q : t->parts) parts.push_back(run(q));
        return pi::par(parts);
      }
      case hopi::Kind::Res:
        return pi::restrict(t->subject, run(t->body));
      case hopi::Kind::In: {
        auto saved_v = vars;
        auto saved_a = arity;
        vars[t->var] = fresh_variable(lower(stem_of(t->var)));
        arity[t->var] = applied_arity(t->body, t->var);
        auto body = run(t->body);
        auto binder = vars[t->var];
        vars = saved_v;
        arity = saved_a;
        return pi::input(t->subject, binder, body);
      }
      case hopi::Kind::Out: {
        auto f = fresh_constant("~f");
        return pi::restrict(f, pi::par(pi::output(t->subject, f, run(t->body)), trigger(f, t->payload)));
      }
      case hopi::Kind::Rep: {
        std::vector<pi::Term> parts;
        for (const auto& g : guard_replication(t->body, {})) {
          const auto& b = g->body;
          std::vector<Name> pending;
          auto core = b;
          while (core->kind == hopi::Kind::Res) {
            pending.push_back(core->subject);
            core = core->body;
          }
          if (core->kind == hopi::Kind::In && pending.empty()) {
            auto in = run(core);
            parts.push_back(pi::rep_input(in->subject, in->object, in->body));
          } else if (core->kind == hopi::Kind::Out && pending.empty()) {
            // All copies may share one trigger: (f)(!u!f.[[P]] | T).
            auto f = fresh_constant("~f");
            parts.push_back(pi::restrict(
                f, pi::par(pi::rep_output(core->subject, f, run(core->body)), trigger(f, core->payload))));
          } else {
            parts.push_back(run(hopi::expand_replication(g)));
          }
        }
        return pi::par(parts);
      }
    }
    throw Error("unknown term");
  }
};

}  // namespace

pi::Term encode_hopi(const hopi::Term& e, const HopiToPiOptions& opts) {
  HopiToPi tr;
  tr.opts = opts;
  return tr.run(e);
}

}  // namespace pcalc::enc
