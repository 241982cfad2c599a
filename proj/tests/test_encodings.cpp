#include <doctest.h>

#include <fstream>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "generators.hpp"
#include "pcalc/encodings.hpp"
#include "pcalc/syntax.hpp"

using namespace pcalc;

namespace {

Name C(const char* s) { return Name::constant(s); }

// Printed numeral built directly from the unfolding <x,y> x![[n]].
std::string numeral_text(int n) {
  if (n == 0) return "<x,y> y!0.0";
  return "<x,y> x!(" + numeral_text(n - 1) + ").0";
}

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(PCALC_TEST_DIR) + "/" + rel);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Natural run_composed(const char* fn, const Tuple& args) {
  auto b = fresh_constant("b");
  auto sys = enc::compose_application(recfun::standard_library().at(fn), args, b);
  auto out = enc::weak_output(sys, b);
  REQUIRE(out.has_value());
  auto d = enc::decode_nat(*out);
  REQUIRE(d.ok);
  return d.value;
}

}  // namespace

TEST_CASE("numerals") {
  CHECK(hopi::show(enc::encode_nat(0)) == "<x,y> y!0.0");
  CHECK(hopi::show(enc::encode_nat(2)) == numeral_text(2));
  for (int n = 0; n <= 50; ++n) {
    CHECK(hopi::show(enc::encode_nat(n)) == numeral_text(n));
    auto d = enc::decode_nat(enc::encode_nat(n));
    REQUIRE(d.ok);
    CHECK(d.value == n);
  }
  CHECK(hopi::is_closed(enc::encode_nat(5)));
  CHECK_FALSE(enc::decode_nat(syntax::parse_hopi("<x,y> 0")).ok);
  CHECK_FALSE(enc::decode_nat(syntax::parse_hopi("a!0")).ok);
  CHECK_FALSE(enc::decode_nat(syntax::parse_hopi("<x> x!0")).ok);
  CHECK_FALSE(enc::decode_nat(syntax::parse_hopi("<x,y> (x!0 | y!0)")).ok);
}

TEST_CASE("function boxes follow the constructions") {
  auto zero = enc::encode_recfun(recfun::zero(1), {C("a")}, C("b"));
  CHECK(hopi::alpha_equal(zero, syntax::parse_hopi("a(X).b!(<x,y> y!0.0).0")));
  auto pr = enc::encode_recfun(recfun::proj(2, 3), {C("a1"), C("a2"), C("a3")}, C("b"));
  CHECK(hopi::alpha_equal(pr, syntax::parse_hopi("a1(X1).a2(X2).a3(X3).b!X2.0")));
  auto suc = enc::encode_recfun(recfun::succ(), {C("a")}, C("b"));
  CHECK(hopi::alpha_equal(suc, syntax::parse_hopi("a(X).b!(<x,y> x!X.0).0")));
  CHECK_THROWS_AS(enc::encode_recfun(recfun::succ(), {C("a"), C("c")}, C("b")), ArityError);
  // Internal channels are restricted.
  auto add = enc::encode_recfun(recfun::standard_library().at("add"), {C("a1"), C("a2")}, C("b"));
  CHECK(hopi::free_constants(add) == NameSet{C("a1"), C("a2"), C("b")});
}

TEST_CASE("composed systems compute the function") {
  // Oracle: the direct evaluator.
  for (const char* fn : {"add", "monus", "mult"}) {
    for (int x = 0; x <= 2; ++x) {
      for (int y = 0; y <= 2; ++y) {
        auto expect = recfun::eval(recfun::standard_library().at(fn), {x, y}, 100000);
        REQUIRE(expect.defined());
        CHECK_MESSAGE(run_composed(fn, {x, y}) == expect.value, fn << "(" << x << "," << y << ")");
      }
    }
  }
  for (int x = 0; x <= 3; ++x) CHECK(run_composed("pred", {x}) == (x == 0 ? 0 : x - 1));
  CHECK(run_composed("even_half", {4}) == 2);
}

TEST_CASE("composed system falls silent after answering") {
  auto b = C("b");
  auto sys = enc::compose_application(recfun::standard_library().at("add"), {1, 1}, b);
  ExploreOptions o;
  o.tau_only = true;
  auto lts = explore(sys, o);
  REQUIRE(lts.exhausted);
  std::set<std::string> visible;
  for (std::size_t i = 0; i < lts.size(); ++i) {
    for (auto& tr : step_hopi(std::get<hopi::Term>(lts.states[i]))) {
      if (!tr.action.is_tau()) visible.insert(tr.action.subject.id);
    }
  }
  CHECK(visible == std::set<std::string>{"b"});
}

TEST_CASE("an undefined minimisation diverges") {
  auto never = recfun::mu(recfun::comp(recfun::succ(), {recfun::proj(2, 2)}));
  REQUIRE(recfun::prove_undefined(never, {0}).has_value());
  auto sys = enc::compose_application(never, {0}, C("b"));
  Budget budget;
  budget.max_states = 3000;
  auto d = detect_divergence(sys, budget);
  CHECK(d.verdict == DivergenceResult::Verdict::Divergent);
  CHECK_FALSE(enc::weak_output(sys, C("b"), 400).has_value());
}

TEST_CASE("computation calculus translation") {
  CHECK(enc::encode_c(cc::nil())->kind == hopi::Kind::Nil);
  auto out = enc::encode_c(cc::out(C("a"), {4}));
  CHECK(hopi::alpha_equal(out, hopi::output(C("a"), enc::encode_nat(4), hopi::nil())));
  auto om = enc::encode_c(cc::omega());
  CHECK(detect_divergence(om).verdict == DivergenceResult::Verdict::Divergent);
  for (auto& tr : step_hopi(om)) CHECK(tr.action.is_tau());
  CHECK(hopi::free_constants(om).empty());
  // A box fed by the environment through the translation.
  auto sys = hopi::par(enc::encode_c(syntax::parse_c("F[a->b](add)")),
                       enc::encode_c(cc::out(C("a"), {2, 3})));
  auto r = enc::weak_output(hopi::restrict(C("a"), sys), C("b"));
  REQUIRE(r.has_value());
  CHECK(enc::decode_nat(*r).value == 5);
  CHECK_THROWS_AS(enc::encode_c(cc::stuck()), UnsupportedForm);
}

TEST_CASE("pipes") {
  auto p = enc::make_pipe(C("a"));
  CHECK(hopi::free_constants(p) == NameSet{C("a")});
  CHECK(hopi::parameter_count(p) == 3);
  auto inst = hopi::apply_abstraction(p, {C("i"), C("o"), C("c")});
  CHECK(hopi::struct_congruent(inst, syntax::parse_hopi("i(W).a(Z).c!Z.0 | o(W).c(Z).a!Z.0")));
  // Two pipes never share parameter names.
  auto q = enc::make_pipe(C("a"));
  CHECK(hopi::alpha_equal(p, q));
  CHECK(p->names != q->names);
}

TEST_CASE("pi to higher-order: first stage") {
  CHECK(enc::encode_pi(pi::nil())->kind == hopi::Kind::Nil);
  auto s1 = enc::encode_pi_stage1(syntax::parse_pi("u(x).0"));
  const auto& xu = s1.free_vars.at(C("u"));
  auto i = C("i"), o = C("o"), c = C("c");
  auto expect = hopi::restrict_all(
      {i, o, c}, hopi::par(hopi::application(hopi::var(xu), {i, o, c}),
                           hopi::output(i, hopi::nil(), hopi::input(c, "X", hopi::nil()))));
  CHECK(hopi::alpha_equal(hopi::forget_auxiliary(s1.term), expect));
  CHECK_THROWS_AS(enc::encode_pi(pi::output(Name::variable("x"), C("a"), pi::nil())), OpenTermError);
}

TEST_CASE("pi to higher-order: five internal steps per communication") {
  auto e = enc::encode_pi(syntax::parse_pi("a!b.0 | a(x).0"));
  ExploreOptions o;
  o.tau_only = true;
  auto lts = explore(e, o);
  REQUIRE(lts.exhausted);
  // Every maximal internal path has length five and ends in the empty process.
  std::function<void(std::size_t, int)> walk = [&](std::size_t s, int len) {
    if (lts.out[s].empty()) {
      CHECK(len == 5);
      CHECK(lts.keys[s] == "0");
      return;
    }
    for (auto ei : lts.out[s]) walk(lts.edges[ei].dst, len + 1);
  };
  walk(lts.root, 0);
}

TEST_CASE("pi to higher-order: replication arms one copy at a time") {
  auto e = enc::encode_pi(syntax::parse_pi("!a(x).0"));
  CHECK(detect_divergence(e).verdict == DivergenceResult::Verdict::NoDivergenceWithinBudget);
  auto f = enc::encode_pi(syntax::parse_pi("!a!b.0 | !a(x).0"));
  Budget b;
  b.max_states = 5000;
  // The communication loop is a real cycle of the source as well.
  CHECK(detect_divergence(f, b).verdict == DivergenceResult::Verdict::Divergent);
  CHECK(detect_divergence(syntax::parse_pi("!a!b.0 | !a(x).0")).verdict ==
        DivergenceResult::Verdict::Divergent);
}

// Canonical printing with the auxiliary marks dropped, as used for goldens.
std::string canonical_print(const pi::Term& p) {
  return syntax::print(pi::normalize(pi::forget_auxiliary(p)));
}

TEST_CASE("higher-order to pi: figure rows match the stored goldens") {
  for (const char* row : {"fig2_output", "fig2_abstraction", "fig2_application"}) {
    auto src = syntax::parse_hopi(slurp(std::string("golden/") + row + ".hopi"));
    auto expect = syntax::parse_pi(slurp(std::string("golden/") + row + ".pi"));
    CHECK_MESSAGE(canonical_print(enc::encode_hopi(src)) == canonical_print(expect), row);
  }
  // Abstractions are inert.
  CHECK(enc::encode_hopi(syntax::parse_hopi("<x> x!0.0"))->kind == pi::Kind::Nil);
  // Application with no names sends the variable itself.
  auto nullary = enc::encode_hopi(syntax::parse_hopi("a(X).X"));
  CHECK(canonical_print(nullary) == canonical_print(syntax::parse_pi("a(x).x!x.0")));
  // A transmitted variable of known arity is eta-expanded.
  auto fwd = enc::encode_hopi(syntax::parse_hopi("a(X).(b!X.0 | X<d>)"));
  CHECK(canonical_print(fwd) ==
        canonical_print(syntax::parse_pi("a(x).((new f) (b!f.0 | !f(z).z(y).(new g) x!g.g!y.0) | (new g) x!g.g!d.0)")));
  // Replicated prefixes stay guarded.
  auto rep = enc::encode_hopi(syntax::parse_hopi("!a(X).X"));
  CHECK(rep->kind == pi::Kind::RepInput);
}

TEST_CASE("translations are homomorphic on parallel composition and restriction") {
  gen::PiGen pg(301, true);
  gen::HopiGen hg(302);
  for (int i = 0; i < 200; ++i) {
    auto p = pg.term(1 + i % 6), q = pg.term(1 + (i * 7) % 6);
    CHECK(hopi::alpha_equal(enc::encode_pi(pi::par(p, q)), hopi::par(enc::encode_pi(p), enc::encode_pi(q))));
    auto c = C("c");
    CHECK(hopi::alpha_equal(enc::encode_pi(pi::restrict(c, p)), hopi::restrict(c, enc::encode_pi(p))));
    auto e = hg.term(1 + i % 6), f = hg.term(1 + (i * 5) % 6);
    CHECK(pi::alpha_equal(enc::encode_hopi(hopi::par(e, f)), pi::par(enc::encode_hopi(e), enc::encode_hopi(f))));
    CHECK(pi::alpha_equal(enc::encode_hopi(hopi::restrict(c, e)), pi::restrict(c, enc::encode_hopi(e))));
  }
}

TEST_CASE("translations commute with injective renamings") {
  gen::PiGen pg(303, true);
  gen::HopiGen hg(304);
  gen::CGen cg(305);
  gen::Rng rng(306);
  for (int i = 0; i < 100; ++i) {
    auto p = pg.term(1 + i % 8);
    auto sp = gen::random_injection(pi::free_constants(p), rng);
    CHECK(hopi::alpha_equal(enc::encode_pi(pi::substitute(p, sp)), hopi::rename(enc::encode_pi(p), sp)));
    auto e = hg.term(1 + i % 8);
    auto se = gen::random_injection(hopi::free_constants(e), rng);
    CHECK(pi::alpha_equal(enc::encode_hopi(hopi::rename(e, se)), pi::substitute(enc::encode_hopi(e), se)));
    auto c = cg.term(1 + i % 3);
    auto sc = gen::random_injection(cc::free_names(c), rng);
    CHECK(hopi::alpha_equal(enc::encode_c(gen::rename_c(c, sc)), hopi::rename(enc::encode_c(c), sc)));
  }
}

namespace {

std::vector<std::string> corpus_lines(const std::string& rel) {
  std::istringstream in(slurp(rel));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("pi to higher-order: every transition has the padding of its clause") {
  std::map<std::string, int> clauses;
  for (const auto& src : corpus_lines("corpus/padding.pi")) {
    auto rep = enc::check_tau_padding(syntax::parse_pi(src));
    for (const auto& c : rep.cases) {
      ++clauses[c.clause];
      CHECK_MESSAGE(c.ok, src << " " << c.source_label << ": " << c.note);
      CHECK(c.path.size() == c.expected.size());
      CHECK(c.states.size() == c.path.size() + 1);
    }
  }
  for (const char* k : {"input", "output", "bound-output", "tau"}) CHECK(clauses[k] > 0);

  auto comm = enc::check_tau_padding(syntax::parse_pi("a!b.0 | a(x).0"));
  auto tau = std::find_if(comm.cases.begin(), comm.cases.end(), [](const auto& c) { return c.clause == "tau"; });
  REQUIRE(tau != comm.cases.end());
  REQUIRE(tau->path.size() == 5);
  CHECK(tau->path[3] == "tau[a]");
  CHECK(tau->states.back() == "0");
  CHECK_THROWS_AS(enc::check_tau_padding(syntax::parse_pi("!a(x).0")), UnsupportedForm);
}

TEST_CASE("replicated outputs re-arm on internal steps alone") {
  // The continuation of an encoded output runs once the pipe holds the
  // payload, so each copy arms the next one before any visible action.
  auto src = syntax::parse_pi("!c!a.0");
  CHECK(detect_divergence(src).verdict == DivergenceResult::Verdict::NoDivergenceWithinBudget);
  CHECK(detect_divergence(enc::encode_pi(src)).verdict == DivergenceResult::Verdict::Divergent);
  // For the same reason a loop behind a visible output becomes reachable
  // through internal steps only.
  auto behind = syntax::parse_pi("b!a.a!b.0 | !a(y).a!a.0");
  CHECK(detect_divergence(behind).verdict == DivergenceResult::Verdict::NoDivergenceWithinBudget);
  CHECK(detect_divergence(enc::encode_pi(behind)).verdict == DivergenceResult::Verdict::Divergent);
}

namespace {

using Outcome = enc::EncodingReport::Outcome;
using Criterion = enc::EncodingReport::Criterion;

bool has_rep_output(const pi::Term& t) {
  if (t->kind == pi::Kind::RepOutput) return true;
  if (t->kind == pi::Kind::Par) return std::any_of(t->parts.begin(), t->parts.end(), has_rep_output);
  return t->body && has_rep_output(t->body);
}

Outcome outcome_of(const std::vector<enc::EncodingReport>& rs, Criterion c) {
  for (const auto& r : rs)
    if (r.criterion == c) return r.outcome;
  FAIL("criterion missing");
  return Outcome::Inconclusive;
}

}  // namespace

TEST_CASE("encoding criteria") {
  auto pi_ab = enc::check_criteria(enc::Encoder::PiToHopi, {syntax::parse_pi("a!b.0")});
  CHECK(pi_ab.size() == 5);
  CHECK(outcome_of(pi_ab, Criterion::NameInvariance) == Outcome::Pass);
  CHECK(outcome_of(pi_ab, Criterion::ForthCorrespondence) == Outcome::Pass);
  CHECK(outcome_of(pi_ab, Criterion::BackCorrespondence) == Outcome::Pass);

  auto omega = enc::check_criteria(enc::Encoder::CToHopi, {cc::omega()});
  CHECK(outcome_of(omega, Criterion::DivergenceReflection) == Outcome::Pass);
  CHECK(outcome_of(omega, Criterion::BackCorrespondence) == Outcome::NotClaimed);

  // The encoded continuation of an output is released early, so the encoding
  // offers an input the source cannot yet perform.
  auto early = enc::check_criteria(enc::Encoder::PiToHopi, {syntax::parse_pi("a!b.a(z).0")});
  CHECK(outcome_of(early, Criterion::BackCorrespondence) == Outcome::Fail);
  CHECK(outcome_of(early, Criterion::ForthCorrespondence) == Outcome::Pass);

  CHECK(enc::parse_encoder("pi>hopi") == enc::Encoder::PiToHopi);
  CHECK(enc::parse_encoder("c-hopi") == enc::Encoder::CToHopi);
  CHECK_FALSE(enc::parse_encoder("pi-c").has_value());
}

TEST_CASE("criteria reports on random samples") {
  gen::PiGen pg(311, true);
  gen::HopiGen hg(312);
  gen::CGen cg(313);
  std::vector<AnyTerm> ps, hs, cs;
  for (int i = 0; i < 20; ++i) {
    // Replicated outputs are covered separately; their encodings grow fast.
    auto p = pg.term(1 + i % 5);
    if (!has_rep_output(p)) ps.push_back(p);
    hs.push_back(hg.term(1 + i % 6));
    cs.push_back(cg.term(1 + i % 3));
  }
  CHECK(ps.size() >= 10);
  auto check = [](enc::Encoder e, const std::vector<AnyTerm>& samples) {
    auto rs = enc::check_criteria(e, samples);
    CHECK(rs.size() == 5 * samples.size());
    for (const auto& r : rs) {
      if (r.outcome == Outcome::Fail) CHECK_FALSE(r.witness.empty());
      // Only back correspondence of the pi encoding can fail (early release
      // of output continuations).
      if (r.criterion != Criterion::BackCorrespondence)
        CHECK_MESSAGE(r.outcome != Outcome::Fail, enc::criterion_name(r.criterion) << " " << r.sample);
    }
    auto j = nlohmann::json::parse(enc::to_json(rs));
    CHECK(j.size() == rs.size());
    CHECK(j[0].contains("criterion"));
    CHECK(j[0].contains("verdict"));
  };
  check(enc::Encoder::PiToHopi, ps);
  check(enc::Encoder::HopiToPi, hs);
  check(enc::Encoder::CToHopi, cs);
}
