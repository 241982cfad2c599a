#include <doctest.h>

#include "generators.hpp"
#include "pcalc/syntax.hpp"

using namespace pcalc;
using namespace pcalc::syntax;

namespace {

Name C(const char* s) { return Name::constant(s); }
Name V(const char* s) { return Name::variable(s); }

}  // namespace

TEST_CASE("pi grammar") {
  auto t = parse_pi("a(x).x!b.0");
  CHECK(pi::alpha_equal(t, pi::input(C("a"), V("x"), pi::output(V("x"), C("b"), pi::nil()))));
  CHECK(pi::show(parse_pi("a!b")) == "a!b.0");
  CHECK(pi::show(parse_pi("(new c) c!a.0")) == "(new c) c!a.0");
  CHECK(pi::show(parse_pi("!a(x).x!x | !b!c")) == "(!a(x).x!x.0 | !b!c.0)");
  // Prefix binds tighter than |.
  auto p = parse_pi("a(x).b!x | c!x");
  REQUIRE(p->kind == pi::Kind::Par);
  CHECK(p->parts[1]->object == C("x"));
  CHECK(p->parts[0]->body->object == V("x"));
  // Restriction scopes over one prefix only.
  auto r = parse_pi("(new c) a!c | c!a");
  REQUIRE(r->kind == pi::Kind::Par);
  CHECK(pi::free_constants(r) == NameSet{C("a"), C("c")});
  // Restriction shadows an enclosing variable.
  auto s = parse_pi("a(x).(new x) x!x");
  CHECK(s->body->body->subject.is_constant());
  CHECK(pi::show(parse_pi("(new c, d) c!d // comment\n")) == "(new c) (new d) c!d.0");
}

TEST_CASE("higher-order grammar") {
  auto zero = parse_hopi("<x,y> y!0.0");
  CHECK(hopi::alpha_equal(zero, hopi::abstraction({V("x"), V("y")},
                                                  hopi::output(V("y"), hopi::nil(), hopi::nil()))));
  auto app = parse_hopi("(<x,y> y!0.0)<a,b>");
  CHECK(hopi::struct_congruent(app, parse_hopi("b!0")));
  auto in = parse_hopi("a(X).X<d>");
  REQUIRE(in->kind == hopi::Kind::In);
  CHECK(in->body->kind == hopi::Kind::App);
  CHECK(hopi::show(parse_hopi("a!(b!0.0).0")) == "a!(b!0.0).0");
  CHECK(hopi::show(parse_hopi("!(a(X).X)")) == "!(a(X).X)");
  CHECK_THROWS_AS(parse_hopi("<x,x> 0"), ArityError);
  CHECK_THROWS_AS(parse_hopi("a(x).0"), SyntaxError);
}

TEST_CASE("computation grammar") {
  auto t = parse_c("a!(3,5) | F[a->b](add) | Omega | 0");
  CHECK(cc::show(cc::normalize(t)) == "(F[a->b](add) | Omega | a!(3,5))");
  auto box = parse_c("F[a->b](succ)");
  REQUIRE(box->kind == cc::Kind::FuncBox);
  CHECK(box->subject == C("a"));
  CHECK(box->target == C("b"));
  auto inl = parse_c("F[a->b](comp(succ, succ))");
  CHECK(inl->fun_name == "comp(succ, succ)");
  CHECK(cc::show(parse_c("a!7")) == "a!(7)");
  CHECK_THROWS_AS(parse_c("F[a->b](zero(0))"), ArityError);
  CHECK_THROWS_AS(parse_c("F[a->b](nosuch)"), Error);
}

TEST_CASE("printer") {
  CHECK(print(pi::nil()) == "0");
  auto gen_name = fresh_constant("c");
  auto t = pi::restrict(gen_name, pi::output(gen_name, C("c"), pi::nil()));
  auto s = print(t);
  CHECK(s.find('#') == std::string::npos);
  CHECK(pi::alpha_equal(parse_pi(s), t));
  // A variable that shares its identifier with a free constant is renamed.
  auto clash = pi::input(C("a"), V("x"), pi::output(V("x"), C("x"), pi::nil()));
  auto cs = print(clash);
  CHECK(pi::alpha_equal(parse_pi(cs), clash));
  auto ho = hopi::input(C("a"), fresh_id("Z"), hopi::var("X"));
  CHECK(print(ho).find('#') == std::string::npos);
  CHECK(print(cc::par(cc::out(C("a"), {1}), cc::omega())) == "(a!(1) | Omega)");
}

TEST_CASE("diagnostics carry positions") {
  try {
    parse_pi("a(x).\n  b!!");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 5);
    CHECK_FALSE(e.expected().empty());
  }
  CHECK_THROWS_AS(parse_pi("a(x"), SyntaxError);
  CHECK_THROWS_AS(parse_pi("a$b"), SyntaxError);
  CHECK_THROWS_AS(parse_pi(""), SyntaxError);
  CHECK_THROWS_AS(parse_pi("5"), SyntaxError);
  CHECK_THROWS_AS(parse_c("a!()"), SyntaxError);
}

TEST_CASE("round trip on random terms") {
  gen::PiGen pg(101);
  gen::HopiGen hg(102);
  for (int i = 0; i < 10000; ++i) {
    auto p = pg.term(1 + i % 10);
    auto ps = print(p);
    auto pp = parse_pi(ps);
    CHECK_MESSAGE(pi::alpha_equal(pp, p), ps);
    auto e = hg.term(1 + i % 10);
    auto es = print(e);
    auto ee = parse_hopi(es);
    CHECK_MESSAGE(hopi::alpha_equal(ee, e), es);
  }
}

TEST_CASE("round trip after normalization") {
  gen::PiGen pg(103);
  gen::HopiGen hg(104);
  for (int i = 0; i < 1000; ++i) {
    auto p = pi::normalize(pg.term(1 + i % 10));
    CHECK(pi::key(parse_pi(print(p))) == pi::show(p));
    auto e = hopi::normalize(hg.term(1 + i % 10));
    CHECK(hopi::key(parse_hopi(print(e))) == hopi::show(e));
  }
}

TEST_CASE("parser is total") {
  gen::Rng rng(105);
  const std::string alphabet = "ab xXY().|!<>,0[]-F#$\n/";
  gen::PiGen pg(106);
  for (int i = 0; i < 5000; ++i) {
    std::string s;
    if (i % 2) {
      s = print(pg.term(1 + i % 6));
      // Mutate a few characters.
      for (int k = 0; k < 2 && !s.empty(); ++k) {
        s[static_cast<std::size_t>(rng.below(static_cast<int>(s.size())))] =
            alphabet[static_cast<std::size_t>(rng.below(static_cast<int>(alphabet.size())))];
      }
    } else {
      int n = rng.below(20);
      for (int k = 0; k < n; ++k) s += alphabet[static_cast<std::size_t>(rng.below(static_cast<int>(alphabet.size())))];
    }
    for (int calc = 0; calc < 3; ++calc) {
      try {
        if (calc == 0) parse_pi(s);
        if (calc == 1) parse_hopi(s);
        if (calc == 2) parse_c(s);
      } catch (const Error&) {
      }
    }
  }
  CHECK(true);
}

TEST_CASE("calculus from file extension") {
  CHECK(calculus_from_path("x/y.pi") == Calculus::Pi);
  CHECK(calculus_from_path("y.hopi") == Calculus::Hopi);
  CHECK(calculus_from_path("y.cc") == Calculus::C);
  CHECK(calculus_from_path("y.rf") == Calculus::RecFun);
  CHECK_THROWS_AS(calculus_from_path("y.txt"), Error);
}
