#include <doctest.h>

#include <algorithm>

#include "generators.hpp"
#include "pcalc/semantics.hpp"
#include "pcalc/syntax.hpp"

using namespace pcalc;
using syntax::parse_c;
using syntax::parse_hopi;
using syntax::parse_pi;

namespace {

template <class T, class KeyFn>
std::vector<std::string> successor_set(const std::vector<Transition<T>>& ts, KeyFn key) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(label_key(t.action) + " -> " + key(t.target));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> pi_succ(const pi::Term& p) {
  return successor_set(step_pi(p), [](const pi::Term& t) { return pi::key(t); });
}

std::vector<std::string> ho_succ(const hopi::Term& e, const HopiMenu& menu = {}) {
  return successor_set(step_hopi(e, menu), [](const hopi::Term& t) { return hopi::key(t); });
}

}  // namespace

TEST_CASE("pi transitions") {
  SUBCASE("output axiom") {
    auto ts = step_pi(parse_pi("a!b.0"));
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].action.kind == Action::Kind::PiOut);
    CHECK(label_key(ts[0].action) == "a!b");
    CHECK(pi::key(ts[0].target) == "0");
  }
  SUBCASE("restricted channel only communicates") {
    auto ts = step_pi(parse_pi("(new c)(c!d.0 | c(x).x!e.0)"));
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].action.is_tau());
    CHECK(ts[0].action.via->is_constant());
    CHECK(pi::key(ts[0].target) == pi::key(parse_pi("d!e")));
  }
  SUBCASE("bound output") {
    auto ts = step_pi(parse_pi("(new b) a!b.0"));
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].action.kind == Action::Kind::PiBoundOut);
    CHECK(ts[0].action.subject == Name::constant("a"));
    CHECK(ts[0].action.object != Name::constant("a"));
    CHECK(pi::key(ts[0].target) == "0");
  }
  SUBCASE("no output on a restricted subject") {
    CHECK(step_pi(parse_pi("(new a) a!a")).empty());
  }
  SUBCASE("input instantiates the binder") {
    auto ts = step_pi(parse_pi("a(x).x!x"));
    std::vector<std::string> got;
    for (const auto& t : ts) got.push_back(label_key(t.action) + " " + pi::key(t.target));
    std::sort(got.begin(), got.end());
    CHECK(got == std::vector<std::string>{"a(#e:0) #e:0!#e:0.0", "a(a) a!a.0"});
  }
  SUBCASE("extrusion then communication closes the scope") {
    auto ts = step_pi(parse_pi("(new c) a!c.c!b | a(x).x(y).0"));
    int taus = 0;
    for (const auto& t : ts) {
      if (!t.action.is_tau()) continue;
      ++taus;
      CHECK(pi::key(t.target) == pi::key(parse_pi("(new c)(c!b | c(y).0)")));
    }
    CHECK(taus == 1);
  }
  SUBCASE("open terms are rejected") {
    auto open = pi::output(Name::variable("x"), Name::constant("a"), pi::nil());
    CHECK_THROWS_AS(step_pi(open), OpenTermError);
  }
}

TEST_CASE("pi edge counts per constructor") {
  // Inputs range over fn(p) plus one fresh name.
  const std::vector<std::pair<const char*, std::size_t>> table{
      {"0", 0},
      {"a!b", 1},
      {"a(x).0", 2},
      {"(new c) a!c", 1},
      {"(new c) c!a", 0},
      {"a!b | a(x).0", 5},
      {"!a(x).0", 2},
      {"!a!b", 1},
      {"!a!b | a(x).0", 5},
      {"a(x).0 | b(y).0", 6},
  };
  for (const auto& [src, n] : table) {
    CAPTURE(src);
    CHECK(step_pi(parse_pi(src)).size() == n);
  }
  PiStepOptions wide;
  wide.universe = {Name::constant("u"), Name::constant("v")};
  CHECK(step_pi(parse_pi("a(x).0"), wide).size() == 4);
}

TEST_CASE("higher-order transitions") {
  SUBCASE("output axiom") {
    auto ts = step_hopi(parse_hopi("a!(<x> x!0.0).0"));
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].action.kind == Action::Kind::HoOut);
    CHECK(ts[0].action.extruded.empty());
    CHECK(hopi::parameter_count(ts[0].action.payload) == 1);
  }
  SUBCASE("menu-driven input and application") {
    auto zero = parse_hopi("<x,y> y!0.0");
    HopiMenu menu = [zero](const hopi::Term&) { return std::vector<hopi::Term>{zero}; };
    auto ts = step_hopi(parse_hopi("a(X).X<d,e>"), menu);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].action.kind == Action::Kind::HoIn);
    CHECK(hopi::key(ts[0].target) == hopi::key(parse_hopi("e!0")));
    CHECK(step_hopi(parse_hopi("a(X).X<d,e>")).empty());
    CHECK_THROWS_AS(step_hopi(parse_hopi("a(X).X<d>"), menu), ArityError);
  }
  SUBCASE("extrusion") {
    auto ts = step_hopi(parse_hopi("(new c) a!(c!0.0).c(X).X"));
    REQUIRE(ts.size() == 1);
    REQUIRE(ts[0].action.extruded.size() == 1);
    auto e = ts[0].action.extruded[0];
    CHECK(hopi::free_constants(ts[0].action.payload).count(e));
    CHECK(hopi::free_constants(ts[0].target).count(e));
  }
  SUBCASE("communication closes the scope") {
    auto ts = step_hopi(parse_hopi("(new c) a!(c!0.0).0 | a(X).(X | c(Y).0)"));
    int taus = 0;
    for (const auto& t : ts) {
      if (!t.action.is_tau()) continue;
      ++taus;
      // The received c must not be confused with the free c on the right.
      CHECK(hopi::free_constants(t.target) == NameSet{Name::constant("c")});
    }
    CHECK(taus == 1);
  }
  SUBCASE("derived replication unfolds with one tau") {
    auto p = parse_hopi("a!0.0");
    auto q = hopi::input(Name::constant("c"), "X",
                         hopi::par({hopi::var("X"), p,
                                    hopi::output(Name::constant("c"), hopi::var("X"), hopi::nil())}));
    auto rep = hopi::restrict(Name::constant("c"),
                              hopi::par(q, hopi::output(Name::constant("c"), q, hopi::nil())));
    std::size_t taus = 0;
    for (const auto& t : step_hopi(rep)) {
      if (!t.action.is_tau()) continue;
      ++taus;
      CHECK(hopi::key(t.target) == hopi::key(hopi::par(p, rep)));
    }
    CHECK(taus == 1);
  }
  SUBCASE("lazy replication") {
    auto ts = ho_succ(parse_hopi("!(a!0.0)"));
    REQUIRE(ts.size() == 1);
    CHECK(ts[0] == "a![0] -> !(a!0.0)");
    auto talk = ho_succ(parse_hopi("!(a!0.0 | a(X).X)"));
    CHECK(std::count_if(talk.begin(), talk.end(),
                        [](const std::string& s) { return s.rfind("tau", 0) == 0; }) >= 1);
  }
  SUBCASE("open terms are rejected") {
    CHECK_THROWS_AS(step_hopi(parse_hopi("X")), OpenTermError);
  }
}

TEST_CASE("computation transitions") {
  SUBCASE("Omega") {
    auto ts = step_c(cc::omega());
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].action.is_tau());
    CHECK(cc::key(ts[0].target) == "Omega");
  }
  SUBCASE("communication with a function box") {
    auto ts = step_c(parse_c("a!5 | F[a->b](succ)"));
    std::vector<std::string> taus;
    for (const auto& t : ts) {
      if (t.action.is_tau()) taus.push_back(cc::key(t.target));
    }
    CHECK(taus == std::vector<std::string>{"b!(6)"});
  }
  SUBCASE("output") {
    auto ts = step_c(parse_c("a!3"));
    REQUIRE(ts.size() == 1);
    CHECK(label_key(ts[0].action) == "a!(3)");
    CHECK(cc::key(ts[0].target) == "0");
  }
  SUBCASE("menu inputs and undefinedness") {
    CStepOptions o;
    o.menu = {{1}, {2, 3}};
    o.fuel = 1000;
    auto env = recfun::standard_library();
    env["never"] = recfun::mu(recfun::comp(recfun::succ(), {recfun::proj(2, 2)}));
    auto box = parse_c("F[a->b](never)", env);
    auto ts = step_c(box, o);
    REQUIRE(ts.size() == 1);
    CHECK(label_key(ts[0].action) == "a?(1)");
    CHECK(cc::key(ts[0].target) == "Omega");
    auto half = step_c(parse_c("F[a->b](even_half)"), o);
    REQUIRE(half.size() == 1);
    CHECK(cc::key(half[0].target) == "Stuck");
  }
}

TEST_CASE("exploration") {
  SUBCASE("nil") {
    auto g = explore(pi::nil());
    CHECK(g.size() == 1);
    CHECK(g.edges.empty());
    CHECK(g.exhausted);
  }
  SUBCASE("Omega") {
    auto g = explore(cc::omega());
    CHECK(g.size() == 1);
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].src == g.edges[0].dst);
    CHECK(g.exhausted);
  }
  SUBCASE("budget") {
    ExploreOptions o;
    o.budget.max_states = 3;
    auto g = explore(parse_pi("!a(x).a!x"), o);
    CHECK_FALSE(g.exhausted);
    CHECK(g.size() <= 3);
    ExploreOptions d;
    d.budget.max_depth = 1;
    CHECK_FALSE(explore(parse_pi("a!b.a!b"), d).exhausted);
  }
  SUBCASE("states are canonical") {
    gen::PiGen pg(201, true);
    for (int i = 0; i < 100; ++i) {
      ExploreOptions o;
      o.budget.max_states = 200;
      o.collect_garbage = false;
      auto g = explore(pg.term(1 + i % 6), o);
      for (std::size_t s = 0; s < g.size(); ++s) {
        auto t = std::get<pi::Term>(g.states[s]);
        CHECK(pi::show(pi::normalize(t)) == g.keys[s]);
      }
    }
  }
  SUBCASE("garbage collection drops dead components") {
    auto dead = parse_pi("(new c) c!a.0 | b!a");
    auto g = canonical_state(dead);
    CHECK(pi::show(g) == "b!a.0");
    auto alive = parse_pi("(new c)(c!a.0 | c(x).0)");
    CHECK(pi::show(canonical_state(alive)) == pi::key(alive));
    auto ho = parse_hopi("(new c) c(X).X | a!0");
    CHECK(hopi::show(canonical_state(ho)) == "a!0.0");
  }
  SUBCASE("exports") {
    auto g = explore(parse_pi("a!b.c!d"));
    auto dot = to_dot(g);
    CHECK(dot.find("digraph") == 0);
    CHECK(dot.find("a!b") != std::string::npos);
    auto lines = to_json_lines(g);
    CHECK(std::count(lines.begin(), lines.end(), '\n') == 2);
    CHECK(lines.find("\"action\":\"a!b\"") != std::string::npos);
  }
}

TEST_CASE("divergence") {
  auto omega = detect_divergence(cc::omega());
  CHECK(omega.verdict == DivergenceResult::Verdict::Divergent);
  CHECK(omega.certificate == DivergenceResult::Certificate::Cycle);
  auto quiet = detect_divergence(parse_pi("a!b.0"));
  CHECK(quiet.verdict == DivergenceResult::Verdict::NoDivergenceWithinBudget);
  auto loop = detect_divergence(parse_pi("(new c)(c!c | !c(x).c!x)"));
  CHECK(loop.verdict == DivergenceResult::Verdict::Divergent);
  REQUIRE_FALSE(loop.witness.empty());
  CHECK(loop.cycle_start < loop.witness.size());
  // A tau path that keeps growing is reported against the depth bound.
  Budget b;
  b.max_depth = 30;
  auto grow = detect_divergence(parse_pi("(new c)(c!c | !c(x).(c!x | x!x))"), b);
  CHECK(grow.verdict == DivergenceResult::Verdict::Divergent);
  CHECK(grow.certificate == DivergenceResult::Certificate::DepthBound);
}

TEST_CASE("transitions are invariant under alpha-renaming") {
  gen::PiGen pg(301, true);
  for (int i = 0; i < 300; ++i) {
    auto p = pg.term(1 + i % 7);
    CHECK(pi_succ(p) == pi_succ(pi::freshen(p)));
  }
}

TEST_CASE("congruent terms have congruent successors") {
  gen::PiGen pg(401, true);
  for (int i = 0; i < 200; ++i) {
    auto p = pg.term(1 + i % 5), q = pg.term(1 + (i + 1) % 5);
    CHECK(pi_succ(pi::par(p, q)) == pi_succ(pi::par(q, pi::par(pi::nil(), p))));
    CHECK(pi_succ(pi::par(p, q)) == pi_succ(pi::normalize(pi::par(p, q))));
  }
  auto e = parse_hopi("(<x,y> y!0.0)<a,b> | c!0");
  auto f = parse_hopi("c!0 | b!0");
  CHECK(ho_succ(e) == ho_succ(f));
}
