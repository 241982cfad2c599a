#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pcalc/encodings.hpp"
#include "pcalc/semantics.hpp"

/// Bounded weak bisimulation and barbs.
namespace pcalc::eq {

struct WitnessStep {
  std::string state;   // printed state the move starts from
  std::string action;  // weak label; "tau" for an internal move
};

struct Verdict {
  enum class Kind { Equivalent, Distinguished, Inconclusive };

  Kind kind = Kind::Inconclusive;
  std::size_t states = 0;  // states of the combined graph
  bool complete = false;  // both graphs fully explored
  /// Distinguished: the attacker's moves, the last one unanswerable.
  std::vector<WitnessStep> witness;
  std::string note;

  bool equivalent() const { return kind == Kind::Equivalent; }
  bool distinguished() const { return kind == Kind::Distinguished; }
};

std::string verdict_name(Verdict::Kind k);
std::string to_json(const Verdict& v);

/// Maps a visible label to the class it is compared by. The default is
/// label_key.
using LabelMatcher = std::function<std::string(const Action&)>;

struct BisimOptions {
  bool divergence_sensitive = false;
  LabelMatcher matcher;
};

/// Only pipe-shaped higher-order inputs are compared; other inputs are
/// dropped from the graph.
LabelMatcher pipe_matcher();

/// Weak bisimilarity of the two roots. States with equal keys are shared
/// between the graphs. Unexplored states only relate to themselves, so an
/// Equivalent verdict is sound on partial graphs; Distinguished needs either
/// exhausted graphs or a difference in fully explored weak barbs.
Verdict weak_bisim(const Lts& a, const Lts& b, const BisimOptions& opts = {});

/// Block number of every root when all graphs are refined together.
/// Requires exhausted graphs for the numbers to be exact.
std::vector<std::size_t> bisim_classes(const std::vector<Lts>& graphs, const BisimOptions& opts = {});

struct Barb {
  Name subject;
  bool output = false;
  auto operator<=>(const Barb&) const = default;
};

struct BarbSet {
  std::set<Barb> barbs;
  bool complete = true;  // the tau-closure was explored in full
};

std::string show(const BarbSet& b);

BarbSet weak_barbs(const Lts& lts, std::size_t state);
BarbSet weak_barbs(const pi::Term& p, const Budget& budget = {});
BarbSet weak_barbs(const hopi::Term& e, const Budget& budget = {});
BarbSet weak_barbs(const cc::Term& p, const Budget& budget = {});

/// Explores both terms and compares them. Top-level parallel components the
/// two sides have in common are cancelled first (weak bisimilarity is
/// preserved by parallel composition).
Verdict check_pi(const pi::Term& p, const pi::Term& q, const ExploreOptions& opts = {},
                 const BisimOptions& bopts = {});
Verdict check_hopi(const hopi::Term& p, const hopi::Term& q, const ExploreOptions& opts = {},
                   const BisimOptions& bopts = {});
Verdict check_c(const cc::Term& p, const cc::Term& q, const ExploreOptions& opts = {},
                const BisimOptions& bopts = {});

/// Context bisimilarity decided through the first-order translation:
/// P ~ct Q iff [[P]] and [[Q]] are weakly bisimilar.
Verdict hopi_ctx_bisim(const hopi::Term& p, const hopi::Term& q, const Budget& budget = {},
                       const enc::HopiToPiOptions& tr = {});

}  // namespace pcalc::eq
