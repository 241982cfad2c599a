#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pcalc/c_term.hpp"
#include "pcalc/hopi_term.hpp"
#include "pcalc/pi_term.hpp"

namespace pcalc {

using recfun::Natural;
using Tuple = std::vector<Natural>;

/// Transition label for all three calculi.
struct Action {
  enum class Kind { Tau, PiIn, PiOut, PiBoundOut, HoIn, HoOut, CIn, COut };

  Kind kind = Kind::Tau;
  Name subject;
  Name object;                  // PiIn / PiOut object, PiBoundOut extruded name
  std::vector<Name> extruded;   // HoOut
  hopi::Term payload;           // HoIn / HoOut
  Tuple tuple;                  // CIn / COut
  std::optional<Name> via;      // Tau: channel of the communication, if any

  static Action tau(std::optional<Name> via = std::nullopt);

  bool is_tau() const { return kind == Kind::Tau; }
  bool is_input() const {
    return kind == Kind::PiIn || kind == Kind::HoIn || kind == Kind::CIn;
  }
  bool is_output() const { return !is_tau() && !is_input(); }
};

/// Printed label; identical for labels that must be matched as equal.
/// Higher-order payloads are printed in normal form.
std::string label_key(const Action& a);

template <class T>
struct Transition {
  Action action;
  T target;
};

// ---------------------------------------------------------------------------
// Single-step transition generation.

struct PiStepOptions {
  /// Extra names offered as input objects, besides fn(p) and one fresh name.
  NameSet universe;
};

/// Input menu for higher-order input: payloads offered in a given state.
using HopiMenu = std::function<std::vector<hopi::Term>(const hopi::Term& state)>;

struct CStepOptions {
  std::uint64_t fuel = 100000;
  /// Tuples offered to function boxes by the environment.
  std::vector<Tuple> menu;
};

/// Fresh constant used for extrusion and fresh input objects: "#e_k" with the
/// least k not free in the given set.
Name canonical_fresh(const NameSet& avoid, std::size_t skip = 0);

std::vector<Transition<pi::Term>> step_pi(const pi::Term& p, const PiStepOptions& opts = {});
std::vector<Transition<hopi::Term>> step_hopi(const hopi::Term& e, const HopiMenu& menu = {});
std::vector<Transition<cc::Term>> step_c(const cc::Term& p, const CStepOptions& opts = {});

/// Drops top-level components that can never act again: every prefix they
/// can ever expose sits on one of their own restricted names and no channel
/// offers both directions. The result is strongly bisimilar to the input.
pi::Term collect_garbage(const pi::Term& p);
hopi::Term collect_garbage(const hopi::Term& e);

// ---------------------------------------------------------------------------
// Exploration.

using AnyTerm = std::variant<pi::Term, hopi::Term, cc::Term>;

std::string show_any(const AnyTerm& t);

struct Budget {
  std::size_t max_states = 20000;
  std::size_t max_depth = 200;
};

struct ExploreOptions {
  Budget budget;
  bool tau_only = false;
  bool collect_garbage = true;
  NameSet universe;           // pi input objects
  HopiMenu menu;              // higher-order input payloads
  std::vector<Tuple> c_menu;  // tuples offered to function boxes
  std::uint64_t fuel = 100000;
};

struct Edge {
  std::size_t src;
  Action action;
  std::size_t dst;
};

struct Lts {
  std::vector<AnyTerm> states;
  std::vector<std::string> keys;
  std::vector<std::size_t> depth;
  std::vector<bool> expanded;
  std::vector<Edge> edges;
  std::vector<std::vector<std::size_t>> out;  // edge indices per state
  std::unordered_map<std::string, std::size_t> index;
  Budget budget;
  bool tau_only = false;
  bool exhausted = false;
  std::size_t root = 0;

  std::size_t size() const { return states.size(); }
};

Lts explore(const pi::Term& p, const ExploreOptions& opts = {});
Lts explore(const hopi::Term& e, const ExploreOptions& opts = {});
Lts explore(const cc::Term& p, const ExploreOptions& opts = {});

/// Canonical state (normalized, garbage collected when requested).
pi::Term canonical_state(const pi::Term& p, bool gc = true);
hopi::Term canonical_state(const hopi::Term& e, bool gc = true);
cc::Term canonical_state(const cc::Term& p);

std::string to_dot(const Lts& lts);
/// One JSON object per edge: {"src","action","dst"} with state keys.
std::string to_json_lines(const Lts& lts);

// ---------------------------------------------------------------------------
// Divergence.

struct DivergenceResult {
  enum class Verdict { Divergent, NoDivergenceWithinBudget, BudgetExhausted };
  enum class Certificate { None, Cycle, DepthBound };

  Verdict verdict = Verdict::BudgetExhausted;
  Certificate certificate = Certificate::None;
  /// States (keys) of the witness: path to the cycle entry followed by the
  /// cycle, or the over-long tau path.
  std::vector<std::string> witness;
  std::size_t cycle_start = 0;  // index into witness where the cycle begins
  std::size_t states_explored = 0;
};

DivergenceResult detect_divergence(const Lts& tau_graph);
DivergenceResult detect_divergence(const pi::Term& p, const Budget& budget = {});
DivergenceResult detect_divergence(const hopi::Term& e, const Budget& budget = {});
DivergenceResult detect_divergence(const cc::Term& p, const Budget& budget = {},
                                   std::uint64_t fuel = 100000);

}  // namespace pcalc
