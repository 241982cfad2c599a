#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcalc/c_term.hpp"
#include "pcalc/hopi_term.hpp"
#include "pcalc/pi_term.hpp"
#include "pcalc/recfun.hpp"
#include "pcalc/semantics.hpp"

/// Translations between the calculi.
namespace pcalc::enc {

// ---------------------------------------------------------------------------
// Numerals.

/// [[0]] = <x,y> y!0.0 and [[n+1]] = <x,y> x![[n]].0
hopi::Term encode_nat(const Natural& n);

struct NatDecode {
  bool ok = false;
  Natural value = 0;
  std::string reason;  // why the term is not a numeral
};

/// Applies t to two fresh constants (s, z) and reads off the numeral from
/// the weak outputs on s and z. `budget` bounds the tau-closure explored at
/// each level.
NatDecode decode_nat(const hopi::Term& t, std::size_t budget = 2000);

/// Depth-first search along internal steps for an output on `on` whose
/// payload mentions no private name. Returns that payload.
std::optional<hopi::Term> weak_output(const hopi::Term& e, const Name& on, std::size_t budget = 20000);

// ---------------------------------------------------------------------------
// Computation calculus to higher-order pi.

/// The box F_{a1..an}^b of a recursive function, reading its arguments in
/// order from `in` and answering on `out`.
hopi::Term encode_recfun(const recfun::Fun& f, const std::vector<Name>& in, const Name& out);

/// The internal loop standing for Omega: (c)(c!0.0 | !c(X).c!0.0).
hopi::Term divergence_loop();

hopi::Term encode_c(const cc::Term& p);

/// (a1..ak)(F_{a1..ak}^b | a1![[n1]].0 | ... | ak![[nk]].0)
hopi::Term compose_application(const recfun::Fun& f, const Tuple& args, const Name& out);

// ---------------------------------------------------------------------------
// pi to higher-order pi.

/// <x1,x2,x3>(x1.u(Z).x3!Z.0 | x2.x3(Z).u!Z.0) with fresh parameters.
hopi::Term make_pipe(const Name& u);

/// Input menu offering Pipe_n for every n in `names`, every free name of the
/// state, and one canonical fresh name.
HopiMenu pipe_menu(NameSet names = {});

/// First stage: names become process variables. Returns the term together
/// with the variable chosen for every free name.
struct Stage1 {
  hopi::Term term;
  std::map<Name, std::string> free_vars;
};
Stage1 encode_pi_stage1(const pi::Term& p);

hopi::Term encode_pi(const pi::Term& p);

// ---------------------------------------------------------------------------
// higher-order pi to pi.

struct HopiToPiOptions {
  /// Parameter count assumed for a transmitted process variable whose
  /// arity cannot be read off an application in its scope. Unset means the
  /// plain trigger row (no parameters).
  std::optional<std::size_t> default_arity;
};

pi::Term encode_hopi(const hopi::Term& e, const HopiToPiOptions& opts = {});

// ---------------------------------------------------------------------------
// Encoding criteria.

enum class Encoder { PiToHopi, CToHopi, HopiToPi };

std::string encoder_name(Encoder e);
/// "pi-hopi", "c-hopi", "hopi-pi"; also accepts the calculus pair spelled
/// with a '>' in between.
std::optional<Encoder> parse_encoder(const std::string& s);

struct EncodingReport {
  enum class Criterion {
    Compositionality,
    NameInvariance,
    ForthCorrespondence,
    BackCorrespondence,
    DivergenceReflection
  };
  enum class Outcome { Pass, Fail, Inconclusive, NotClaimed };

  Criterion criterion = Criterion::Compositionality;
  Outcome outcome = Outcome::Inconclusive;
  std::string sample;                // printed source term
  std::vector<std::string> witness;  // terms or labels; set on failure
  std::string note;
};

std::string criterion_name(EncodingReport::Criterion c);
std::string outcome_name(EncodingReport::Outcome o);
std::string to_json(const std::vector<EncodingReport>& reports);

struct CriteriaOptions {
  Budget budget{400, 200};
  std::uint64_t seed = 1;  // drives the random renamings
  std::size_t renamings = 3;
  std::vector<Tuple> c_menu = {{0}, {1}, {2}};
  HopiToPiOptions hopi_to_pi;
};

/// Five reports per sample, one per criterion. Samples must belong to the
/// source calculus of the encoder.
std::vector<EncodingReport> check_criteria(Encoder e, const std::vector<AnyTerm>& samples,
                                           const CriteriaOptions& opts = {});

// ---------------------------------------------------------------------------
// Internal steps spent per pi transition by encode_pi.

struct PaddingCase {
  std::string clause;  // input, output, bound-output, tau
  std::string source_label;
  std::vector<std::string> expected;  // label shapes: "tau", "a?", "a!"
  std::vector<std::string> path;      // labels of the matching target path
  std::vector<std::string> states;    // keys along it, root first
  bool ok = false;
  std::string note;
};

struct PaddingReport {
  std::string source;
  std::vector<PaddingCase> cases;
  bool pass() const;
};

/// For every transition P -l-> P' of the source, looks for a path of the
/// encoding with exactly the padding of its clause (input: tau, a?, tau;
/// output and bound output: tau, tau, a!; internal: five taus, the fourth on
/// a source channel) that ends in the canonical state of the encoding of P'.
PaddingReport check_tau_padding(const pi::Term& p, const NameSet& universe = {});

std::string to_json(const PaddingReport& r);

}  // namespace pcalc::enc
