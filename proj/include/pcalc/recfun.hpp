#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pcalc/name.hpp"

/// mu-recursive function expressions and a fuelled evaluator.
namespace pcalc::recfun {

using Natural = boost::multiprecision::cpp_int;

enum class Kind { Zero, Succ, Proj, Comp, PrimRec, Mu };

struct Node;
using Fun = std::shared_ptr<const Node>;

struct Node {
  Kind kind = Kind::Zero;
  int arity = 0;   // Zero(n), Proj(i, n)
  int index = 0;   // Proj(i, n), 1-based
  Fun outer;       // Comp outer, PrimRec base, Mu body
  Fun step;        // PrimRec step
  std::vector<Fun> inners;  // Comp
  std::string label;        // library name, when the node came from one
};

Fun zero(int n);
Fun succ();
Fun proj(int i, int n);
Fun comp(Fun outer, std::vector<Fun> inners);
Fun primrec(Fun base, Fun step);
Fun mu(Fun body);
Fun labelled(Fun f, std::string label);

/// Arity of f, or ArityError naming the offending node.
int arity_check(const Fun& f);

struct EvalResult {
  enum class Status { Defined, Undefined, OutOfFuel };
  Status status = Status::OutOfFuel;
  Natural value = 0;
  std::uint64_t steps = 0;

  bool defined() const { return status == Status::Defined; }
};

/// Standard semantics with a budget of elementary steps (one per
/// constructor unfolding). Non-terminating searches surface as OutOfFuel;
/// Undefined is never produced by evaluation alone.
EvalResult eval(const Fun& f, const std::vector<Natural>& args, std::uint64_t fuel);

/// A finite certificate that f(args) is undefined, if one is recognised:
/// a minimisation whose body is headed by the successor function can never
/// hit zero. Returns a human-readable reason.
std::optional<std::string> prove_undefined(const Fun& f, const std::vector<Natural>& args);

/// Printed in the .rf surface syntax; library references print by label.
std::string show(const Fun& f);

/// add, mult, pred, monus, even_half.
const std::map<std::string, Fun>& standard_library();

}  // namespace pcalc::recfun
