#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pcalc/name.hpp"
#include "pcalc/recfun.hpp"

/// The computation calculus: numeric outputs, divergence and function boxes.
namespace pcalc::cc {

using recfun::Natural;

// Stuck is not part of the source grammar: it marks a function box whose
// evaluation ran out of fuel.
enum class Kind { Nil, Omega, Out, FuncBox, Par, Stuck };

struct Node;
using Term = std::shared_ptr<const Node>;

struct Node {
  Kind kind = Kind::Nil;
  Name subject;                 // Out subject, FuncBox input channel
  Name target;                  // FuncBox output channel
  std::vector<Natural> values;  // Out
  std::string fun_name;         // FuncBox
  recfun::Fun fun;              // FuncBox
  std::vector<Term> parts;      // Par
};

Term nil();
Term omega();
Term stuck();
Term out(Name subject, std::vector<Natural> values);
Term func_box(Name in, Name out, std::string fun_name, recfun::Fun fun);
Term par(Term left, Term right);
Term par(std::vector<Term> parts);

/// Checks the function box arities; names are all constants by construction.
void check_well_formed(const Term& t);

NameSet free_names(const Term& t);

/// Multiset normal form: Nil dropped, Omega collapsed to one copy, atoms
/// sorted by printed form.
Term normalize(const Term& t);

/// Exact decision procedure for the structural congruence of the calculus.
bool c_congruent(const Term& a, const Term& b);
bool struct_congruent(const Term& a, const Term& b);

std::string show(const Term& t);
std::string key(const Term& t);

}  // namespace pcalc::cc
