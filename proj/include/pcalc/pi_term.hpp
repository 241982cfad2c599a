#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pcalc/name.hpp"

/// First-order pi-calculus with guarded replication.
namespace pcalc::pi {

enum class Kind { Nil, Input, Output, Restrict, Par, RepInput, RepOutput };

struct Node;
using Term = std::shared_ptr<const Node>;

struct Node {
  Kind kind = Kind::Nil;
  Name subject;  // Input/Output/Rep*
  Name object;   // binder (Input, RepInput), object (Output, RepOutput), restricted constant
  Term body;
  std::vector<Term> parts;  // Par
};

Term nil();
Term input(Name subject, Name binder, Term body);
Term output(Name subject, Name object, Term body);
Term restrict(Name constant, Term body);
Term par(Term left, Term right);
Term par(std::vector<Term> parts);
Term rep_input(Name subject, Name binder, Term body);
Term rep_output(Name subject, Name object, Term body);

struct FreeNames {
  NameSet constants;
  NameSet variables;
};

FreeNames free_names(const Term& t);
NameSet free_constants(const Term& t);
bool is_closed(const Term& t);

/// Every name mentioned (free or bound).
NameSet all_names(const Term& t);

using NameMap = std::map<Name, Name>;

/// Simultaneous capture-avoiding substitution.
Term substitute(const Term& t, const NameMap& map);

/// Canonical representative under the implemented structural congruence:
/// flattened and sorted parallel components, no Nil units, restrictions
/// scoped as tightly as possible, bound names renumbered.
Term normalize(const Term& t);

/// Gives every binder a distinct freshly generated name.
Term freshen(const Term& t);

/// Renames binders canonically without any other rewriting.
Term alpha_canonical(const Term& t);

bool alpha_equal(const Term& a, const Term& b);

/// Drops the auxiliary marker from every name, so that encoder output
/// normalizes like a hand-written term with ordinary binders.
Term forget_auxiliary(const Term& t);
bool struct_congruent(const Term& a, const Term& b);

/// Printed form with names shown verbatim (generated names included).
std::string show(const Term& t);

/// State key: show(normalize(t)).
std::string key(const Term& t);

/// Number of constructors; used by generators and budgets.
std::size_t size(const Term& t);

}  // namespace pcalc::pi
