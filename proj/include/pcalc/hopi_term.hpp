#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pcalc/name.hpp"

/// Higher-order pi-calculus with name parameterization.
namespace pcalc::hopi {

// Rep is the lazily unfolded replication used where the constructions need
// `!P`; expand_replication() turns it into the derived form built from
// process passing.
enum class Kind { Nil, Var, In, Out, Par, Res, Abs, App, Rep };

struct Node;
using Term = std::shared_ptr<const Node>;

struct Node {
  Kind kind = Kind::Nil;
  Name subject;             // In, Out; restricted constant for Res
  std::string var;          // Var id, In binder
  Term payload;             // Out payload, App function
  Term body;                // continuation / scope / abstraction body
  std::vector<Term> parts;  // Par
  std::vector<Name> names;  // Abs parameters, App arguments
};

Term nil();
Term var(std::string id);
Term input(Name subject, std::string binder, Term body);
Term output(Name subject, Term payload, Term body);
Term par(Term left, Term right);
Term par(std::vector<Term> parts);
Term restrict(Name constant, Term body);
Term restrict_all(const std::vector<Name>& constants, Term body);
Term abstraction(std::vector<Name> params, Term body);
Term application(Term fun, std::vector<Name> args);
Term replicate(Term body);

struct FreeNames {
  NameSet constants;
  NameSet variables;
  std::set<std::string> process_vars;
};

FreeNames free_names(const Term& t);
NameSet free_constants(const Term& t);
bool is_closed(const Term& t);
NameSet all_names(const Term& t);

struct Substitution {
  std::map<Name, Name> names;
  std::map<std::string, Term> processes;
};

/// Simultaneous capture-avoiding substitution. Throws ArityError when a
/// process image lands under an application of the wrong arity.
Term substitute(const Term& t, const Substitution& s);
Term rename(const Term& t, const std::map<Name, Name>& names);

/// (<x~>E)<m~> = E{m~/x~}. Throws ArityError or NotAnAbstraction.
Term apply_abstraction(const Term& fun, const std::vector<Name>& args);

/// Number of parameters of an outermost abstraction, 0 otherwise.
std::size_t parameter_count(const Term& t);

/// Gives every binder a distinct freshly generated name.
Term freshen(const Term& t);

Term normalize(const Term& t);
Term alpha_canonical(const Term& t);
bool alpha_equal(const Term& a, const Term& b);

/// Drops the auxiliary marker from every name (see pi::forget_auxiliary).
Term forget_auxiliary(const Term& t);
bool struct_congruent(const Term& a, const Term& b);

/// Rewrites every Rep node into (c)(Q | c!Q.0) with Q = c(X).(X | P | c!X.0).
Term expand_replication(const Term& t);

std::string show(const Term& t);
std::string key(const Term& t);
std::size_t size(const Term& t);

}  // namespace pcalc::hopi
