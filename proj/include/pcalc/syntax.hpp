#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pcalc/c_term.hpp"
#include "pcalc/hopi_term.hpp"
#include "pcalc/pi_term.hpp"
#include "pcalc/recfun.hpp"

/// ASCII surface syntax. The grammar is documented in docs/grammar.md.
namespace pcalc::syntax {

class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, std::vector<std::string> expected, std::string found);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  int line_;
  int column_;
  std::vector<std::string> expected_;
};

enum class Calculus { Pi, Hopi, C, RecFun };

/// From a file extension: .pi, .hopi, .cc, .rf. Throws Error otherwise.
Calculus calculus_from_path(std::string_view path);
std::string_view calculus_name(Calculus c);

using FunEnv = std::map<std::string, recfun::Fun>;

pi::Term parse_pi(std::string_view src);
hopi::Term parse_hopi(std::string_view src);

/// Function boxes refer to functions by name (looked up in env) or spell
/// out a function expression inline.
cc::Term parse_c(std::string_view src, const FunEnv& env = recfun::standard_library());

/// A sequence of `name = expr` definitions; later ones may use earlier ones.
/// Returns env extended with the new definitions.
FunEnv parse_rf(std::string_view src, const FunEnv& env = recfun::standard_library());
recfun::Fun parse_rf_expr(std::string_view src, const FunEnv& env = recfun::standard_library());

/// Printers. Generated names are replaced by readable identifiers that do
/// not clash with the names already present, so the output re-parses.
std::string print(const pi::Term& t);
std::string print(const hopi::Term& t);
std::string print(const cc::Term& t);
std::string print(const recfun::Fun& f);

/// Replaces generated names (and bound variables whose identifier clashes
/// with a constant) by readable identifiers.
pi::Term readable(const pi::Term& t);
hopi::Term readable(const hopi::Term& t);

}  // namespace pcalc::syntax
