#pragma once

#include <compare>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pcalc {

/// Channel identifier. Constants and variables live in disjoint namespaces,
/// so equality compares the sort as well as the identifier.
struct Name {
  enum class Sort : std::uint8_t { Constant, Variable };

  Sort sort = Sort::Constant;
  std::string id;

  static Name constant(std::string id) { return {Sort::Constant, std::move(id)}; }
  static Name variable(std::string id) { return {Sort::Variable, std::move(id)}; }

  bool is_constant() const { return sort == Sort::Constant; }
  bool is_variable() const { return sort == Sort::Variable; }

  // Generated names carry the reserved '#' prefix; the parser never accepts it.
  bool is_generated() const { return !id.empty() && id.front() == '#'; }

  auto operator<=>(const Name&) const = default;
  bool operator==(const Name&) const = default;
};

using NameSet = std::set<Name>;

/// Marker used for the auxiliary channels that encodings introduce (pipe
/// signals, relay ports). Names whose stem starts with it never correspond to
/// a source-level channel.
inline constexpr char kAuxMarker = '~';

/// The readable stem of an identifier: the user name itself, or for generated
/// names the part between '#' and the numbering suffix.
std::string stem_of(std::string_view id);

/// True for generated names whose stem carries the auxiliary marker.
bool is_auxiliary(const Name& n);

/// The same name without the auxiliary marker (identity on other names).
Name without_aux_marker(const Name& n);

/// Stem used for canonically renumbered binders. Only auxiliary constants
/// keep their own stem, so canonical forms do not depend on how bound names
/// were spelled.
std::string canonical_stem(const Name& n);

/// Process-wide fresh name supply. Names look like "#stem_17"; the counter
/// never repeats within a process, so generated names cannot collide with
/// each other or with user names.
std::string fresh_id(std::string_view stem);
Name fresh_constant(std::string_view stem);
Name fresh_variable(std::string_view stem);

/// Resets the supply (the CLI does this once per invocation so that output
/// is reproducible).
void reset_fresh_counter();

/// Base of the error hierarchy shared by every module.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

class OpenTermError : public Error {
 public:
  using Error::Error;
};

class NotAnAbstraction : public Error {
 public:
  using Error::Error;
};

class UnsupportedForm : public Error {
 public:
  using Error::Error;
};

}  // namespace pcalc
