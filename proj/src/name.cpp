#include "pcalc/name.hpp"

#include <atomic>

namespace pcalc {

namespace {
std::atomic<std::uint64_t> g_fresh_counter{0};
}  // namespace

std::string stem_of(std::string_view id) {
  if (id.empty() || id.front() != '#') return std::string(id);
  id.remove_prefix(1);
  auto cut = id.find_last_of("_.:");
  if (cut != std::string_view::npos) id = id.substr(0, cut);
  return std::string(id);
}

bool is_auxiliary(const Name& n) {
  return n.is_generated() && n.id.size() > 1 && n.id[1] == kAuxMarker;
}

Name without_aux_marker(const Name& n) {
  if (!is_auxiliary(n)) return n;
  return Name{n.sort, "#" + n.id.substr(2)};
}

std::string canonical_stem(const Name& n) {
  if (n.is_variable()) return "x";
  return is_auxiliary(n) ? stem_of(n.id) : "c";
}

std::string fresh_id(std::string_view stem) {
  auto k = g_fresh_counter.fetch_add(1, std::memory_order_relaxed);
  std::string out = "#";
  out += stem_of(stem);
  out += '_';
  out += std::to_string(k);
  return out;
}

Name fresh_constant(std::string_view stem) { return Name::constant(fresh_id(stem)); }
Name fresh_variable(std::string_view stem) { return Name::variable(fresh_id(stem)); }

void reset_fresh_counter() { g_fresh_counter.store(0); }

}  // namespace pcalc
