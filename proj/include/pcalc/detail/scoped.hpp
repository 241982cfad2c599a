#pragma once

#include <map>
#include <optional>
#include <utility>

namespace pcalc::detail {

// Binds key to value in a map for the lifetime of the guard, then restores
// whatever was there before. Cheaper than copying an environment per binder.
template <class K, class V>
class Scoped {
 public:
  Scoped(std::map<K, V>& m, const K& k, V v) : m_(m), k_(k) {
    auto it = m_.find(k_);
    if (it != m_.end()) {
      old_ = std::move(it->second);
      it->second = std::move(v);
    } else {
      m_.emplace(k_, std::move(v));
    }
  }
  Scoped(const Scoped&) = delete;
  Scoped& operator=(const Scoped&) = delete;
  Scoped(Scoped&& o) noexcept : m_(o.m_), k_(std::move(o.k_)), old_(std::move(o.old_)), live_(o.live_) {
    o.live_ = false;
  }
  ~Scoped() {
    if (!live_) return;
    if (old_) m_[k_] = std::move(*old_);
    else m_.erase(k_);
  }

 private:
  std::map<K, V>& m_;
  K k_;
  std::optional<V> old_;
  bool live_ = true;
};

}  // namespace pcalc::detail
