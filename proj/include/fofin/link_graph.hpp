#pragma once

#include <algorithm>
#include <cstdint>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <utility>

#include "fofin/error.hpp"
#include "fofin/predicates.hpp"

namespace fofin {

enum class LinkDir { L, R };

// Link graph of a finite-degree family: p and q are adjacent when some tuple spans both.
// The neighborhood of p is the union of the spans containing p, an interval [lo, hi].
class LinkContext {
 public:
  explicit LinkContext(PredicateFamily family) : family_(std::move(family)) {}

  const PredicateFamily& family() const { return family_; }

  // Smallest and greatest neighbor of p (p itself when nothing spans it).
  std::pair<std::int64_t, std::int64_t> neighborhood(std::int64_t p) const {
    if (p < 0) throw Error("link graph: negative position " + std::to_string(p));
    {
      std::lock_guard<std::mutex> g(mu_);
      auto it = memo_.find(p);
      if (it != memo_.end()) return it->second;
    }
    std::pair<std::int64_t, std::int64_t> nb{p, p};
    for (const auto& d : family_.defs) {
      if (auto ext = d.rel->spanning_extent(p)) {
        nb.first = std::min(nb.first, ext->first);
        nb.second = std::max(nb.second, ext->second);
      }
    }
    std::lock_guard<std::mutex> g(mu_);
    memo_.emplace(p, nb);
    return nb;
  }

  std::pair<std::int64_t, std::int64_t> bounds(std::int64_t p) const {
    auto [lo, hi] = neighborhood(p);
    return {lo - 1, hi >= kInf ? kInf : hi + 1};
  }

  bool adjacent(std::int64_t p, std::int64_t q) const {
    auto [lo, hi] = neighborhood(p);
    return lo <= q && q <= hi;
  }

 private:
  PredicateFamily family_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::int64_t, std::pair<std::int64_t, std::int64_t>> memo_;
};

inline std::pair<std::int64_t, std::int64_t> link_bounds(const LinkContext& ctx, std::int64_t p) { return ctx.bounds(p); }

// The scan over m in [0, p] from the definition, bypassing any relation-specific shortcut.
inline std::pair<std::int64_t, std::int64_t> link_bounds_reference(const PredicateFamily& fam, std::int64_t p) {
  std::int64_t lo = p, hi = p;
  for (const auto& d : fam.defs) {
    for (std::int64_t m = 0; m <= p; ++m) {
      for (const auto& t : d.rel->tuples_containing(m)) {
        auto [a, b] = std::minmax_element(t.begin(), t.end());
        if (*a <= p && p <= *b) {
          lo = std::min(lo, *a);
          hi = std::max(hi, *b);
        }
      }
    }
  }
  return {lo - 1, hi + 1};
}

inline std::int64_t iterate_link(const LinkContext& ctx, LinkDir dir, std::int64_t n, std::int64_t p) {
  if (n < 0) throw Error("iterate_link: negative count");
  for (std::int64_t i = 0; i < n; ++i) {
    if (p < 0) throw Error("iterate_link: L-iteration fell below 0");
    if (p >= kInf) return kInf;
    auto [l, r] = ctx.bounds(p);
    p = dir == LinkDir::L ? l : r;
  }
  return p;
}

}  // namespace fofin
