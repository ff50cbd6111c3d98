#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace fofin {

// mt19937_64 with our own range reduction, so sequences do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // Uniform in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do v = gen_();
    while (v >= limit);
    return v % n;
  }

  // Uniform in [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool coin() { return (gen_() >> 63) != 0; }

  template <class C>
  const auto& pick(const C& c) {
    return c[static_cast<std::size_t>(below(c.size()))];
  }

  std::string word(const std::string& letters, std::size_t len) {
    std::string s(len, ' ');
    for (auto& ch : s) ch = letters[static_cast<std::size_t>(below(letters.size()))];
    return s;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace fofin
