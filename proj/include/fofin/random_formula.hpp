#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fofin/formula.hpp"
#include "fofin/random.hpp"

namespace fofin {

struct FormulaShape {
  std::string letters = "ab";
  std::vector<std::pair<std::string, int>> predicates;  // (name, arity)
  int quantifiers = 2;                                  // exact number of quantifier nodes
  int max_depth = 6;
  std::vector<std::string> free_vars;                   // variables usable without a binder
  std::vector<std::string> var_pool = {"x", "y", "z", "w"};
  bool order_atoms = true;
};

// Random formula with exactly shape.quantifiers quantifiers. Binder names come from a small
// pool, so shadowing happens on purpose.
class FormulaGenerator {
 public:
  FormulaGenerator(FormulaShape shape, std::uint64_t seed) : shape_(std::move(shape)), rng_(seed) {}

  Formula next() { return gen(shape_.free_vars, shape_.quantifiers, shape_.max_depth); }

  Rng& rng() { return rng_; }

 private:
  FormulaShape shape_;
  Rng rng_;

  Formula atom(const std::vector<std::string>& scope) {
    if (scope.empty()) return constant(rng_.coin());
    std::size_t kinds = 1 + (shape_.order_atoms ? 1 : 0) + (shape_.predicates.empty() ? 0 : 1);
    std::size_t k = rng_.below(kinds + 1);  // letters get double weight
    if (k <= 1) return letter(shape_.letters[rng_.below(shape_.letters.size())], rng_.pick(scope));
    if (k == 2 && shape_.order_atoms) {
      static const OrderOp ops[] = {OrderOp::Lt, OrderOp::Le, OrderOp::Eq};
      return order(ops[rng_.below(3)], rng_.pick(scope), rng_.pick(scope));
    }
    if (shape_.predicates.empty()) return letter(shape_.letters[0], rng_.pick(scope));
    auto& [name, arity] = rng_.pick(shape_.predicates);
    // distinct arguments when the scope allows; P(x, x) atoms are degenerate for the usual families
    std::vector<std::string> pool = scope, args;
    for (int i = 0; i < arity; ++i) {
      if (pool.empty()) pool = scope;
      std::size_t j = rng_.below(pool.size());
      args.push_back(pool[j]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return pred(name, std::move(args));
  }

  Formula gen(std::vector<std::string> scope, int q, int depth) {
    if (q == 0) {
      if (depth <= 1 || scope.empty() || rng_.below(3) == 0) return atom(scope);
      switch (rng_.below(4)) {
        case 0: return negate(gen(scope, 0, depth - 1));
        case 1: return conj(pair_or_triple(scope, 0, depth));
        case 2: return disj(pair_or_triple(scope, 0, depth));
        default: return implies(gen(scope, 0, depth - 1), gen(scope, 0, depth - 1));
      }
    }
    std::uint64_t r = rng_.below(10);
    if (depth <= 2 || r < 5) {
      std::string v = rng_.pick(shape_.var_pool);
      Quantifier qu = rng_.coin() ? Quantifier::Exists : Quantifier::Forall;
      auto inner = scope;
      if (std::find(inner.begin(), inner.end(), v) == inner.end()) inner.push_back(v);
      return quantified(qu, v, gen(inner, q - 1, depth - 1));
    }
    if (r < 6) return negate(gen(scope, q, depth - 1));
    switch (rng_.below(3)) {
      case 0: return conj(pair_or_triple(scope, q, depth));
      case 1: return disj(pair_or_triple(scope, q, depth));
      default: {
        int ql = static_cast<int>(rng_.below(static_cast<std::uint64_t>(q) + 1));
        return implies(gen(scope, ql, depth - 1), gen(scope, q - ql, depth - 1));
      }
    }
  }

  std::vector<Formula> pair_or_triple(const std::vector<std::string>& scope, int q, int depth) {
    std::size_t n = 2 + rng_.below(2);
    std::vector<int> split(n, 0);
    for (int i = 0; i < q; ++i) ++split[rng_.below(n)];
    std::vector<Formula> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(gen(scope, split[i], depth - 1));
    return out;
  }
};

}  // namespace fofin
