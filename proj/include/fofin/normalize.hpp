#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fofin/error.hpp"
#include "fofin/formula.hpp"
#include "fofin/printer.hpp"

namespace fofin {

inline Formula constant_fold(const Formula& f) {
  return f.visit(overloaded{
      [&](const Not& n) {
        Formula c = constant_fold(n.child);
        if (c.is<TrueConst>()) return falsity();
        if (c.is<FalseConst>()) return truth();
        return negate(c);
      },
      [&](const And& n) {
        std::vector<Formula> cs;
        for (const auto& c0 : n.children) {
          Formula c = constant_fold(c0);
          if (c.is<FalseConst>()) return falsity();
          if (!c.is<TrueConst>()) cs.push_back(c);
        }
        if (cs.empty()) return truth();
        if (cs.size() == 1) return cs.front();
        return conj(std::move(cs));
      },
      [&](const Or& n) {
        std::vector<Formula> cs;
        for (const auto& c0 : n.children) {
          Formula c = constant_fold(c0);
          if (c.is<TrueConst>()) return truth();
          if (!c.is<FalseConst>()) cs.push_back(c);
        }
        if (cs.empty()) return falsity();
        if (cs.size() == 1) return cs.front();
        return disj(std::move(cs));
      },
      [&](const Implies& n) {
        Formula l = constant_fold(n.lhs);
        Formula r = constant_fold(n.rhs);
        if (l.is<FalseConst>() || r.is<TrueConst>()) return truth();
        if (l.is<TrueConst>()) return r;
        if (r.is<FalseConst>()) return negate(l);
        return implies(l, r);
      },
      [&](const Quantified& q) {
        Formula b = constant_fold(q.body);
        // exists over false / forall over true hold on every universe, including the empty one.
        if (q.q == Quantifier::Exists && b.is<FalseConst>()) return falsity();
        if (q.q == Quantifier::Forall && b.is<TrueConst>()) return truth();
        return quantified(q.q, q.var, b);
      },
      [&](const OrderAtom& a) {
        if (a.left != a.right) return f;
        return a.op == OrderOp::Lt ? falsity() : truth();
      },
      [&](const auto&) { return f; },
  });
}

// Sorts And/Or children by printed form and drops duplicates. Equal formulas get equal output.
inline Formula canonicalize(const Formula& f) {
  auto sort_dedup = [](const std::vector<Formula>& in) {
    std::vector<std::pair<std::string, Formula>> keyed;
    keyed.reserve(in.size());
    for (const auto& c : in) {
      Formula cc = canonicalize(c);
      keyed.emplace_back(print_formula(cc), cc);
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
                keyed.end());
    std::vector<Formula> out;
    out.reserve(keyed.size());
    for (auto& [k, c] : keyed) out.push_back(c);
    return out;
  };
  return f.visit(overloaded{
      [&](const And& n) {
        auto cs = sort_dedup(n.children);
        return cs.size() == 1 ? cs.front() : conj(std::move(cs));
      },
      [&](const Or& n) {
        auto cs = sort_dedup(n.children);
        return cs.size() == 1 ? cs.front() : disj(std::move(cs));
      },
      [&](const auto&) { return map_children(f, [](const Formula& c) { return canonicalize(c); }); },
  });
}

// Negation normal form over And/Or/quantifiers; Implies is desugared here.
inline Formula to_nnf(const Formula& f, bool positive = true) {
  return f.visit(overloaded{
      [&](const TrueConst&) { return constant(positive); },
      [&](const FalseConst&) { return constant(!positive); },
      [&](const Not& n) { return to_nnf(n.child, !positive); },
      [&](const And& n) {
        std::vector<Formula> cs;
        for (const auto& c : n.children) cs.push_back(to_nnf(c, positive));
        return positive ? conj(std::move(cs)) : disj(std::move(cs));
      },
      [&](const Or& n) {
        std::vector<Formula> cs;
        for (const auto& c : n.children) cs.push_back(to_nnf(c, positive));
        return positive ? disj(std::move(cs)) : conj(std::move(cs));
      },
      [&](const Implies& n) {
        if (positive) return disj({to_nnf(n.lhs, false), to_nnf(n.rhs, true)});
        return conj({to_nnf(n.lhs, true), to_nnf(n.rhs, false)});
      },
      [&](const Quantified& q) {
        return quantified(positive ? q.q : dual(q.q), q.var, to_nnf(q.body, positive));
      },
      [&](const auto&) { return positive ? f : negate(f); },
  });
}

// Picks names not in `taken`, remembering what it hands out.
class NameSupply {
 public:
  explicit NameSupply(std::set<std::string> taken) : taken_(std::move(taken)) {}

  std::string fresh(const std::string& base) {
    if (taken_.insert(base).second) return base;
    for (int k = 1;; ++k) {
      std::string cand = base + "_" + std::to_string(k);
      if (taken_.insert(cand).second) return cand;
    }
  }

  void reserve(const std::string& name) { taken_.insert(name); }
  bool taken(const std::string& name) const { return taken_.count(name) > 0; }

 private:
  std::set<std::string> taken_;
};

// Gives every binder a distinct name that also differs from all free variables.
inline Formula rename_apart(const Formula& f) {
  NameSupply names(free_variables(f));
  auto rec = [&](auto&& self, const Formula& g, std::map<std::string, std::string>& env) -> Formula {
    auto look = [&](const std::string& v) {
      auto it = env.find(v);
      return it == env.end() ? v : it->second;
    };
    return g.visit(overloaded{
        [&](const LetterAtom& a) { return letter(a.letter, look(a.var)); },
        [&](const OrderAtom& a) { return order(a.op, look(a.left), look(a.right)); },
        [&](const PredAtom& a) {
          std::vector<std::string> args;
          for (auto& v : a.args) args.push_back(look(v));
          return pred(a.name, std::move(args));
        },
        [&](const Quantified& q) {
          std::string nv = names.fresh(q.var);
          auto saved = env.find(q.var) == env.end() ? std::optional<std::string>{} : std::optional{env[q.var]};
          env[q.var] = nv;
          Formula body = self(self, q.body, env);
          if (saved)
            env[q.var] = *saved;
          else
            env.erase(q.var);
          return quantified(q.q, nv, body);
        },
        [&](const auto&) { return map_children(g, [&](const Formula& c) { return self(self, c, env); }); },
    });
  };
  std::map<std::string, std::string> env;
  return rec(rec, f, env);
}

struct PrenexFormula {
  std::vector<std::pair<Quantifier, std::string>> prefix;
  Formula matrix;

  std::size_t k() const { return prefix.size(); }

  Formula to_formula() const {
    Formula f = matrix;
    for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) f = quantified(it->first, it->second, f);
    return f;
  }
};

namespace detail {

using Prefix = std::vector<std::pair<Quantifier, std::string>>;

inline Prefix dual_prefix(Prefix p) {
  for (auto& e : p) e.first = dual(e.first);
  return p;
}

// Concatenates prefixes. On the empty universe a prenex formula is true iff it starts with
// forall, so the block whose leading quantifier carries the connective's empty-universe value
// goes first: an exists-block under And, a forall-block under Or.
inline Prefix merge_prefixes(std::vector<Prefix> parts, Quantifier lead) {
  std::stable_partition(parts.begin(), parts.end(),
                        [&](const Prefix& p) { return !p.empty() && p.front().first == lead; });
  Prefix out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline std::pair<Prefix, Formula> pull_quantifiers(const Formula& f) {
  return f.visit(overloaded{
      [&](const Not& n) -> std::pair<Prefix, Formula> {
        auto [p, m] = pull_quantifiers(n.child);
        return {dual_prefix(std::move(p)), negate(m)};
      },
      [&](const And& n) -> std::pair<Prefix, Formula> {
        std::vector<Prefix> ps;
        std::vector<Formula> ms;
        for (const auto& c : n.children) {
          auto [p, m] = pull_quantifiers(c);
          ps.push_back(std::move(p));
          ms.push_back(m);
        }
        return {merge_prefixes(std::move(ps), Quantifier::Exists), conj(std::move(ms))};
      },
      [&](const Or& n) -> std::pair<Prefix, Formula> {
        std::vector<Prefix> ps;
        std::vector<Formula> ms;
        for (const auto& c : n.children) {
          auto [p, m] = pull_quantifiers(c);
          ps.push_back(std::move(p));
          ms.push_back(m);
        }
        return {merge_prefixes(std::move(ps), Quantifier::Forall), disj(std::move(ms))};
      },
      [&](const Implies& n) -> std::pair<Prefix, Formula> {
        auto [pl, ml] = pull_quantifiers(n.lhs);
        auto [pr, mr] = pull_quantifiers(n.rhs);
        return {merge_prefixes({dual_prefix(std::move(pl)), std::move(pr)}, Quantifier::Forall), implies(ml, mr)};
      },
      [&](const Quantified& q) -> std::pair<Prefix, Formula> {
        auto [p, m] = pull_quantifiers(q.body);
        p.insert(p.begin(), {q.q, q.var});
        return {std::move(p), m};
      },
      [&](const auto&) -> std::pair<Prefix, Formula> { return {{}, f}; },
  });
}

}  // namespace detail

inline PrenexFormula to_prenex(const Formula& f) {
  auto fv = free_variables(f);
  if (!fv.empty()) throw TransformError("to_prenex: formula is not closed (free variable '" + *fv.begin() + "')");
  auto [prefix, matrix] = detail::pull_quantifiers(rename_apart(constant_fold(f)));
  return PrenexFormula{std::move(prefix), matrix};
}

// Drops binders whose variable does not occur in the matrix. Only sound on a non-empty
// universe, where such a binder changes nothing.
inline PrenexFormula drop_vacuous_binders(PrenexFormula pf) {
  auto used = free_variables(pf.matrix);
  std::erase_if(pf.prefix, [&](const auto& e) { return !used.count(e.second); });
  return pf;
}

}  // namespace fofin
