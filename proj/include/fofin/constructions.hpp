#pragma once

// Definability constructions: powers of two and MSB0 from a fast-growing F, the AND witness
// for independence, and the count -> sum -> BIT chain.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "fofin/error.hpp"
#include "fofin/evaluator.hpp"
#include "fofin/expr.hpp"
#include "fofin/formula.hpp"
#include "fofin/parser.hpp"
#include "fofin/predicates.hpp"
#include "fofin/word.hpp"

namespace fofin {

// ---------------------------------------------------------------------------------------------
// Evaluation over the naturals.
//
// Letter-free formulas over unvaried predicates whose values leave any reasonable universe
// (f(512) = 2^81). Every quantifier needs a guard: an order bound or a relation atom that pins
// the variable down once the other arguments are known. Under a universe bound the same
// evaluator gives the clipped semantics.

using nat = unsigned __int128;

inline std::string nat_text(nat v) {
  if (v == 0) return "0";
  std::string s;
  while (v) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

struct NatRelation {
  int arity = 0;
  std::function<bool(const std::vector<nat>&)> contains;
  // candidates for argument `idx` given the others (nullopt entries are unknown); nullopt if
  // this atom does not determine a finite set
  std::function<std::optional<std::vector<nat>>(const std::vector<std::optional<nat>>&, int idx)> solve;
};

inline NatRelation nat_plus() {
  NatRelation r;
  r.arity = 3;
  r.contains = [](const std::vector<nat>& t) { return t[0] + t[1] == t[2]; };
  r.solve = [](const std::vector<std::optional<nat>>& a, int idx) -> std::optional<std::vector<nat>> {
    int known = 0;
    for (int i = 0; i < 3; ++i)
      if (i != idx && a[static_cast<std::size_t>(i)]) ++known;
    if (known < 2) {
      // the sum alone bounds both summands
      if (idx != 2 && a[2]) {
        std::vector<nat> out;
        if (*a[2] > 1'000'000) return std::nullopt;
        for (nat v = 0; v <= *a[2]; ++v) out.push_back(v);
        return out;
      }
      return std::nullopt;
    }
    if (idx == 2) return std::vector<nat>{*a[0] + *a[1]};
    nat s = *a[2], o = *a[idx == 0 ? 1 : 0];
    if (o > s) return std::vector<nat>{};
    return std::vector<nat>{s - o};
  };
  return r;
}

// graph of a nondecreasing function; preimages are found by a forward scan that stops once
// g(x) passes the value
inline NatRelation nat_function_graph(std::function<nat(nat)> g) {
  NatRelation r;
  r.arity = 2;
  r.contains = [g](const std::vector<nat>& t) { return g(t[0]) == t[1]; };
  r.solve = [g](const std::vector<std::optional<nat>>& a, int idx) -> std::optional<std::vector<nat>> {
    if (idx == 1) {
      if (!a[0]) return std::nullopt;
      return std::vector<nat>{g(*a[0])};
    }
    if (!a[1]) return std::nullopt;
    std::vector<nat> out;
    for (nat x = 0;; ++x) {
      nat y = g(x);
      if (y == *a[1]) out.push_back(x);
      if (y > *a[1]) break;
      if (x > (1u << 22)) throw EvalError("function graph: preimage scan too long");
    }
    return out;
  };
  return r;
}

class NatEvaluator {
 public:
  explicit NatEvaluator(std::map<std::string, NatRelation> rels, std::optional<nat> universe = std::nullopt)
      : rels_(std::move(rels)), universe_(universe) {}

  bool eval(const Formula& f, const std::map<std::string, nat>& env) {
    Env e(env.begin(), env.end());
    return ev(f, e);
  }

  std::uint64_t steps() const { return steps_; }

 private:
  using Env = std::vector<std::pair<std::string, nat>>;

  std::map<std::string, NatRelation> rels_;
  std::optional<nat> universe_;
  std::uint64_t steps_ = 0;
  std::unordered_map<const FormulaNode*, std::vector<std::string>> free_;
  std::map<std::pair<const FormulaNode*, std::vector<nat>>, bool> memo_;

  static std::optional<nat> lookup(const Env& e, const std::string& v) {
    for (auto it = e.rbegin(); it != e.rend(); ++it)
      if (it->first == v) return it->second;
    return std::nullopt;
  }
  static nat get(const Env& e, const std::string& v) {
    if (auto x = lookup(e, v)) return *x;
    throw EvalError("unbound variable '" + v + "'");
  }

  const NatRelation& rel(const std::string& name) const {
    auto it = rels_.find(name);
    if (it == rels_.end()) throw EvalError("unknown predicate " + name);
    return it->second;
  }

  bool ev(const Formula& f, Env& e) {
    return f.visit(overloaded{
        [&](const TrueConst&) { return true; },
        [&](const FalseConst&) { return false; },
        [&](const LetterAtom&) -> bool { throw EvalError("letters have no meaning over the naturals"); },
        [&](const OrderAtom& a) {
          nat l = get(e, a.left), r = get(e, a.right);
          switch (a.op) {
            case OrderOp::Lt: return l < r;
            case OrderOp::Le: return l <= r;
            case OrderOp::Eq: return l == r;
          }
          return false;
        },
        [&](const PredAtom& a) {
          const auto& r = rel(a.name);
          if (static_cast<int>(a.args.size()) != r.arity) throw EvalError(a.name + ": wrong arity");
          std::vector<nat> t;
          for (auto& v : a.args) t.push_back(get(e, v));
          return r.contains(t);
        },
        [&](const Not& n) { return !ev(n.child, e); },
        [&](const And& n) {
          for (auto& c : n.children)
            if (!ev(c, e)) return false;
          return true;
        },
        [&](const Or& n) {
          for (auto& c : n.children)
            if (ev(c, e)) return true;
          return false;
        },
        [&](const Implies& n) { return !ev(n.lhs, e) || ev(n.rhs, e); },
        [&](const Quantified& q) { return ev_quant(f, q, e); },
    });
  }

  static void flatten_and(const Formula& f, std::vector<Formula>& out) {
    if (auto a = f.as<And>()) {
      for (auto& c : a->children) flatten_and(c, out);
    } else {
      out.push_back(f);
    }
  }

  // conjuncts every satisfying (exists) or relevant (forall) value must make true
  static std::vector<Formula> guards(const Quantified& q) {
    std::vector<Formula> g;
    if (q.q == Quantifier::Exists) {
      flatten_and(q.body, g);
    } else if (auto imp = q.body.as<Implies>()) {
      flatten_and(imp->lhs, g);
    } else if (auto o = q.body.as<Or>()) {
      for (auto& c : o->children)
        if (auto n = c.as<Not>()) flatten_and(n->child, g);
    }
    return g;
  }

  std::vector<nat> candidates(const Quantified& q, const Env& e) {
    const std::string& y = q.var;
    nat lo = 0;
    std::optional<nat> hi;
    if (universe_) hi = *universe_ - 1;
    std::optional<std::vector<nat>> best;
    auto value = [&](const std::string& v) -> std::optional<nat> { return v == y ? std::nullopt : lookup(e, v); };
    auto tighten_hi = [&](nat h) { hi = hi ? std::min(*hi, h) : h; };
    bool empty = false;
    for (auto& g : guards(q)) {
      if (auto a = g.as<OrderAtom>()) {
        if (a->left == y && a->right != y) {
          auto r = value(a->right);
          if (!r) continue;
          if (a->op == OrderOp::Lt) {
            if (*r == 0)
              empty = true;
            else
              tighten_hi(*r - 1);
          } else {
            tighten_hi(*r);
            if (a->op == OrderOp::Eq) lo = std::max(lo, *r);
          }
        } else if (a->right == y && a->left != y) {
          auto l = value(a->left);
          if (!l) continue;
          lo = std::max(lo, a->op == OrderOp::Lt ? *l + 1 : *l);
          if (a->op == OrderOp::Eq) tighten_hi(*l);
        }
      } else if (auto p = g.as<PredAtom>()) {
        const auto& r = rel(p->name);
        int idx = -1;
        std::vector<std::optional<nat>> args;
        bool ok = true;
        for (std::size_t i = 0; i < p->args.size(); ++i) {
          if (p->args[i] == y) {
            if (idx >= 0) ok = false;  // y twice: let another guard decide
            idx = static_cast<int>(i);
            args.push_back(std::nullopt);
          } else {
            args.push_back(value(p->args[i]));
          }
        }
        if (!ok || idx < 0 || !r.solve) continue;
        auto c = r.solve(args, idx);
        if (c && (!best || c->size() < best->size())) best = std::move(c);
      }
    }
    std::vector<nat> out;
    if (empty) return out;
    if (best) {
      for (nat v : *best)
        if (v >= lo && (!hi || v <= *hi)) out.push_back(v);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    }
    if (!hi) throw EvalError("quantifier over '" + y + "' has no guard bounding it");
    for (nat v = lo; v <= *hi; ++v) out.push_back(v);
    return out;
  }

  bool ev_quant(const Formula& f, const Quantified& q, Env& e) {
    const FormulaNode* key = &f.node();
    auto fit = free_.find(key);
    if (fit == free_.end()) {
      auto fv = free_variables(f);
      fit = free_.emplace(key, std::vector<std::string>(fv.begin(), fv.end())).first;
    }
    std::vector<nat> vals;
    for (auto& v : fit->second) vals.push_back(get(e, v));
    auto mk = std::pair{key, std::move(vals)};
    if (auto m = memo_.find(mk); m != memo_.end()) return m->second;

    bool want = q.q == Quantifier::Exists;
    bool result = !want;
    for (nat v : candidates(q, e)) {
      ++steps_;
      e.emplace_back(q.var, v);
      bool b = ev(q.body, e);
      e.pop_back();
      if (b == want) {
        result = want;
        break;
      }
    }
    memo_.emplace(std::move(mk), result);
    return result;
  }
};

// ---------------------------------------------------------------------------------------------
// powers of two and MSB0 from F(n) = 2^(floor(log n)^2), F(0) = 0

inline nat f_square_log(nat n) {
  if (n == 0) return 0;
  int l = 0;
  while ((n >> (l + 1)) != 0) ++l;
  int e = l * l;
  if (e >= 127) throw EvalError("f(" + nat_text(n) + ") does not fit 128 bits");
  return nat{1} << e;
}

struct MsbViaF {
  Formula q;     // free n
  Formula msb0;  // free n, m
};

inline MsbViaF build_msbz_via_F() {
  // n is a power of two iff its predecessor has a different F value
  const char* q =
      "exists m. (m < n & !(exists t. (m < t & t < n)) & !(exists s. (F(m, s) & F(n, s))))";
  // p = greatest power of two <= n, and m + p = n
  std::string qp = "exists m. (m < p & !(exists t. (m < t & t < p)) & !(exists s. (F(m, s) & F(p, s))))";
  std::string qq = "exists m. (m < r & !(exists t. (m < t & t < r)) & !(exists s. (F(m, s) & F(r, s))))";
  std::string msb = "exists p. (PLUS(m, p, n) & p <= n & (" + qp + ") & !(exists r. (p < r & r <= n & (" + qq + "))))";
  return {parse_formula(q), parse_formula(msb)};
}

inline std::map<std::string, NatRelation> msb_relations() {
  return {{"F", nat_function_graph(f_square_log)}, {"PLUS", nat_plus()}};
}

struct RangeCheck {
  std::string name;
  std::int64_t lo = 0, hi = 0;
  std::uint64_t checks = 0;
  std::uint64_t passed = 0;
  std::vector<std::string> mismatches;  // first few
  bool ok() const { return checks == passed; }
  void record(bool good, const std::string& what) {
    ++checks;
    if (good)
      ++passed;
    else if (mismatches.size() < 8)
      mismatches.push_back(what);
  }
};

// Q against pow2 and MSB0 against msb0 for n in [lo, hi] (and every m in [0, hi] for MSB0).
// With a universe, quantifiers are clipped to it, which is where the construction breaks down:
// F(n) leaves a universe of size 513 from n = 16 on.
inline std::pair<RangeCheck, RangeCheck> check_msb_via_F(std::int64_t lo, std::int64_t hi,
                                                         std::optional<std::int64_t> universe = std::nullopt) {
  auto phi = build_msbz_via_F();
  std::optional<nat> uni;
  if (universe) uni = static_cast<nat>(*universe);
  NatEvaluator ev(msb_relations(), uni);
  auto pow2 = builtin_predicate("pow2"), msb0 = builtin_predicate("msb0");
  RangeCheck rq{"Q = pow2", lo, hi}, rm{"MSB0 = msb0", lo, hi};
  for (std::int64_t n = lo; n <= hi; ++n) {
    bool want = pred_contains(pow2, Tuple{n});
    bool got = ev.eval(phi.q, {{"n", static_cast<nat>(n)}});
    rq.record(want == got, "n=" + std::to_string(n));
    for (std::int64_t m = 0; m <= hi; ++m) {
      bool w = pred_contains(msb0, Tuple{n, m});
      bool g = ev.eval(phi.msb0, {{"n", static_cast<nat>(n)}, {"m", static_cast<nat>(m)}});
      rm.record(w == g, "(" + std::to_string(n) + "," + std::to_string(m) + ")");
    }
  }
  return {rq, rm};
}

// ---------------------------------------------------------------------------------------------
// independence witness

// x, y >= 1 with the same most significant bit and x & y = x. Only the dyadic block of n is
// ever related to n, which gives finite degree.
class AndMsbRelation : public Relation {
 public:
  explicit AndMsbRelation(bool guarded = true) : guarded_(guarded) {}

  int arity() const override { return 2; }
  std::string describe() const override { return guarded_ ? "AND within one dyadic block" : "AND (unguarded)"; }

  bool contains(std::span<const std::int64_t> t) const override {
    if (guarded_ && (t[0] < 1 || t[1] < 1 || floor_log2(t[0]) != floor_log2(t[1]))) return false;
    return (t[0] & t[1]) == t[0];
  }

  std::vector<Tuple> tuples_containing(std::int64_t n) const override {
    std::set<Tuple> out;
    if (n < 1) return {};
    std::int64_t lo = msb_value(n), hi = 2 * lo - 1;
    for (std::int64_t y = lo; y <= hi; ++y) {
      if ((n & y) == n) out.insert({n, y});
      if ((y & n) == y) out.insert({y, n});
    }
    return {out.begin(), out.end()};
  }

  std::int64_t window(std::int64_t n) const override { return n < 1 ? 0 : 2 * msb_value(n) - 1; }

 private:
  bool guarded_;
};

inline PredicateDef and_msb_predicate() {
  return derived_predicate("AND_MSB", std::make_shared<AndMsbRelation>(true), true, "x & y = x, same msb");
}

// Drops the same-MSB guard but keeps claiming finite degree; the degree scan must catch it.
inline PredicateDef corrupted_and_predicate() {
  return derived_predicate("AND_ANY", std::make_shared<AndMsbRelation>(false), true, "x & y = x (no msb guard)");
}

struct IndependenceWitness {
  int n = 0;
  std::vector<std::int64_t> a;  // a_i = 2^n + 2^i
  PredicateDef predicate;
  std::int64_t b(std::uint64_t mask) const {
    std::int64_t v = std::int64_t{1} << n;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1) v += std::int64_t{1} << i;
    return v;
  }
};

inline IndependenceWitness independence_witness(int n, PredicateDef p = and_msb_predicate()) {
  if (n < 1 || n > 16) throw ConstructionError("independence witness: n must be in 1..16, got " + std::to_string(n));
  IndependenceWitness w;
  w.n = n;
  for (int i = 0; i < n; ++i) w.a.push_back((std::int64_t{1} << n) + (std::int64_t{1} << i));
  w.predicate = std::move(p);
  return w;
}

struct IndependenceReport {
  int n = 0;
  std::uint64_t subsets = 0;
  std::uint64_t subsets_ok = 0;
  bool ok() const { return subsets == subsets_ok; }
};

// membership is evaluated on raw values: a quantifier-free atom over unvaried predicates
inline IndependenceReport check_independence(int n, PredicateDef p = and_msb_predicate()) {
  if (n > 12) throw ConstructionError("check_independence: n <= 12");
  auto w = independence_witness(n, std::move(p));
  IndependenceReport r;
  r.n = n;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::int64_t bm = w.b(mask);
    bool all = true;
    for (int i = 0; i < n; ++i) {
      bool in = mask >> i & 1;
      if (w.predicate.rel->contains(Tuple{w.a[static_cast<std::size_t>(i)], bm}) != in) all = false;
    }
    ++r.subsets;
    if (all) ++r.subsets_ok;
  }
  return r;
}

// ---------------------------------------------------------------------------------------------
// counting and summing over the letters z (zero) and o (one)

struct CountFormula {
  Formula formula;  // free variable "c"
  std::function<std::int64_t(std::int64_t)> f;
  std::string description;
};

namespace detail {

inline std::string ix(const char* base, int i) { return base + std::to_string(i); }

// exactly j positions satisfy `holds` (given as a builder on a variable), with the witnesses
// named base1..basej; quantifier depth j + 1
inline Formula exactly(int j, const char* base, const std::function<Formula(const std::string&)>& holds) {
  std::vector<Formula> body;
  for (int i = 1; i < j; ++i) body.push_back(order(OrderOp::Lt, ix(base, i), ix(base, i + 1)));
  for (int i = 1; i <= j; ++i) body.push_back(holds(ix(base, i)));
  std::vector<Formula> listed;
  for (int i = 1; i <= j; ++i) listed.push_back(order(OrderOp::Eq, "y", ix(base, i)));
  body.push_back(forall("y", implies(holds("y"), listed.empty() ? falsity() : disj(listed))));
  Formula out = body.size() == 1 ? body[0] : conj(body);
  for (int i = j; i >= 1; --i) out = exists(ix(base, i), out);
  return out;
}

}  // namespace detail

// c <= kmax and c = number of o's, using order only. c = j is "exactly j positions below c".
inline CountFormula count_up_to_const(int kmax) {
  if (kmax < 0 || kmax > 4) throw ConstructionError("count_up_to_const: kmax must be in 0..4");
  std::vector<Formula> cases;
  for (int j = 0; j <= kmax; ++j) {
    auto below_c = [](const std::string& v) { return order(OrderOp::Lt, v, "c"); };
    auto is_o = [](const std::string& v) { return letter('o', v); };
    cases.push_back(conj({detail::exactly(j, "x", below_c), detail::exactly(j, "x", is_o)}));
  }
  CountFormula cf;
  cf.formula = cases.size() == 1 ? cases[0] : disj(cases);
  cf.f = [kmax](std::int64_t) { return static_cast<std::int64_t>(kmax); };
  cf.description = "count up to " + std::to_string(kmax);
  return cf;
}

namespace detail {

// o(p) -> one(p), z(p) -> not one(p); every other letter is an error
inline Formula replace_letters(const Formula& f, const std::function<Formula(const std::string&)>& one) {
  if (auto a = f.as<LetterAtom>()) {
    if (a->letter == 'o') return one(a->var);
    if (a->letter == 'z') return negate(one(a->var));
    throw ConstructionError(std::string("count formula uses letter '") + a->letter + "'; only z and o are allowed");
  }
  return map_children(f, [&](const Formula& c) { return replace_letters(c, one); });
}

// every quantifier restricted to positions <= bound
inline Formula relativize(const Formula& f, const std::string& bound) {
  if (auto q = f.as<Quantified>()) {
    Formula g = order(OrderOp::Le, q->var, bound);
    Formula b = relativize(q->body, bound);
    return q->q == Quantifier::Exists ? exists(q->var, conj({g, b})) : forall(q->var, implies(g, b));
  }
  return map_children(f, [&](const Formula& c) { return relativize(c, bound); });
}

inline void check_count_formula(const CountFormula& cf) {
  auto fv = free_variables(cf.formula);
  if (fv != std::set<std::string>{"c"}) throw ConstructionError("count formula must have exactly the free variable c");
  auto all = all_variables(cf.formula);
  for (const char* v : {"a", "b", "n", "d", "cp"})
    if (all.count(v)) throw ConstructionError(std::string("count formula uses reserved variable ") + v);
}

}  // namespace detail

// phi'(a, b, c): a 1 sits at p iff b <= p < a
inline Formula count_to_interval(const CountFormula& cf) {
  detail::check_count_formula(cf);
  return detail::replace_letters(cf.formula, [](const std::string& p) {
    return conj({order(OrderOp::Le, "b", p), order(OrderOp::Lt, p, "a")});
  });
}

// phi'(n, d): the counter over positions <= n, with o exactly below d
inline Formula count_restricted(const CountFormula& cf) {
  detail::check_count_formula(cf);
  Formula g = rename_free(cf.formula, {{"c", "d"}});
  g = detail::replace_letters(g, [](const std::string& p) { return order(OrderOp::Lt, p, "d"); });
  return detail::relativize(g, "n");
}

// F(c, c') iff c' is the largest value in [0, c] for which the restricted counter holds
class CountGraphRelation : public Relation {
 public:
  explicit CountGraphRelation(const CountFormula& cf)
      : phi_(count_restricted(cf)), compiled_(std::make_shared<CompiledFormula>(phi_, PredicateRegistry{}, std::vector<std::string>{"n", "d"})) {}

  int arity() const override { return 2; }
  std::string describe() const override { return "largest count below c"; }

  bool contains(std::span<const std::int64_t> t) const override {
    auto v = value(t[0]);
    return v && *v == t[1];
  }

  std::optional<std::int64_t> value(std::int64_t c) const {
    if (c > 4096) throw EvalError("count graph evaluated beyond 4096");
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(c); it != cache_.end()) return it->second;
    Alphabet al("z");
    Word w(al, std::string(static_cast<std::size_t>(c + 1), 'z'));  // letters are gone; only the size matters
    std::optional<std::int64_t> best;
    for (std::int64_t d = 0; d <= c; ++d) {
      std::int64_t vals[2] = {c, d};
      if (compiled_->eval(w, std::span<const std::int64_t>(vals, 2))) best = d;
    }
    cache_[c] = best;
    return best;
  }

 private:
  Formula phi_;
  std::shared_ptr<CompiledFormula> compiled_;
  mutable std::mutex mu_;
  mutable std::map<std::int64_t, std::optional<std::int64_t>> cache_;
};

inline PredicateDef graph_from_count(const CountFormula& cf) {
  return derived_predicate("F", std::make_shared<CountGraphRelation>(cf), false, "graph of " + cf.description);
}

struct SumFromCount {
  Formula interval;  // phi'(a, b, c)
  PredicateDef F;
  Formula psi;  // psi(a, b, c)
  PredicateRegistry registry;
};

inline SumFromCount sum_from_count(const CountFormula& cf) {
  SumFromCount s;
  s.interval = count_to_interval(cf);
  s.F = graph_from_count(cf);
  s.psi = exists("cp", conj({pred("F", {"c", "cp"}), pred("PLUS", {"b", "cp", "a"})}));
  s.registry.add(builtin_predicate("plus"));
  s.registry.add(s.F);
  return s;
}

// ---------------------------------------------------------------------------------------------
// BIT' = {(x, y) : (x, y - f(x)) in BIT}

class BitShiftRelation : public Relation {
 public:
  BitShiftRelation(std::function<std::int64_t(std::int64_t)> f, std::string text) : f_(std::move(f)), text_(std::move(text)) {}

  int arity() const override { return 2; }
  std::string describe() const override { return "BIT shifted by " + text_; }

  bool contains(std::span<const std::int64_t> t) const override {
    std::int64_t s = f_(t[0]);
    if (s >= kInf || t[1] < s) return false;
    std::int64_t bit = t[1] - s;
    return bit < 63 && (t[0] >> bit & 1);
  }

  // (n, y): bit 0 of n sits at y = f(n), so y ranges over [f(n), f(n) + bitlen(n)).
  // (x, n): x with f(x) <= n; finite because f is unbounded.
  std::vector<Tuple> tuples_containing(std::int64_t n) const override {
    std::set<Tuple> out;
    std::int64_t s = f_(n);
    if (s < kInf)
      for (int i = 0; i < bit_length(n); ++i)
        if (n >> i & 1) out.insert({n, s + i});
    for (std::int64_t x = 0; x <= last_x(n); ++x) {
      Tuple t{x, n};
      if (contains(t)) out.insert(t);
    }
    return {out.begin(), out.end()};
  }

  std::int64_t window(std::int64_t n) const override {
    std::int64_t s = f_(n);
    std::int64_t w = std::max(n, last_x(n));
    if (s < kInf) w = std::max(w, s + bit_length(n));
    return w;
  }

 private:
  std::function<std::int64_t(std::int64_t)> f_;
  std::string text_;

  std::int64_t last_x(std::int64_t n) const {
    std::int64_t x = -1;
    while (f_(x + 1) <= n) {
      if (++x > 1'000'000) throw PredicateError(describe() + ": f stays below " + std::to_string(n) + " too long");
    }
    return x;
  }
};

inline PredicateDef bit_translate(const std::string& expr) {
  Expr e = Expr::parse(expr);
  std::int64_t prev = e(0);
  if (prev < 0) throw ConstructionError("bit_translate: f(0) is negative");
  for (std::int64_t x = 1; x <= (1 << 16); ++x) {
    std::int64_t v = e(x);
    if (v < prev) throw ConstructionError("bit_translate: f decreases at x=" + std::to_string(x));
    prev = v;
  }
  if (!(e(std::int64_t{1} << 16) > e(0))) throw ConstructionError("bit_translate: f looks bounded");
  return derived_predicate("BITP", std::make_shared<BitShiftRelation>([e](std::int64_t x) { return e(x); }, expr), true,
                           "BIT shifted by " + expr);
}

// BIT(x, y) iff exists z. z = y + f(x) and BIT'(x, z), with PLUS standing in for the sum formula
inline RangeCheck check_bit_recovery(const std::string& expr, std::int64_t upto) {
  PredicateRegistry reg;
  reg.add(builtin_predicate("plus"));
  reg.add(builtin_predicate("bit"));
  reg.add(bit_translate(expr));
  reg.add(function_graph_predicate("FX", expr, false));
  Formula phi = parse_formula("exists s. (FX(x, s) & (exists z. (PLUS(y, s, z) & BITP(x, z))))");
  CompiledFormula cf(phi, reg, {"x", "y"});
  Expr e = Expr::parse(expr);
  std::int64_t len = upto + 1 + std::max<std::int64_t>(e(upto), upto) + 1;
  Word w(Alphabet("z"), std::string(static_cast<std::size_t>(len), 'z'));
  RangeCheck r{"BIT via BIT'", 0, upto};
  const auto& bit = reg.at("BIT");
  for (std::int64_t x = 0; x <= upto; ++x)
    for (std::int64_t y = 0; y <= upto; ++y) {
      std::int64_t vals[2] = {x, y};
      bool got = cf.eval(w, std::span<const std::int64_t>(vals, 2));
      r.record(got == pred_contains(bit, Tuple{x, y}), "(" + std::to_string(x) + "," + std::to_string(y) + ")");
    }
  return r;
}

}  // namespace fofin
