#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fofin/error.hpp"
#include "fofin/evaluator.hpp"
#include "fofin/formula.hpp"
#include "fofin/normalize.hpp"
#include "fofin/predicates.hpp"
#include "fofin/word.hpp"

namespace fofin {

// Four zones of [l] laid out as for the closest power of two 2^n >= l.
struct ZoneLayout {
  std::int64_t universe = 0;
  int n = 0;
  std::array<std::pair<std::int64_t, std::int64_t>, 4> zones{};  // half-open

  std::int64_t block() const { return std::int64_t{1} << (n - 2); }

  int zone_of(std::int64_t x) const {
    for (int i = 0; i < 4; ++i)
      if (zones[static_cast<std::size_t>(i)].first <= x && x < zones[static_cast<std::size_t>(i)].second) return i + 1;
    throw TransformError("position " + std::to_string(x) + " outside universe " + std::to_string(universe));
  }
};

inline ZoneLayout zone_layout(std::int64_t l) {
  if (l < 4) throw TransformError("zone layout needs a universe of size at least 4, got " + std::to_string(l));
  ZoneLayout z;
  z.universe = l;
  while ((std::int64_t{1} << z.n) < l) ++z.n;
  std::int64_t q = z.block();
  for (int i = 0; i < 4; ++i) {
    std::int64_t a = std::min(l, i * q), b = std::min(l, (i + 1) * q);
    z.zones[static_cast<std::size_t>(i)] = {a, b};
  }
  return z;
}

// work(x) and trans^i(x, y) over {<=, MSB0, POW2}. The helper binders p, q, z, w must differ
// from the variables the formulas are instantiated with.
struct ZoneFormulas {
  std::string x, y;
  std::string p, q, z, w;  // helper binders

  Formula work(const std::string& v) const {
    return exists(p, conj({pred("POW2", {p}), order(OrderOp::Lt, v, p),
                           forall(q, implies(conj({pred("POW2", {q}), order(OrderOp::Lt, v, q)}), order(OrderOp::Eq, q, p)))}));
  }

  Formula trans(int i, const std::string& a, const std::string& b) const {
    switch (i) {
      case 1: return conj({work(a), pred("MSB0", {a, b})});
      case 2: return conj({work(a), order(OrderOp::Eq, a, b)});
      case 3:
        return conj({work(a), exists(z, conj({pred("MSB0", {a, z}), pred("MSB0", {b, z}), order(OrderOp::Lt, a, b),
                                              forall(w, implies(conj({pred("MSB0", {w, z}), order(OrderOp::Lt, a, w)}),
                                                                order(OrderOp::Le, b, w)))}))});
      case 4:
        return conj({work(a), pred("MSB0", {b, a}), forall(w, implies(pred("MSB0", {w, a}), order(OrderOp::Le, b, w)))});
    }
    throw TransformError("zone index " + std::to_string(i) + " outside 1..4");
  }

  Formula work() const { return work(x); }
  Formula trans(int i) const { return trans(i, x, y); }
};

inline ZoneFormulas build_zone_formulas() { return ZoneFormulas{"x", "y", "p", "q", "z", "w"}; }

inline ZoneFormulas build_zone_formulas(NameSupply& names) {
  return ZoneFormulas{"x", "y", names.fresh("p"), names.fresh("q"), names.fresh("z"), names.fresh("w")};
}

inline std::string wrapped_name(const std::string& base, const std::vector<int>& zones) {
  std::string s = base;
  for (int z : zones) s += "_" + std::to_string(z);
  return s;
}

inline PredicateDef wrap_predicate(const PredicateDef& p, const std::vector<int>& zones) {
  if (static_cast<int>(zones.size()) != p.arity)
    throw PredicateError("zone vector has " + std::to_string(zones.size()) + " entries, " + p.name + " has arity " +
                         std::to_string(p.arity));
  auto rel = std::make_shared<WrappedRelation>(p.rel, zones, p.name);
  PredicateDef d;
  d.name = wrapped_name(p.name, zones);
  d.arity = p.arity;
  d.kind = PredicateKind::Derived;
  d.detail = rel->describe();
  d.finite_degree = true;
  d.rel = rel;
  return d;
}

struct TransformResult {
  Formula formula;    // (length >= 4 & main) | (length < 4 & smallcase)
  Formula main;
  Formula smallcase;
  PredicateRegistry registry;                    // MSB0, POW2 and the wrapped predicates
  std::vector<PredicateDef> wrapped;             // in order of first use
  std::set<std::string> original_binders;
  ZoneFormulas zf;
};

namespace detail {

// "the word is exactly w" in FO[<]
inline Formula exact_word(const std::string& w, NameSupply& names) {
  std::string any = names.fresh("s");
  if (w.empty()) return negate(exists(any, truth()));
  std::vector<std::string> vs;
  for (std::size_t i = 0; i < w.size(); ++i) vs.push_back(names.fresh("s"));
  std::vector<Formula> body;
  for (std::size_t i = 0; i + 1 < vs.size(); ++i) body.push_back(order(OrderOp::Lt, vs[i], vs[i + 1]));
  std::vector<Formula> covers;
  for (auto& v : vs) covers.push_back(order(OrderOp::Eq, any, v));
  body.push_back(forall(any, covers.size() == 1 ? covers[0] : disj(covers)));
  for (std::size_t i = 0; i < w.size(); ++i) body.push_back(letter(w[i], vs[i]));
  Formula f = conj(body);
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) f = exists(*it, f);
  return f;
}

inline Formula at_least(int c, NameSupply& names) {
  std::vector<std::string> vs;
  for (int i = 0; i < c; ++i) vs.push_back(names.fresh("s"));
  std::vector<Formula> body;
  for (int i = 0; i + 1 < c; ++i) body.push_back(order(OrderOp::Lt, vs[static_cast<std::size_t>(i)], vs[static_cast<std::size_t>(i) + 1]));
  Formula f = conj(body);
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) f = exists(*it, f);
  return f;
}

class ZoneRewriter {
 public:
  ZoneRewriter(const PredicateRegistry& reg, ZoneFormulas zf, std::string guard_var, std::string letter_var)
      : reg_(reg), zf_(std::move(zf)), gv_(std::move(guard_var)), lv_(std::move(letter_var)) {}

  Formula run(const Formula& f) {
    std::map<std::string, int> env;
    return rec(f, env);
  }

  std::vector<PredicateDef> wrapped;
  std::set<std::string> binders;

 private:
  const PredicateRegistry& reg_;
  ZoneFormulas zf_;
  std::string gv_, lv_;
  std::set<std::string> made_;

  int zone(const std::map<std::string, int>& env, const std::string& v) const {
    auto it = env.find(v);
    if (it == env.end()) throw TransformError("free variable '" + v + "'; the transform needs a closed formula");
    return it->second;
  }

  Formula rec(const Formula& f, std::map<std::string, int>& env) {
    if (auto a = f.as<LetterAtom>()) {
      int i = zone(env, a->var);
      if (i == 2) return f;
      return exists(lv_, conj({zf_.trans(i, a->var, lv_), letter(a->letter, lv_)}));
    }
    if (auto a = f.as<OrderAtom>()) {
      int i = zone(env, a->left), j = zone(env, a->right);
      if (a->left == a->right) return constant(a->op != OrderOp::Lt);
      if (i == j) return f;
      // translations keep the offset inside the block, so distinct zones compare by index
      return constant(a->op == OrderOp::Eq ? false : i < j);
    }
    if (auto a = f.as<PredAtom>()) {
      const PredicateDef& base = reg_.at(a->name);
      if (static_cast<int>(a->args.size()) != base.arity)
        throw TransformError(a->name + " has arity " + std::to_string(base.arity) + " but is applied to " +
                             std::to_string(a->args.size()) + " arguments");
      std::vector<int> zones;
      for (auto& v : a->args) zones.push_back(zone(env, v));
      std::string name = wrapped_name(base.name, zones);
      if (made_.insert(name).second) wrapped.push_back(wrap_predicate(base, zones));
      return pred(name, a->args);
    }
    if (auto q = f.as<Quantified>()) {
      binders.insert(q->var);
      auto saved = env.find(q->var) == env.end() ? std::optional<int>{} : std::optional{env[q->var]};
      std::vector<Formula> parts;
      for (int i = 1; i <= 4; ++i) {
        env[q->var] = i;
        Formula body = rec(q->body, env);
        Formula guard = i == 2 ? truth() : exists(gv_, zf_.trans(i, q->var, gv_));
        parts.push_back(q->q == Quantifier::Exists ? conj({guard, body}) : implies(guard, body));
      }
      if (saved)
        env[q->var] = *saved;
      else
        env.erase(q->var);
      Formula w = zf_.work(q->var);
      if (q->q == Quantifier::Exists) return exists(q->var, conj({w, constant_fold(disj(parts))}));
      return forall(q->var, implies(w, constant_fold(conj(parts))));
    }
    return map_children(f, [&](const Formula& c) { return rec(c, env); });
  }
};

}  // namespace detail

// Rewrites f so that every quantifier ranges over the work zone and every numerical predicate
// is replaced by a same-block (finite-degree) wrapped version. Words of length < 4 have no
// proper work zone and are handled by an explicit list.
inline TransformResult workzone_transform(const Formula& f, const PredicateRegistry& reg, const Alphabet& alphabet) {
  if (!is_closed(f)) throw TransformError("workzone_transform needs a closed formula");
  for (auto& name : predicate_names(f)) reg.at(name);
  NameSupply names(all_variables(f));
  ZoneFormulas zf = build_zone_formulas(names);
  std::string guard = names.fresh("y"), lv = names.fresh("t");

  detail::ZoneRewriter rw(reg, zf, guard, lv);
  TransformResult out;
  out.main = constant_fold(rw.run(f));
  out.wrapped = rw.wrapped;
  out.original_binders = rw.binders;
  out.zf = zf;

  std::vector<Formula> small;
  std::size_t total = 0;
  CompiledFormula cf(f, reg);
  for (int c = 0; c < 4; ++c)
    for_each_word(alphabet, static_cast<std::size_t>(c), [&](const Word& w) {
      ++total;
      if (cf.eval(w)) small.push_back(detail::exact_word(w.str(), names));
    });
  bool all_small = small.size() == total;
  out.smallcase = all_small ? negate(detail::at_least(4, names)) : constant_fold(disj(small));
  if (all_small && out.main.is<TrueConst>())
    out.formula = out.smallcase = truth();
  else if (small.empty() && out.main.is<FalseConst>())
    out.formula = falsity();
  else {
    // the length test is letter-free, so evaluators can decide it once per length
    Formula big = detail::at_least(4, names);
    Formula small_part = all_small ? out.smallcase : conj({negate(big), out.smallcase});
    out.formula = constant_fold(disj({conj({big, out.main}), small_part}));
  }

  out.registry.add(builtin_predicate("msb0", "MSB0"));
  out.registry.add(builtin_predicate("pow2", "POW2"));
  for (auto& d : out.wrapped) out.registry.add_or_replace(d);
  return out;
}

// Every quantifier on an original binder must read Ex[work(x) & ..] or Ax[work(x) -> ..].
inline bool quantifiers_work_guarded(const TransformResult& r) {
  bool ok = true;
  for_each_subformula(r.main, [&](const Formula& g) {
    auto q = g.as<Quantified>();
    if (!q || !r.original_binders.count(q->var)) return;
    Formula w = r.zf.work(q->var);
    // folding may leave just work(x), or !work(x) for a universal whose body became false
    if (q->q == Quantifier::Exists) {
      auto a = q->body.as<And>();
      ok = ok && (q->body == w || (a && !a->children.empty() && a->children.front() == w));
    } else {
      auto im = q->body.as<Implies>();
      ok = ok && (q->body == negate(w) || (im && im->lhs == w));
    }
  });
  return ok;
}

}  // namespace fofin
