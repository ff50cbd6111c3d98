#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fofin/error.hpp"
#include "fofin/expr.hpp"

namespace fofin {

using Tuple = std::vector<std::int64_t>;

inline std::int64_t msb_value(std::int64_t n) { return std::int64_t{1} << floor_log2(n); }

inline int bit_length(std::int64_t n) { return n <= 0 ? 0 : floor_log2(n) + 1; }

// E subset of N^k. contains() sees raw values; clipping to a universe happens in pred_contains.
class Relation {
 public:
  virtual ~Relation() = default;
  virtual int arity() const = 0;
  virtual bool contains(std::span<const std::int64_t> t) const = 0;
  virtual std::string describe() const = 0;

  // Sorted, duplicate-free list of the tuples in which n occurs. Finite-degree relations only.
  virtual std::vector<Tuple> tuples_containing(std::int64_t n) const {
    (void)n;
    throw PredicateError(describe() + " has no tuple enumeration (not finite degree)");
  }

  // Upper bound on every entry of every tuple containing n.
  virtual std::int64_t window(std::int64_t n) const {
    (void)n;
    throw PredicateError(describe() + " has no degree window");
  }

  // (min, max) over all tuples t with min(t) <= p <= max(t), or nullopt when no tuple spans p.
  // Reference algorithm: every spanning tuple has its minimum a <= p and is found at m = a.
  virtual std::optional<std::pair<std::int64_t, std::int64_t>> spanning_extent(std::int64_t p) const {
    std::optional<std::pair<std::int64_t, std::int64_t>> ext;
    for (std::int64_t m = 0; m <= p; ++m) {
      for (const auto& t : tuples_containing(m)) {
        auto [lo, hi] = std::minmax_element(t.begin(), t.end());
        if (*lo <= p && p <= *hi) {
          if (!ext)
            ext = {*lo, *hi};
          else
            ext = std::pair{std::min(ext->first, *lo), std::max(ext->second, *hi)};
        }
      }
    }
    return ext;
  }
};

enum class PredicateKind { Builtin, Table, FunctionGraph, Derived };

inline const char* kind_text(PredicateKind k) {
  switch (k) {
    case PredicateKind::Builtin: return "builtin";
    case PredicateKind::Table: return "table";
    case PredicateKind::FunctionGraph: return "function_graph";
    case PredicateKind::Derived: return "derived";
  }
  return "?";
}

struct PredicateDef {
  std::string name;
  int arity = 0;
  PredicateKind kind = PredicateKind::Builtin;
  std::string detail;  // builtin tag, rule, expression or construction note
  bool finite_degree = false;
  std::shared_ptr<const Relation> rel;
};

// ---------------------------------------------------------------------------------------------
// builtins

class BuiltinRelation : public Relation {
 public:
  explicit BuiltinRelation(std::string tag) : tag_(std::move(tag)) {
    static const std::map<std::string, int> arities{{"leq", 2}, {"lt", 2},   {"eq", 2},  {"plus", 3},
                                                    {"times", 3}, {"msb0", 2}, {"bit", 2}, {"pow2", 1}};
    auto it = arities.find(tag_);
    if (it == arities.end()) throw PredicateError("unknown builtin tag '" + tag_ + "'");
    arity_ = it->second;
  }

  const std::string& tag() const { return tag_; }
  int arity() const override { return arity_; }
  std::string describe() const override { return "builtin " + tag_; }
  bool finite_degree() const { return tag_ == "pow2" || tag_ == "eq"; }

  bool contains(std::span<const std::int64_t> t) const override {
    if (tag_ == "leq") return t[0] <= t[1];
    if (tag_ == "lt") return t[0] < t[1];
    if (tag_ == "eq") return t[0] == t[1];
    if (tag_ == "plus") return sat_add(t[0], t[1]) == t[2];
    if (tag_ == "times") return sat_mul(t[0], t[1]) == t[2] && t[2] < kInf;
    if (tag_ == "msb0") return t[0] >= 1 && t[1] == t[0] - msb_value(t[0]);
    if (tag_ == "bit") return t[1] < 63 && ((t[0] >> t[1]) & 1) == 1;
    return t[0] >= 1 && (t[0] & (t[0] - 1)) == 0;  // pow2
  }

  std::vector<Tuple> tuples_containing(std::int64_t n) const override {
    if (tag_ == "eq") return {{n, n}};
    if (tag_ == "pow2") {
      if (contains(std::span<const std::int64_t>(&n, 1))) return {{n}};
      return {};
    }
    return Relation::tuples_containing(n);
  }

  std::int64_t window(std::int64_t n) const override {
    if (finite_degree()) return n;
    return Relation::window(n);
  }

  std::optional<std::pair<std::int64_t, std::int64_t>> spanning_extent(std::int64_t p) const override {
    if (tag_ == "eq") return std::pair{p, p};
    if (tag_ == "pow2") {
      if (contains(std::span<const std::int64_t>(&p, 1))) return std::pair{p, p};
      return std::nullopt;
    }
    return Relation::spanning_extent(p);
  }

 private:
  std::string tag_;
  int arity_;
};

// ---------------------------------------------------------------------------------------------
// {(e_1(x), ..., e_k(x)) : x >= 0, all entries >= 0} for nondecreasing e_i. Covers rule tables
// ("x,x+1") and function graphs ((x, f(x))).

class ParametricRelation : public Relation {
 public:
  using Fn = std::function<std::int64_t(std::int64_t)>;

  ParametricRelation(std::vector<Fn> coords, std::string text, bool check_monotone)
      : coords_(std::move(coords)), text_(std::move(text)) {
    if (coords_.empty()) throw PredicateError("rule '" + text_ + "' has no coordinates");
    if (check_monotone) validate();
    // first x where every coordinate is a natural number; nondecreasing coordinates make the
    // valid parameters an upward-closed set
    x_min_ = first_x([&](std::int64_t x) {
      for (auto& f : coords_)
        if (f(x) < 0) return false;
      return true;
    });
  }

  int arity() const override { return static_cast<int>(coords_.size()); }
  std::string describe() const override { return "rule " + text_; }

  std::int64_t coord(std::size_t i, std::int64_t x) const { return coords_[i](x); }

  bool contains(std::span<const std::int64_t> t) const override {
    auto [a, b] = preimage(0, t[0]);
    for (std::int64_t x = a; x <= b; ++x) {
      bool ok = true;
      for (std::size_t i = 1; i < coords_.size() && ok; ++i) ok = coords_[i](x) == t[i];
      if (ok) return true;
    }
    return false;
  }

  std::vector<Tuple> tuples_containing(std::int64_t n) const override {
    std::set<Tuple> out;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      auto [a, b] = preimage(i, n);
      if (b - a > 1'000'000) throw PredicateError(describe() + ": value " + std::to_string(n) + " has too many preimages");
      for (std::int64_t x = a; x <= b; ++x) {
        Tuple t = at(x);
        if (std::all_of(t.begin(), t.end(), [](std::int64_t v) { return v < kInf; })) out.insert(std::move(t));
      }
    }
    return {out.begin(), out.end()};
  }

  std::int64_t window(std::int64_t n) const override {
    // the last parameter whose smallest entry is still <= n bounds everything containing n
    std::int64_t x = last_x_with_lo_leq(n);
    if (x < x_min_) return n;
    return std::max(n, hi(x));
  }

  std::optional<std::pair<std::int64_t, std::int64_t>> spanning_extent(std::int64_t p) const override {
    // lo(x) = min_i e_i(x) and hi(x) = max_i e_i(x) are nondecreasing, so the spanning
    // parameters form an interval [x1, x2].
    std::int64_t x1 = std::max(x_min_, first_x([&](std::int64_t x) { return hi(x) >= p; }));
    std::int64_t x2 = last_x_with_lo_leq(p);
    if (x1 > x2 || x1 >= kInf) return std::nullopt;
    return std::pair{lo(x1), hi(x2)};
  }

 private:
  std::vector<Fn> coords_;
  std::string text_;
  std::int64_t x_min_ = 0;

  Tuple at(std::int64_t x) const {
    Tuple t;
    t.reserve(coords_.size());
    for (auto& f : coords_) t.push_back(f(x));
    return t;
  }
  std::int64_t lo(std::int64_t x) const {
    std::int64_t v = kInf;
    for (auto& f : coords_) v = std::min(v, f(x));
    return v;
  }
  std::int64_t hi(std::int64_t x) const {
    std::int64_t v = -kInf;
    for (auto& f : coords_) v = std::max(v, f(x));
    return v;
  }

  // Smallest x >= 0 with pred(x), pred monotone false->true; kInf if none below 2^62.
  template <class P>
  static std::int64_t first_x(P&& pred) {
    if (pred(0)) return 0;
    std::int64_t hi = 1;
    while (!pred(hi)) {
      if (hi >= (kInf >> 1)) return kInf;
      hi <<= 1;
    }
    std::int64_t lo = hi >> 1;  // pred(lo) false
    while (hi - lo > 1) {
      std::int64_t mid = lo + (hi - lo) / 2;
      if (pred(mid))
        hi = mid;
      else
        lo = mid;
    }
    return hi;
  }

  std::int64_t last_x_with_lo_leq(std::int64_t n) const {
    std::int64_t first_above = first_x([&](std::int64_t x) { return lo(x) > n; });
    return first_above == kInf ? kInf : first_above - 1;
  }

  // Parameters x >= x_min with e_i(x) = n, as a closed interval (empty when a > b).
  std::pair<std::int64_t, std::int64_t> preimage(std::size_t i, std::int64_t n) const {
    const auto& f = coords_[i];
    std::int64_t a = std::max(x_min_, first_x([&](std::int64_t x) { return f(x) >= n; }));
    if (a >= kInf || f(a) != n) return {0, -1};
    std::int64_t b = first_x([&](std::int64_t x) { return f(x) > n; });
    if (b >= kInf) throw PredicateError(describe() + ": coordinate " + std::to_string(i) + " looks bounded");
    return {a, b - 1};
  }

  void validate() const {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      const auto& f = coords_[i];
      std::int64_t prev = f(0);
      for (std::int64_t x = 1; x <= 4096; ++x) {
        std::int64_t v = f(x);
        if (v < prev)
          throw PredicateError("rule '" + text_ + "': coordinate " + std::to_string(i) + " decreases at x=" +
                               std::to_string(x) + "; finite-degree rules need nondecreasing coordinates");
        prev = v;
      }
      if (!(f(std::int64_t{1} << 40) > f(std::int64_t{1} << 20)))
        throw PredicateError("rule '" + text_ + "': coordinate " + std::to_string(i) + " looks bounded");
    }
  }
};

class ExplicitTableRelation : public Relation {
 public:
  ExplicitTableRelation(int arity, std::vector<Tuple> tuples) : arity_(arity) {
    if (arity <= 0) throw PredicateError("table arity must be positive");
    for (auto& t : tuples) {
      if (static_cast<int>(t.size()) != arity)
        throw PredicateError("table tuple has " + std::to_string(t.size()) + " entries, arity is " + std::to_string(arity));
      for (auto v : t)
        if (v < 0) throw PredicateError("table tuple has a negative entry");
      tuples_.insert(t);
    }
  }

  int arity() const override { return arity_; }
  std::string describe() const override { return "table of " + std::to_string(tuples_.size()) + " tuples"; }
  const std::set<Tuple>& tuples() const { return tuples_; }
  bool contains(std::span<const std::int64_t> t) const override { return tuples_.count(Tuple(t.begin(), t.end())) > 0; }

  std::vector<Tuple> tuples_containing(std::int64_t n) const override {
    std::vector<Tuple> out;
    for (auto& t : tuples_)
      if (std::find(t.begin(), t.end(), n) != t.end()) out.push_back(t);
    return out;
  }

  std::int64_t window(std::int64_t n) const override {
    std::int64_t w = n;
    for (auto& t : tuples_)
      for (auto v : t) w = std::max(w, v);
    return w;
  }

 private:
  int arity_;
  std::set<Tuple> tuples_;
};

// P^(z_1..z_k): same-MSB tuples of P after translating each argument into zone z_i of its dyadic
// block [m, 2m): tau_1(x) = x-m, tau_2(x) = x, tau_3(x) = x+m, tau_4(x) = x+2m.
class WrappedRelation : public Relation {
 public:
  WrappedRelation(std::shared_ptr<const Relation> base, std::vector<int> zones, std::string base_name)
      : base_(std::move(base)), zones_(std::move(zones)), base_name_(std::move(base_name)) {
    if (static_cast<int>(zones_.size()) != base_->arity())
      throw PredicateError("zone vector has " + std::to_string(zones_.size()) + " entries, " + base_name_ + " has arity " +
                           std::to_string(base_->arity()));
    for (int z : zones_)
      if (z < 1 || z > 4) throw PredicateError("zone index " + std::to_string(z) + " outside 1..4");
  }

  static std::int64_t translate(int zone, std::int64_t x, std::int64_t m) {
    switch (zone) {
      case 1: return x - m;
      case 2: return x;
      case 3: return x + m;
      default: return x + 2 * m;
    }
  }

  int arity() const override { return base_->arity(); }
  const std::vector<int>& zones() const { return zones_; }
  const std::string& base_name() const { return base_name_; }

  std::string describe() const override {
    std::string z;
    for (int v : zones_) z += (z.empty() ? "" : ",") + std::to_string(v);
    return base_name_ + " wrapped at zones (" + z + ")";
  }

  bool contains(std::span<const std::int64_t> t) const override {
    if (t[0] < 1) return false;
    std::int64_t m = msb_value(t[0]);
    Tuple moved(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] < 1 || msb_value(t[i]) != m) return false;
      moved[i] = translate(zones_[i], t[i], m);
    }
    return base_->contains(moved);
  }

  std::vector<Tuple> tuples_containing(std::int64_t n) const override {
    if (n < 1) return {};
    std::int64_t m = msb_value(n);
    std::set<Tuple> out;
    int k = arity();
    for (int j = 0; j < k; ++j) {
      Tuple t(static_cast<std::size_t>(k), m);
      t[static_cast<std::size_t>(j)] = n;
      for (;;) {
        if (contains(t)) out.insert(t);
        int pos = 0;
        for (; pos < k; ++pos) {
          if (pos == j) continue;
          auto& v = t[static_cast<std::size_t>(pos)];
          if (v + 1 < 2 * m) {
            ++v;
            break;
          }
          v = m;
        }
        if (pos == k) break;
      }
    }
    return {out.begin(), out.end()};
  }

  std::int64_t window(std::int64_t n) const override { return n < 1 ? n : 2 * msb_value(n) - 1; }

 private:
  std::shared_ptr<const Relation> base_;
  std::vector<int> zones_;
  std::string base_name_;
};

// ---------------------------------------------------------------------------------------------
// constructors

inline std::string normalize_predicate_name(const std::string& name) {
  if (name.empty()) throw PredicateError("empty predicate name");
  bool all_lower = std::none_of(name.begin(), name.end(), [](char c) { return std::isupper(static_cast<unsigned char>(c)); });
  std::string out = name;
  if (all_lower)
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (!std::isupper(static_cast<unsigned char>(out[0])))
    throw PredicateError("predicate name '" + name + "' must start with a letter");
  for (char c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
      throw PredicateError("predicate name '" + name + "' has invalid character");
  return out;
}

inline PredicateDef builtin_predicate(const std::string& tag, const std::string& name = "") {
  auto rel = std::make_shared<BuiltinRelation>(tag);
  PredicateDef d;
  d.name = normalize_predicate_name(name.empty() ? tag : name);
  d.arity = rel->arity();
  d.kind = PredicateKind::Builtin;
  d.detail = tag;
  d.finite_degree = rel->finite_degree();
  d.rel = rel;
  return d;
}

inline PredicateDef rule_table_predicate(const std::string& name, const std::string& rule, bool finite_degree) {
  auto exprs = Expr::parse_list(rule);
  std::vector<ParametricRelation::Fn> fs;
  for (auto& e : exprs) fs.push_back([e](std::int64_t x) { return e(x); });
  PredicateDef d;
  d.name = normalize_predicate_name(name);
  d.arity = static_cast<int>(fs.size());
  d.kind = PredicateKind::Table;
  d.detail = rule;
  d.finite_degree = finite_degree;
  d.rel = std::make_shared<ParametricRelation>(std::move(fs), rule, finite_degree);
  return d;
}

inline PredicateDef explicit_table_predicate(const std::string& name, int arity, std::vector<Tuple> tuples) {
  PredicateDef d;
  d.name = normalize_predicate_name(name);
  d.arity = arity;
  d.kind = PredicateKind::Table;
  d.detail = "explicit";
  d.finite_degree = true;
  d.rel = std::make_shared<ExplicitTableRelation>(arity, std::move(tuples));
  return d;
}

inline PredicateDef function_graph_predicate(const std::string& name, std::function<std::int64_t(std::int64_t)> f,
                                             const std::string& text, bool finite_degree) {
  std::vector<ParametricRelation::Fn> fs{[](std::int64_t x) { return x; }, std::move(f)};
  PredicateDef d;
  d.name = normalize_predicate_name(name);
  d.arity = 2;
  d.kind = PredicateKind::FunctionGraph;
  d.detail = text;
  d.finite_degree = finite_degree;
  d.rel = std::make_shared<ParametricRelation>(std::move(fs), "x," + text, finite_degree);
  return d;
}

inline PredicateDef function_graph_predicate(const std::string& name, const std::string& expr, bool finite_degree) {
  Expr e = Expr::parse(expr);
  return function_graph_predicate(name, [e](std::int64_t x) { return e(x); }, expr, finite_degree);
}

inline PredicateDef derived_predicate(const std::string& name, std::shared_ptr<const Relation> rel, bool finite_degree,
                                      const std::string& detail) {
  PredicateDef d;
  d.name = normalize_predicate_name(name);
  d.arity = rel->arity();
  d.kind = PredicateKind::Derived;
  d.detail = detail;
  d.finite_degree = finite_degree;
  d.rel = std::move(rel);
  return d;
}

// ---------------------------------------------------------------------------------------------
// operations

inline bool pred_contains(const PredicateDef& p, std::span<const std::int64_t> t,
                          std::optional<std::int64_t> universe = std::nullopt) {
  if (static_cast<int>(t.size()) != p.arity)
    throw PredicateError(p.name + " expects " + std::to_string(p.arity) + " arguments, got " + std::to_string(t.size()));
  for (auto v : t) {
    if (v < 0) throw PredicateError(p.name + ": negative entry " + std::to_string(v));
    if (universe && v >= *universe) return false;
  }
  return p.rel->contains(t);
}

inline bool pred_contains(const PredicateDef& p, const Tuple& t, std::optional<std::int64_t> universe = std::nullopt) {
  return pred_contains(p, std::span<const std::int64_t>(t), universe);
}

inline std::vector<Tuple> tuples_containing(const PredicateDef& p, std::int64_t n) {
  if (!p.finite_degree) throw PredicateError(p.name + " is not flagged finite degree");
  if (n < 0) throw PredicateError("tuples_containing: negative value");
  return p.rel->tuples_containing(n);
}

struct DegreeReport {
  std::string name;
  std::int64_t upto = 0;
  std::size_t max_degree = 0;
  std::int64_t argmax = 0;
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

namespace detail {

// All tuples in [0, w]^k that contain n and satisfy contains(), via direct membership calls.
inline std::set<Tuple> scan_window(const Relation& r, std::int64_t n, std::int64_t w) {
  std::set<Tuple> out;
  int k = r.arity();
  Tuple t(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    // enumerate the other coordinates as a base-(w+1) counter
    std::vector<int> others;
    for (int i = 0; i < k; ++i)
      if (i != j) others.push_back(i);
    std::fill(t.begin(), t.end(), 0);
    t[static_cast<std::size_t>(j)] = n;
    for (;;) {
      if (r.contains(t)) out.insert(t);
      std::size_t pos = 0;
      while (pos < others.size()) {
        auto& v = t[static_cast<std::size_t>(others[pos])];
        if (v < w) {
          ++v;
          break;
        }
        v = 0;
        ++pos;
      }
      if (pos == others.size()) break;
    }
  }
  return out;
}

}  // namespace detail

// Cross-checks tuples_containing(n) against a scan of membership over [0, window(n)]^k for
// every n <= upto. The scan is repeated on a wider box to catch tuples escaping the window,
// which is how a relation of infinite degree shows up.
inline DegreeReport verify_finite_degree(const PredicateDef& p, std::int64_t upto) {
  if (!p.finite_degree) throw PredicateError(p.name + " is not flagged finite degree; refusing to verify");
  DegreeReport rep;
  rep.name = p.name;
  rep.upto = upto;
  const Relation& r = *p.rel;
  for (std::int64_t n = 0; n <= upto && rep.problems.size() < 20; ++n) {
    auto listed = r.tuples_containing(n);
    std::int64_t w = r.window(n);
    std::int64_t wide = r.arity() <= 2 ? 2 * w + 2 : w + 2;
    std::set<Tuple> scanned = detail::scan_window(r, n, wide);
    std::set<Tuple> listed_set(listed.begin(), listed.end());
    for (const auto& t : listed) {
      if (std::find(t.begin(), t.end(), n) == t.end())
        rep.problems.push_back("n=" + std::to_string(n) + ": listed tuple does not contain n");
      if (!r.contains(t)) rep.problems.push_back("n=" + std::to_string(n) + ": listed tuple fails membership");
    }
    for (const auto& t : scanned) {
      if (!listed_set.count(t)) {
        bool beyond = std::any_of(t.begin(), t.end(), [&](std::int64_t v) { return v > w; });
        rep.problems.push_back("n=" + std::to_string(n) + (beyond ? ": member tuple escapes window " : ": member tuple not listed, window ") +
                               std::to_string(w));
        break;
      }
    }
    if (listed.size() != listed_set.size()) rep.problems.push_back("n=" + std::to_string(n) + ": duplicate tuples listed");
    if (listed.size() > rep.max_degree) {
      rep.max_degree = listed.size();
      rep.argmax = n;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------------------------
// registry and families

class PredicateRegistry {
 public:
  void add(PredicateDef d) {
    if (!d.rel) throw PredicateError("predicate " + d.name + " has no relation");
    if (defs_.count(d.name)) throw PredicateError("duplicate predicate " + d.name);
    defs_.emplace(d.name, std::move(d));
  }
  void add_or_replace(PredicateDef d) { defs_[d.name] = std::move(d); }

  const PredicateDef* find(const std::string& name) const {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : &it->second;
  }
  const PredicateDef& at(const std::string& name) const {
    if (auto d = find(name)) return *d;
    throw EvalError("unknown predicate " + name);
  }
  bool contains(const std::string& name) const { return defs_.count(name) > 0; }

  void merge(const PredicateRegistry& o) {
    for (auto& [n, d] : o.defs_) add_or_replace(d);
  }

  const std::map<std::string, PredicateDef>& defs() const { return defs_; }

 private:
  std::map<std::string, PredicateDef> defs_;
};

inline PredicateDef succ_predicate() { return rule_table_predicate("SUCC", "x,x+1", true); }
inline PredicateDef double_predicate() { return function_graph_predicate("DOUBLE", "2*x", true); }

// Builtins under their upper-case tag names, plus SUCC and DOUBLE.
inline PredicateRegistry default_registry() {
  PredicateRegistry r;
  for (const char* tag : {"leq", "lt", "eq", "plus", "times", "msb0", "bit", "pow2"}) r.add(builtin_predicate(tag));
  r.add(succ_predicate());
  r.add(double_predicate());
  return r;
}

struct PredicateFamily {
  std::vector<PredicateDef> defs;

  explicit PredicateFamily(std::vector<PredicateDef> ds = {}) : defs(std::move(ds)) {
    for (auto& d : defs)
      if (!d.finite_degree) throw PredicateError("family member " + d.name + " is not finite degree");
  }

  PredicateRegistry registry() const {
    PredicateRegistry r;
    for (auto& d : defs) r.add(d);
    return r;
  }

  std::string names() const {
    std::string s;
    for (auto& d : defs) s += (s.empty() ? "" : ",") + d.name;
    return s;
  }
};

// "succ", "double", "pow2", or a comma list of those; "" is the empty family (order only).
inline PredicateFamily family_by_name(const std::string& spec) {
  std::vector<PredicateDef> defs;
  std::size_t start = 0;
  while (start < spec.size()) {
    std::size_t end = spec.find(',', start);
    if (end == std::string::npos) end = spec.size();
    std::string n = spec.substr(start, end - start);
    if (n == "succ")
      defs.push_back(succ_predicate());
    else if (n == "double")
      defs.push_back(double_predicate());
    else if (n == "pow2")
      defs.push_back(builtin_predicate("pow2"));
    else if (!n.empty())
      throw PredicateError("unknown family member '" + n + "' (known: succ, double, pow2)");
    start = end + 1;
  }
  return PredicateFamily(std::move(defs));
}

}  // namespace fofin
