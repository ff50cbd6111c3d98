#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fofin/error.hpp"
#include "fofin/formula.hpp"
#include "fofin/predicates.hpp"
#include "fofin/random.hpp"
#include "fofin/word.hpp"

namespace fofin {

using Assignment = std::map<std::string, std::int64_t>;

// Formula compiled against a registry into a flat node array with variable slots.
//
// Two exact accelerations keep large universes tractable:
//  * quantified subformulas with at most two free variables are memoized per evaluation;
//  * a quantifier whose body is quantifier-free only visits the starts of segments on which the
//    body cannot change value. Segment boundaries are letter-run starts, a and a+1 for every
//    order atom against an assigned a, and c and c+1 for every coordinate c of the tuples
//    containing an assigned argument of a finite-degree predicate atom.
// Step counter shared by several evaluations; limit 0 means unlimited.
struct StepBudget {
  std::uint64_t limit = 0;
  std::uint64_t used = 0;

  void tick(std::uint64_t n = 1) {
    used += n;
    if (limit && used > limit) throw BudgetError("step budget of " + std::to_string(limit) + " exhausted");
  }
};

class CompiledFormula {
 public:
  CompiledFormula(const Formula& f, const PredicateRegistry& reg, std::vector<std::string> free_order = {}) {
    auto fv = free_variables(f);
    if (free_order.empty()) {
      free_.assign(fv.begin(), fv.end());
    } else {
      free_ = std::move(free_order);
      for (auto& v : fv)
        if (std::find(free_.begin(), free_.end(), v) == free_.end())
          throw EvalError("free variable '" + v + "' missing from the declared order");
    }
    std::map<std::string, int> scope;
    for (std::size_t i = 0; i < free_.size(); ++i) scope[free_[i]] = static_cast<int>(i);
    slots_ = static_cast<int>(free_.size());
    root_ = build(f, scope, reg);
    for (std::size_t i = 0; i < free_.size(); ++i) root_plans_.push_back(plan_for(root_, static_cast<int>(i)));
  }

  const std::vector<std::string>& free_vars() const { return free_; }

  void set_budget(std::shared_ptr<StepBudget> b) { budget_ = std::move(b); }

  bool eval(const LetterSource& w) const { return eval(w, std::span<const std::int64_t>{}); }

  bool eval(const LetterSource& w, std::span<const std::int64_t> values) const {
    State st = start(w, values);
    bool r = ev(root_, st);
    finish(st);
    return r;
  }

  bool eval(const LetterSource& w, const Assignment& a) const {
    std::vector<std::int64_t> vals;
    for (auto& v : free_) {
      auto it = a.find(v);
      if (it == a.end()) throw EvalError("unbound free variable '" + v + "'");
      vals.push_back(it->second);
    }
    return eval(w, vals);
  }

  // Q v in [lo, hi]. f  where v = free_vars()[index]; the other free variables come from `values`
  // (the entry at `index` is ignored).
  bool quantify(Quantifier q, std::size_t index, std::int64_t lo, std::int64_t hi, const LetterSource& w,
                std::span<const std::int64_t> values) const {
    if (index >= free_.size()) throw EvalError("quantify: no such free variable");
    lo = std::max<std::int64_t>(lo, 0);
    hi = std::min(hi, w.size() - 1);
    if (lo > hi) return q == Quantifier::Forall;
    std::vector<std::int64_t> vals(values.begin(), values.end());
    vals[index] = lo;
    State st = start(w, vals);
    const Plan* plan = root_plans_[index] ? &*root_plans_[index] : nullptr;
    bool r = loop(q, static_cast<int>(index), root_, lo, hi, plan, st);
    finish(st);
    return r;
  }

 private:
  enum class K : std::uint8_t { True, False, Letter, Order, Pred, Not, And, Or, Implies, Quant };

  struct Plan {
    bool letters = false;
    std::vector<int> order_slots;
    std::vector<std::pair<int, int>> pred_anchors;  // (pred index, assigned slot)
  };

  struct Node {
    K kind{};
    char letter = 0;
    OrderOp op{};
    Quantifier q{};
    int slot = -1;
    int a = -1;
    int b = -1;
    int pred = -1;
    std::vector<int> args;
    std::vector<int> kids;
    std::vector<int> free_slots;
    bool has_quant = false;
    bool letter_free = true;
    int shape = -1;
    int memo = -1;
    std::optional<Plan> plan;
  };

  struct PredRef {
    std::shared_ptr<const Relation> rel;
    bool finite_degree;
  };

  struct State {
    const LetterSource& w;
    std::int64_t n;
    std::vector<std::int64_t> val;
    std::vector<std::vector<std::int8_t>> memo;
  };

  static constexpr std::int64_t kCompressMin = 48;
  static constexpr std::int64_t kMemoCells = std::int64_t{1} << 20;

  std::vector<std::string> free_;
  std::vector<Node> nodes_;
  std::vector<PredRef> preds_;
  std::vector<std::optional<Plan>> root_plans_;
  int slots_ = 0;
  int root_ = -1;
  int memo_count_ = 0;
  std::unordered_map<std::string, int> shapes_;
  std::unordered_map<std::string, int> memo_ids_;
  std::vector<bool> memo_letter_free_;

  // Tables of letter-free subformulas depend only on the universe size, so they are kept
  // between evaluations on words of the same length.
  struct TableCache {
    std::mutex mu;
    std::int64_t n = -1;
    std::vector<std::vector<std::int8_t>> tables;
  };
  std::shared_ptr<TableCache> cache_ = std::make_shared<TableCache>();
  std::shared_ptr<StepBudget> budget_;

  State start(const LetterSource& w, std::span<const std::int64_t> values) const {
    if (values.size() != free_.size())
      throw EvalError("expected " + std::to_string(free_.size()) + " free values, got " + std::to_string(values.size()));
    State st{w, w.size(), std::vector<std::int64_t>(static_cast<std::size_t>(slots_), 0),
             std::vector<std::vector<std::int8_t>>(static_cast<std::size_t>(memo_count_))};
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] < 0 || values[i] >= st.n)
        throw EvalError("variable '" + free_[i] + "' assigned position " + std::to_string(values[i]) +
                        " outside universe of size " + std::to_string(st.n));
      st.val[i] = values[i];
    }
    std::lock_guard<std::mutex> g(cache_->mu);
    if (cache_->n == st.n)
      for (std::size_t id = 0; id < cache_->tables.size(); ++id) st.memo[id] = std::move(cache_->tables[id]);
    return st;
  }

  void finish(State& st) const {
    std::lock_guard<std::mutex> g(cache_->mu);
    if (cache_->n != st.n) {
      cache_->n = st.n;
      cache_->tables.assign(static_cast<std::size_t>(memo_count_), {});
    }
    for (std::size_t id = 0; id < st.memo.size(); ++id)
      if (memo_letter_free_[id] && !st.memo[id].empty()) cache_->tables[id] = std::move(st.memo[id]);
  }

  static void merge_free(std::vector<int>& into, const std::vector<int>& from) {
    std::vector<int> out;
    std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
    into = std::move(out);
  }

  int add(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int lookup(const std::map<std::string, int>& scope, const std::string& v) const {
    auto it = scope.find(v);
    if (it == scope.end()) throw EvalError("unbound free variable '" + v + "'");
    return it->second;
  }

  // Interned id of the named structure of f; equal ids mean syntactically equal formulas.
  int shape_of(const Formula& f, const std::vector<int>& kid_shapes) {
    std::string key = std::to_string(f.node().index());
    f.visit(overloaded{
        [&](const LetterAtom& a) { key += a.letter + a.var; },
        [&](const OrderAtom& a) { key += op_text(a.op) + a.left + "," + a.right; },
        [&](const PredAtom& a) {
          key += a.name;
          for (auto& v : a.args) key += "," + v;
        },
        [&](const Quantified& q) { key += quantifier_text(q.q) + q.var; },
        [&](const auto&) {},
    });
    for (int k : kid_shapes) key += "|" + std::to_string(k);
    return shapes_.emplace(std::move(key), static_cast<int>(shapes_.size())).first->second;
  }

  int build(const Formula& f, std::map<std::string, int>& scope, const PredicateRegistry& reg) {
    // Some variable is in scope, so the universe is non-empty and a vacuous binder is a no-op.
    if (auto* q = f.as<Quantified>(); q && !scope.empty() && !free_variables(q->body).count(q->var))
      return build(q->body, scope, reg);
    Node n;
    f.visit(overloaded{
        [&](const TrueConst&) { n.kind = K::True; },
        [&](const FalseConst&) { n.kind = K::False; },
        [&](const LetterAtom& a) {
          n.kind = K::Letter;
          n.letter = a.letter;
          n.slot = lookup(scope, a.var);
          n.free_slots = {n.slot};
        },
        [&](const OrderAtom& a) {
          n.kind = K::Order;
          n.op = a.op;
          n.a = lookup(scope, a.left);
          n.b = lookup(scope, a.right);
          n.free_slots = {std::min(n.a, n.b), std::max(n.a, n.b)};
          n.free_slots.erase(std::unique(n.free_slots.begin(), n.free_slots.end()), n.free_slots.end());
        },
        [&](const PredAtom& a) {
          const PredicateDef& d = reg.at(a.name);
          if (static_cast<int>(a.args.size()) != d.arity)
            throw EvalError(a.name + " has arity " + std::to_string(d.arity) + " but is applied to " +
                            std::to_string(a.args.size()) + " arguments");
          n.kind = K::Pred;
          n.pred = static_cast<int>(preds_.size());
          preds_.push_back({d.rel, d.finite_degree});
          for (auto& v : a.args) n.args.push_back(lookup(scope, v));
          n.free_slots = n.args;
          std::sort(n.free_slots.begin(), n.free_slots.end());
          n.free_slots.erase(std::unique(n.free_slots.begin(), n.free_slots.end()), n.free_slots.end());
        },
        [&](const Not& x) {
          n.kind = K::Not;
          n.kids = {build(x.child, scope, reg)};
        },
        [&](const And& x) {
          n.kind = K::And;
          for (auto& c : x.children) n.kids.push_back(build(c, scope, reg));
        },
        [&](const Or& x) {
          n.kind = K::Or;
          for (auto& c : x.children) n.kids.push_back(build(c, scope, reg));
        },
        [&](const Implies& x) {
          n.kind = K::Implies;
          n.kids = {build(x.lhs, scope, reg), build(x.rhs, scope, reg)};
        },
        [&](const Quantified& x) {
          n.kind = K::Quant;
          n.q = x.q;
          n.slot = slots_++;
          auto it = scope.find(x.var);
          std::optional<int> saved;
          if (it != scope.end()) saved = it->second;
          scope[x.var] = n.slot;
          n.kids = {build(x.body, scope, reg)};
          if (saved)
            scope[x.var] = *saved;
          else
            scope.erase(x.var);
        },
    });
    {
      std::vector<int> ks;
      for (int k : n.kids) ks.push_back(nodes_[static_cast<std::size_t>(k)].shape);
      n.shape = shape_of(f, ks);
    }
    if (n.kind == K::Letter) n.letter_free = false;
    for (int k : n.kids) n.letter_free = n.letter_free && nodes_[static_cast<std::size_t>(k)].letter_free;
    if (n.kind != K::Quant) {
      for (int k : n.kids) {
        merge_free(n.free_slots, nodes_[static_cast<std::size_t>(k)].free_slots);
        n.has_quant = n.has_quant || nodes_[static_cast<std::size_t>(k)].has_quant;
      }
    } else {
      const Node& body = nodes_[static_cast<std::size_t>(n.kids[0])];
      for (int s : body.free_slots)
        if (s != n.slot) n.free_slots.push_back(s);
      n.has_quant = true;
      if (n.free_slots.size() <= 2) {
        // copies of one subformula over the same variables share a table
        std::string key = std::to_string(n.shape);
        for (auto& v : free_variables(f)) key += "|" + std::to_string(scope.at(v));
        n.memo = memo_ids_.emplace(std::move(key), memo_count_).first->second;
        if (n.memo == memo_count_) {
          ++memo_count_;
          memo_letter_free_.push_back(body.letter_free);
        }
      }
      n.plan = plan_for(n.kids[0], n.slot);
    }
    return add(std::move(n));
  }

  // Segment plan for quantifying `slot` over the subtree at `body`, when the body is
  // quantifier-free and every predicate atom on `slot` has an assigned finite-degree anchor.
  std::optional<Plan> plan_for(int body, int slot) const {
    if (nodes_[static_cast<std::size_t>(body)].has_quant) return std::nullopt;
    Plan p;
    bool ok = true;
    auto rec = [&](auto&& self, int id) -> void {
      const Node& n = nodes_[static_cast<std::size_t>(id)];
      switch (n.kind) {
        case K::Letter:
          if (n.slot == slot) p.letters = true;
          break;
        case K::Order:
          if (n.a == slot && n.b != slot) p.order_slots.push_back(n.b);
          if (n.b == slot && n.a != slot) p.order_slots.push_back(n.a);
          break;
        case K::Pred: {
          if (std::find(n.args.begin(), n.args.end(), slot) == n.args.end()) break;
          auto other = std::find_if(n.args.begin(), n.args.end(), [&](int s) { return s != slot; });
          if (other == n.args.end() || !preds_[static_cast<std::size_t>(n.pred)].finite_degree) {
            ok = false;
            break;
          }
          p.pred_anchors.emplace_back(n.pred, *other);
          break;
        }
        default:
          for (int k : n.kids) self(self, k);
      }
    };
    rec(rec, body);
    if (!ok) return std::nullopt;
    std::sort(p.order_slots.begin(), p.order_slots.end());
    p.order_slots.erase(std::unique(p.order_slots.begin(), p.order_slots.end()), p.order_slots.end());
    std::sort(p.pred_anchors.begin(), p.pred_anchors.end());
    p.pred_anchors.erase(std::unique(p.pred_anchors.begin(), p.pred_anchors.end()), p.pred_anchors.end());
    return p;
  }

  std::vector<std::int64_t> segment_starts(const Plan& plan, std::int64_t lo, std::int64_t hi, State& st) const {
    std::vector<std::int64_t> pts{lo};
    auto push = [&](std::int64_t c) {
      if (c > lo && c <= hi) pts.push_back(c);
    };
    if (plan.letters)
      for (std::int64_t p = lo; p <= hi; p = st.w.run_end(p)) push(p);
    for (int s : plan.order_slots) {
      std::int64_t v = st.val[static_cast<std::size_t>(s)];
      push(v);
      push(v + 1);
    }
    for (auto [pi, s] : plan.pred_anchors) {
      std::int64_t v = st.val[static_cast<std::size_t>(s)];
      for (const auto& t : preds_[static_cast<std::size_t>(pi)].rel->tuples_containing(v))
        for (auto c : t) {
          push(c);
          if (c < kInf) push(c + 1);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }

  bool loop(Quantifier q, int slot, int body, std::int64_t lo, std::int64_t hi, const Plan* plan, State& st) const {
    const bool want = q == Quantifier::Exists;
    if (lo > hi) return !want;
    auto& var = st.val[static_cast<std::size_t>(slot)];
    const std::int64_t saved = var;
    bool result = !want;
    if (plan && hi - lo + 1 > kCompressMin) {
      for (std::int64_t p : segment_starts(*plan, lo, hi, st)) {
        if (budget_) budget_->tick();
        var = p;
        if (ev(body, st) == want) {
          result = want;
          break;
        }
      }
    } else {
      for (std::int64_t p = lo; p <= hi; ++p) {
        if (budget_) budget_->tick();
        var = p;
        if (ev(body, st) == want) {
          result = want;
          break;
        }
      }
    }
    var = saved;
    return result;
  }

  bool ev(int id, State& st) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    switch (n.kind) {
      case K::True: return true;
      case K::False: return false;
      case K::Letter: return st.w.letter_at(st.val[static_cast<std::size_t>(n.slot)]) == n.letter;
      case K::Order: {
        std::int64_t a = st.val[static_cast<std::size_t>(n.a)], b = st.val[static_cast<std::size_t>(n.b)];
        switch (n.op) {
          case OrderOp::Lt: return a < b;
          case OrderOp::Le: return a <= b;
          case OrderOp::Eq: return a == b;
        }
        return false;
      }
      case K::Pred: {
        std::array<std::int64_t, 8> small{};
        std::vector<std::int64_t> big;
        std::int64_t* buf = small.data();
        if (n.args.size() > small.size()) {
          big.resize(n.args.size());
          buf = big.data();
        }
        for (std::size_t i = 0; i < n.args.size(); ++i) {
          buf[i] = st.val[static_cast<std::size_t>(n.args[i])];
          if (buf[i] >= st.n) return false;
        }
        return preds_[static_cast<std::size_t>(n.pred)].rel->contains(std::span<const std::int64_t>(buf, n.args.size()));
      }
      case K::Not: return !ev(n.kids[0], st);
      case K::And:
        for (int k : n.kids)
          if (!ev(k, st)) return false;
        return true;
      case K::Or:
        for (int k : n.kids)
          if (ev(k, st)) return true;
        return false;
      case K::Implies: return !ev(n.kids[0], st) || ev(n.kids[1], st);
      case K::Quant: return ev_quant(n, st);
    }
    return false;
  }

  bool ev_quant(const Node& n, State& st) const {
    std::int8_t* cell = nullptr;
    if (n.memo >= 0 && st.n > 0) {
      std::int64_t cells = 1;
      for (std::size_t i = 0; i < n.free_slots.size(); ++i) cells *= st.n;
      if (cells <= kMemoCells) {
        auto& table = st.memo[static_cast<std::size_t>(n.memo)];
        if (table.empty()) table.assign(static_cast<std::size_t>(cells), -1);
        std::int64_t key = 0;
        for (int s : n.free_slots) key = key * st.n + st.val[static_cast<std::size_t>(s)];
        cell = &table[static_cast<std::size_t>(key)];
        if (*cell >= 0) return *cell == 1;
      }
    }
    bool r = loop(n.q, n.slot, n.kids[0], 0, st.n - 1, n.plan ? &*n.plan : nullptr, st);
    if (cell) *cell = r ? 1 : 0;
    return r;
  }
};

// Standard semantics: quantifiers range over [|w|], predicates are clipped to [|w|]^k.
inline bool evaluate(const Formula& f, const LetterSource& w, const Assignment& a, const PredicateRegistry& reg) {
  return CompiledFormula(f, reg).eval(w, a);
}

inline bool evaluate(const Formula& f, const LetterSource& w, const PredicateRegistry& reg) {
  return evaluate(f, w, Assignment{}, reg);
}

// ---------------------------------------------------------------------------------------------
// verification harness

struct VerifyBudget {
  std::uint64_t exhaustive_budget = std::uint64_t{1} << 14;  // |A|^len limit for full enumeration
  int exhaustive_max_len = -1;                                 // optional extra cap
  std::uint64_t samples_per_length = 2000;
  std::uint64_t seed = 1;
};

struct EquivalenceReport {
  std::optional<Word> counterexample;
  bool f_value = false;  // values at the counterexample
  bool g_value = false;
  int exhaustive_through = -1;
  std::vector<std::pair<int, std::uint64_t>> sampled;  // (length, samples)
  std::uint64_t words_checked = 0;
};

// Shortest differing word; within an exhaustively enumerated length it is the lexicographically
// first one, within a sampled length the lexicographically first among the samples.
inline EquivalenceReport equivalent_up_to(const Formula& f, const Formula& g, const Alphabet& alphabet, int max_len,
                                          const PredicateRegistry& reg, const VerifyBudget& budget = {}) {
  if (!is_closed(f) || !is_closed(g)) throw EvalError("equivalent_up_to needs closed formulas");
  CompiledFormula cf(f, reg), cg(g, reg);
  EquivalenceReport rep;
  Rng rng(budget.seed);
  for (int len = 0; len <= max_len; ++len) {
    std::uint64_t count = word_count(alphabet, static_cast<std::size_t>(len));
    bool exhaustive = count <= budget.exhaustive_budget && (budget.exhaustive_max_len < 0 || len <= budget.exhaustive_max_len);
    if (exhaustive) {
      for (std::uint64_t i = 0; i < count; ++i) {
        Word w = word_from_index(alphabet, static_cast<std::size_t>(len), i);
        bool a = cf.eval(w), b = cg.eval(w);
        ++rep.words_checked;
        if (a != b) {
          rep.counterexample = w;
          rep.f_value = a;
          rep.g_value = b;
          return rep;
        }
      }
      rep.exhaustive_through = len;
      continue;
    }
    if (budget.samples_per_length == 0)
      throw EvalError("length " + std::to_string(len) + " exceeds the exhaustive budget and sampling is disabled");
    std::optional<Word> best;
    bool bf = false, bg = false;
    for (std::uint64_t s = 0; s < budget.samples_per_length; ++s) {
      Word w(alphabet, rng.word(alphabet.letters(), static_cast<std::size_t>(len)));
      bool a = cf.eval(w), b = cg.eval(w);
      ++rep.words_checked;
      if (a != b && (!best || w.str() < best->str())) {
        best = w;
        bf = a;
        bg = b;
      }
    }
    rep.sampled.emplace_back(len, budget.samples_per_length);
    if (best) {
      rep.counterexample = best;
      rep.f_value = bf;
      rep.g_value = bg;
      return rep;
    }
  }
  return rep;
}

struct NeutralViolation {
  Word shorter;
  Word longer;  // shorter with one extra neutral letter
};

// Tries every word up to max_len and every single insertion of e. Deletions are covered because
// deleting e from w is inserting e into the shorter word, which is enumerated as well.
inline std::optional<NeutralViolation> check_neutral_letter(const Formula& f, char e, const Alphabet& alphabet, int max_len,
                                                            const PredicateRegistry& reg) {
  if (!alphabet.contains(e)) throw EvalError(std::string("neutral letter '") + e + "' is not in the alphabet");
  if (!is_closed(f)) throw EvalError("check_neutral_letter needs a closed formula");
  CompiledFormula cf(f, reg);
  std::unordered_map<std::string, bool> cache;
  auto value = [&](const Word& w) {
    auto it = cache.find(w.str());
    if (it != cache.end()) return it->second;
    bool v = cf.eval(w);
    cache.emplace(w.str(), v);
    return v;
  };
  for (int len = 0; len <= max_len; ++len) {
    std::uint64_t count = word_count(alphabet, static_cast<std::size_t>(len));
    for (std::uint64_t i = 0; i < count; ++i) {
      Word w = word_from_index(alphabet, static_cast<std::size_t>(len), i);
      bool base = value(w);
      for (int pos = 0; pos <= len; ++pos) {
        std::string s = w.str();
        s.insert(s.begin() + pos, e);
        Word longer(alphabet, s);
        if (value(longer) != base) return NeutralViolation{w, longer};
      }
    }
  }
  return std::nullopt;
}

}  // namespace fofin
