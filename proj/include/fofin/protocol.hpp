#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fofin/error.hpp"
#include "fofin/evaluator.hpp"
#include "fofin/formula.hpp"
#include "fofin/link_graph.hpp"
#include "fofin/normalize.hpp"
#include "fofin/parser.hpp"
#include "fofin/predicates.hpp"
#include "fofin/printer.hpp"
#include "fofin/random.hpp"
#include "fofin/word.hpp"

namespace fofin {

enum class Zone : char { A = 'A', N = 'N', B = 'B' };

inline int zone_rank(Zone z) { return z == Zone::A ? 0 : z == Zone::N ? 1 : 2; }

struct ProtocolParams {
  int k = 0;
  std::int64_t n_total = 0;  // 2^k - 1
  std::int64_t l0 = 0, r0 = 0, N = 0;
  std::int64_t len_u = 0, len_v = 0;
  char neutral = 'b';

  std::int64_t total() const { return len_u + N + len_v; }
};

// (l, r) for a type history; step i (1-based) moves by n = 2^(k-i).
inline std::pair<std::int64_t, std::int64_t> zone_bounds(const std::string& h, const ProtocolParams& p,
                                                         const LinkContext& ctx) {
  if (static_cast<int>(h.size()) > p.k)
    throw ProtocolError("history '" + h + "' longer than k = " + std::to_string(p.k));
  std::int64_t l = p.l0, r = p.r0;
  for (std::size_t i = 1; i <= h.size(); ++i) {
    std::int64_t n = std::int64_t{1} << (p.k - static_cast<int>(i));
    try {
      switch (h[i - 1]) {
        case 'A': l = iterate_link(ctx, LinkDir::R, n, l); break;
        case 'N':
          l = iterate_link(ctx, LinkDir::L, n, l);
          r = iterate_link(ctx, LinkDir::R, n, r);
          break;
        case 'B': r = iterate_link(ctx, LinkDir::L, n, r); break;
        default: throw ProtocolError(std::string("bad history letter '") + h[i - 1] + "'");
      }
    } catch (const ProtocolError&) {
      throw;
    } catch (const Error& e) {
      throw ProtocolError("bounds of history '" + h + "': " + e.what());
    }
  }
  return {l, r};
}

inline void validate_assumption(const ProtocolParams& p, const LinkContext& ctx) {
  const std::int64_t lo = p.len_u, hi = p.len_u + p.N;
  auto rec = [&](auto&& self, const std::string& h) -> void {
    auto [l, r] = zone_bounds(h, p, ctx);
    if (!(lo < l && l < r && r < hi))
      throw ProtocolError("assumption violated at history '" + h + "': need " + std::to_string(lo) + " < " +
                          std::to_string(l) + " < " + std::to_string(r) + " < " + std::to_string(hi));
    if (static_cast<int>(h.size()) < p.k)
      for (char t : {'A', 'N', 'B'}) self(self, h + t);
  };
  rec(rec, "");
}

inline ProtocolParams protocol_params(int k, std::int64_t len_u, std::int64_t len_v, const LinkContext& ctx, char e) {
  if (k < 0 || k > 8) throw ProtocolError("quantifier count " + std::to_string(k) + " outside 0..8");
  if (len_u < 0 || len_v < 0) throw ProtocolError("negative word length");
  ProtocolParams p;
  p.k = k;
  p.n_total = (std::int64_t{1} << k) - 1;
  p.len_u = len_u;
  p.len_v = len_v;
  p.neutral = e;
  p.l0 = iterate_link(ctx, LinkDir::R, p.n_total + 1, len_u);
  p.r0 = iterate_link(ctx, LinkDir::R, p.n_total + 1, iterate_link(ctx, LinkDir::R, p.n_total, p.l0));
  p.N = iterate_link(ctx, LinkDir::R, p.n_total + 1, p.r0);
  if (p.N >= kInf / 4) throw ProtocolError("padding length overflows 64 bits for k = " + std::to_string(k));
  validate_assumption(p, ctx);
  return p;
}

inline ProtocolParams protocol_params(const PrenexFormula& pf, std::int64_t len_u, std::int64_t len_v,
                                      const PredicateFamily& fam, char e) {
  LinkContext ctx(fam);
  return protocol_params(static_cast<int>(pf.k()), len_u, len_v, ctx, e);
}

// ---------------------------------------------------------------------------------------------
// annotated tree

struct AnnotatedNode;
using AnnotatedPtr = std::shared_ptr<const AnnotatedNode>;

struct AnnotatedNode {
  enum class Kind { Junction, Quant, Leaf };
  Kind kind = Kind::Leaf;
  bool conj = false;
  Quantifier q{};
  Zone zone{};
  std::string var;
  int var_index = -1;  // position in the prefix
  std::string history;
  std::vector<AnnotatedPtr> kids;
  Formula leaf;

  std::size_t leaf_count() const {
    if (kind == Kind::Leaf) return 1;
    std::size_t n = 0;
    for (auto& k : kids) n += k->leaf_count();
    return n;
  }
};

inline AnnotatedPtr annotate_prenex(const PrenexFormula& pf, std::size_t i = 0, const std::string& h = "") {
  auto node = std::make_shared<AnnotatedNode>();
  if (i == pf.k()) {
    node->leaf = pf.matrix;
    return node;
  }
  auto [q, v] = pf.prefix[i];
  node->kind = AnnotatedNode::Kind::Junction;
  node->conj = q == Quantifier::Forall;
  for (Zone z : {Zone::A, Zone::N, Zone::B}) {
    auto qn = std::make_shared<AnnotatedNode>();
    qn->kind = AnnotatedNode::Kind::Quant;
    qn->q = q;
    qn->zone = z;
    qn->var = v;
    qn->var_index = static_cast<int>(i);
    qn->history = h;
    qn->kids = {annotate_prenex(pf, i + 1, h + static_cast<char>(z))};
    node->kids.push_back(qn);
  }
  return node;
}

// ---------------------------------------------------------------------------------------------
// message tree

struct MsgNode;
using MsgPtr = std::shared_ptr<const MsgNode>;

struct MsgNode {
  enum class Kind { And, Or, Quant, Leaf, Const };
  Kind kind = Kind::Const;
  bool value = false;
  Quantifier q{};
  Zone zone{};
  std::string var, history;
  std::vector<MsgPtr> kids;
  Formula leaf;
  std::string text;            // canonical serialization
  std::set<std::string> free;  // free variables

  bool is_const() const { return kind == Kind::Const; }
};

inline MsgPtr msg_const(bool v) {
  auto n = std::make_shared<MsgNode>();
  n->value = v;
  n->text = v ? "(const true)" : "(const false)";
  return n;
}

inline MsgPtr msg_leaf(const Formula& f0) {
  Formula f = canonicalize(constant_fold(f0));
  if (f.is<TrueConst>()) return msg_const(true);
  if (f.is<FalseConst>()) return msg_const(false);
  auto n = std::make_shared<MsgNode>();
  n->kind = MsgNode::Kind::Leaf;
  n->leaf = f;
  n->text = "(leaf " + print_formula(f) + ")";
  n->free = free_variables(f);
  return n;
}

// Folds constants, sorts children by text and drops repeats; a single child replaces the node.
inline MsgPtr msg_junction(bool is_and, std::vector<MsgPtr> kids) {
  std::vector<MsgPtr> keep;
  for (auto& k : kids) {
    if (k->is_const()) {
      if (k->value != is_and) return msg_const(!is_and);
      continue;
    }
    keep.push_back(k);
  }
  std::sort(keep.begin(), keep.end(), [](const MsgPtr& a, const MsgPtr& b) { return a->text < b->text; });
  keep.erase(std::unique(keep.begin(), keep.end(), [](const MsgPtr& a, const MsgPtr& b) { return a->text == b->text; }),
             keep.end());
  if (keep.empty()) return msg_const(is_and);
  if (keep.size() == 1) return keep.front();
  auto n = std::make_shared<MsgNode>();
  n->kind = is_and ? MsgNode::Kind::And : MsgNode::Kind::Or;
  n->text = is_and ? "(and" : "(or";
  for (auto& k : keep) {
    n->text += " " + k->text;
    n->free.insert(k->free.begin(), k->free.end());
  }
  n->text += ")";
  n->kids = std::move(keep);
  return n;
}

inline MsgPtr msg_quant(Quantifier q, Zone z, const std::string& var, const std::string& history, MsgPtr child,
                        bool range_empty) {
  if (range_empty) return msg_const(q == Quantifier::Forall);
  if (child->is_const()) return child;
  auto n = std::make_shared<MsgNode>();
  n->kind = MsgNode::Kind::Quant;
  n->q = q;
  n->zone = z;
  n->var = var;
  n->history = history;
  n->text = std::string("(") + quantifier_text(q) + "^" + static_cast<char>(z) + " " + var + " [" + history + "] " +
            child->text + ")";
  n->free = child->free;
  n->free.erase(var);
  n->kids = {std::move(child)};
  return n;
}

namespace detail {

class MessageReader {
 public:
  explicit MessageReader(std::string_view s) : s_(s) {}

  MsgPtr read_all() {
    MsgPtr m = node();
    skip();
    if (i_ != s_.size()) fail("trailing text");
    return m;
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ProtocolError("malformed message at byte " + std::to_string(i_) + ": " + what);
  }
  void skip() {
    while (i_ < s_.size() && s_[i_] == ' ') ++i_;
  }
  void expect(char c) {
    skip();
    if (i_ >= s_.size() || s_[i_] != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }
  std::string word() {
    skip();
    std::size_t b = i_;
    while (i_ < s_.size() && s_[i_] != ' ' && s_[i_] != '(' && s_[i_] != ')' && s_[i_] != '[' && s_[i_] != ']' &&
           s_[i_] != '^')
      ++i_;
    if (b == i_) fail("expected a word");
    return std::string(s_.substr(b, i_ - b));
  }

  MsgPtr node() {
    expect('(');
    std::string head = word();
    if (head == "const") {
      std::string v = word();
      expect(')');
      if (v != "true" && v != "false") fail("bad constant '" + v + "'");
      return msg_const(v == "true");
    }
    if (head == "leaf") {
      skip();
      std::size_t b = i_;
      int depth = 0;
      while (i_ < s_.size() && !(depth == 0 && s_[i_] == ')')) {
        if (s_[i_] == '(') ++depth;
        if (s_[i_] == ')') --depth;
        ++i_;
      }
      if (i_ >= s_.size()) fail("unterminated leaf");
      Formula f;
      try {
        f = parse_formula(s_.substr(b, i_ - b));
      } catch (const ParseError& e) {
        fail(std::string("leaf formula: ") + e.what());
      }
      ++i_;
      return msg_leaf(f);
    }
    if (head == "and" || head == "or") {
      std::vector<MsgPtr> kids;
      skip();
      while (i_ < s_.size() && s_[i_] == '(') {
        kids.push_back(node());
        skip();
      }
      expect(')');
      if (kids.size() < 2) fail("junction with fewer than two children");
      return msg_junction(head == "and", std::move(kids));
    }
    if (head == "forall" || head == "exists") {
      expect('^');
      std::string z = word();
      if (z != "N" && z != "B") fail("quantifier zone must be N or B, got '" + z + "'");
      std::string var = word();
      expect('[');
      std::size_t b = i_;
      while (i_ < s_.size() && (s_[i_] == 'A' || s_[i_] == 'N' || s_[i_] == 'B')) ++i_;
      std::string hist(s_.substr(b, i_ - b));
      expect(']');
      MsgPtr child = node();
      expect(')');
      return msg_quant(head == "forall" ? Quantifier::Forall : Quantifier::Exists, static_cast<Zone>(z[0]), var, hist,
                       child, false);
    }
    fail("unknown node '" + head + "'");
  }
};

}  // namespace detail

inline MsgPtr parse_message(std::string_view text) { return detail::MessageReader(text).read_all(); }

// Variables occurring anywhere in the message, bound or free.
inline std::set<std::string> message_variables(const MsgNode& m) {
  std::set<std::string> out;
  auto rec = [&](auto&& self, const MsgNode& n) -> void {
    if (n.kind == MsgNode::Kind::Quant) out.insert(n.var);
    if (n.kind == MsgNode::Kind::Leaf)
      for (auto& v : all_variables(n.leaf)) out.insert(v);
    for (auto& k : n.kids) self(self, *k);
  };
  rec(rec, m);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Alice

namespace detail {

struct MatrixAtom {
  enum class Kind { Letter, Order, Pred } kind;
  char letter = 0;
  OrderOp op{};
  std::vector<int> vars;  // prefix indices
  const PredicateDef* def = nullptr;
};

// Distinct atoms of the matrix plus, per occurrence in traversal order, its atom index.
struct MatrixAtoms {
  std::vector<MatrixAtom> atoms;
  std::vector<Formula> atom_formulas;
  std::vector<int> occurrence;

  MatrixAtoms(const PrenexFormula& pf, const PredicateRegistry& reg) {
    std::map<std::string, int> index_of_var;
    for (std::size_t i = 0; i < pf.prefix.size(); ++i) index_of_var[pf.prefix[i].second] = static_cast<int>(i);
    auto vi = [&](const std::string& v) {
      auto it = index_of_var.find(v);
      if (it == index_of_var.end()) throw ProtocolError("matrix variable '" + v + "' is not bound by the prefix");
      return it->second;
    };
    std::map<std::string, int> seen;
    auto rec = [&](auto&& self, const Formula& f) -> void {
      if (is_atom(f)) {
        std::string key = print_formula(f);
        auto it = seen.find(key);
        if (it == seen.end()) {
          MatrixAtom a{};
          f.visit(overloaded{
              [&](const LetterAtom& x) {
                a.kind = MatrixAtom::Kind::Letter;
                a.letter = x.letter;
                a.vars = {vi(x.var)};
              },
              [&](const OrderAtom& x) {
                a.kind = MatrixAtom::Kind::Order;
                a.op = x.op;
                a.vars = {vi(x.left), vi(x.right)};
              },
              [&](const PredAtom& x) {
                a.kind = MatrixAtom::Kind::Pred;
                a.def = &reg.at(x.name);
                if (static_cast<int>(x.args.size()) != a.def->arity)
                  throw EvalError(x.name + " has arity " + std::to_string(a.def->arity) + " but is applied to " +
                                  std::to_string(x.args.size()) + " arguments");
                for (auto& v : x.args) a.vars.push_back(vi(v));
              },
              [&](const auto&) {},
          });
          it = seen.emplace(key, static_cast<int>(atoms.size())).first;
          atoms.push_back(a);
          atom_formulas.push_back(f);
        }
        occurrence.push_back(it->second);
        return;
      }
      if (f.is<Quantified>()) throw ProtocolError("matrix is not quantifier-free");
      f.visit(overloaded{
          [&](const Not& n) { self(self, n.child); },
          [&](const And& n) {
            for (auto& c : n.children) self(self, c);
          },
          [&](const Or& n) {
            for (auto& c : n.children) self(self, c);
          },
          [&](const Implies& n) {
            self(self, n.lhs);
            self(self, n.rhs);
          },
          [&](const auto&) {},
      });
    };
    rec(rec, pf.matrix);
  }

  // status: 'T', 'F' or 'S' (symbolic) per distinct atom
  Formula substitute(const Formula& m, const std::string& status) const {
    std::size_t occ = 0;
    auto rec = [&](auto&& self, const Formula& f) -> Formula {
      if (is_atom(f)) {
        char s = status[static_cast<std::size_t>(occurrence[occ++])];
        return s == 'S' ? f : constant(s == 'T');
      }
      // explicit sequencing: the occurrence counter must follow the constructor's traversal
      if (auto n = f.as<Implies>()) {
        Formula l = self(self, n->lhs);
        Formula r = self(self, n->rhs);
        return implies(l, r);
      }
      return map_children(f, [&](const Formula& c) { return self(self, c); });
    };
    return rec(rec, m);
  }
};

}  // namespace detail

// Alice knows phi, u and |uv|; she never sees v.
class Alice {
 public:
  Alice(const PrenexFormula& pf, const Word& u, std::int64_t len_uv, const PredicateFamily& fam, char e,
        std::uint64_t leaf_limit = 0)
      : pf_(pf),
        u_(u),
        ctx_(fam),
        reg_(fam.registry()),
        atoms_(pf, reg_),
        limit_(leaf_limit) {
    if (len_uv < u.size()) throw ProtocolError("|uv| smaller than |u|");
    params_ = protocol_params(static_cast<int>(pf.k()), u.size(), len_uv - u.size(), ctx_, e);
    zones_.assign(pf.k(), Zone::A);
    vals_.assign(pf.k(), -1);
  }

  const ProtocolParams& params() const { return params_; }
  std::uint64_t leaf_visits() const { return visits_; }

  MsgPtr run(const AnnotatedNode& root) { return visit(root); }
  MsgPtr run() { return run(*annotate_prenex(pf_)); }

 private:
  const PrenexFormula& pf_;
  const Word& u_;
  LinkContext ctx_;
  PredicateRegistry reg_;
  detail::MatrixAtoms atoms_;
  ProtocolParams params_;
  std::vector<Zone> zones_;
  std::vector<std::int64_t> vals_;
  std::unordered_map<std::string, MsgPtr> leaf_memo_;
  std::uint64_t visits_ = 0;
  std::uint64_t limit_;

  char letter_at(std::int64_t p) const { return p < u_.size() ? u_.letter_at(p) : params_.neutral; }

  char status(const detail::MatrixAtom& a) const {
    using K = detail::MatrixAtom::Kind;
    bool all_a = true, mixed = false;
    for (int v : a.vars) {
      all_a = all_a && zones_[static_cast<std::size_t>(v)] == Zone::A;
      mixed = mixed || zones_[static_cast<std::size_t>(v)] != zones_[static_cast<std::size_t>(a.vars[0])];
    }
    auto tf = [](bool b) { return b ? 'T' : 'F'; };
    switch (a.kind) {
      case K::Letter:
        return all_a ? tf(letter_at(vals_[static_cast<std::size_t>(a.vars[0])]) == a.letter) : 'S';
      case K::Order: {
        int x = a.vars[0], y = a.vars[1];
        if (x == y) return tf(a.op != OrderOp::Lt);
        if (all_a) {
          std::int64_t p = vals_[static_cast<std::size_t>(x)], q = vals_[static_cast<std::size_t>(y)];
          return tf(a.op == OrderOp::Lt ? p < q : a.op == OrderOp::Le ? p <= q : p == q);
        }
        if (!mixed) return 'S';
        // positions of different types are ordered A < N < B and never equal
        if (a.op == OrderOp::Eq) return 'F';
        return tf(zone_rank(zones_[static_cast<std::size_t>(x)]) < zone_rank(zones_[static_cast<std::size_t>(y)]));
      }
      case K::Pred: {
        if (mixed) return 'F';  // no tuple spans positions of two types
        if (!all_a) return 'S';
        Tuple t;
        for (int v : a.vars) t.push_back(vals_[static_cast<std::size_t>(v)]);
        return tf(pred_contains(*a.def, t, params_.total()));
      }
    }
    return 'S';
  }

  MsgPtr leaf() {
    if (limit_ && ++visits_ > limit_)
      throw BudgetError("Alice's expansion exceeds " + std::to_string(limit_) + " leaf visits");
    std::string st;
    st.reserve(atoms_.atoms.size());
    for (auto& a : atoms_.atoms) st.push_back(status(a));
    auto it = leaf_memo_.find(st);
    if (it != leaf_memo_.end()) return it->second;
    MsgPtr m = msg_leaf(atoms_.substitute(pf_.matrix, st));
    leaf_memo_.emplace(std::move(st), m);
    return m;
  }

  MsgPtr visit(const AnnotatedNode& n) {
    switch (n.kind) {
      case AnnotatedNode::Kind::Leaf: return leaf();
      case AnnotatedNode::Kind::Junction: {
        std::vector<MsgPtr> kids;
        for (auto& k : n.kids) {
          MsgPtr m = visit(*k);
          if (m->is_const() && m->value != n.conj) return m;
          kids.push_back(std::move(m));
        }
        return msg_junction(n.conj, std::move(kids));
      }
      case AnnotatedNode::Kind::Quant: break;
    }
    auto [l, r] = zone_bounds(n.history, params_, ctx_);
    const auto i = static_cast<std::size_t>(n.var_index);
    const bool is_and = n.q == Quantifier::Forall;
    zones_[i] = n.zone;
    if (n.zone == Zone::A) {
      std::vector<MsgPtr> kids;
      std::set<std::string> seen;
      for (std::int64_t x = 0; x <= l; ++x) {
        vals_[i] = x;
        MsgPtr m = visit(*n.kids[0]);
        if (m->is_const() && m->value != is_and) {
          kids = {m};
          break;
        }
        if (seen.insert(m->text).second) kids.push_back(std::move(m));
      }
      vals_[i] = -1;
      return msg_junction(is_and, std::move(kids));
    }
    vals_[i] = -1;
    MsgPtr child = visit(*n.kids[0]);
    bool empty = n.zone == Zone::N ? l + 1 > r - 1 : r > params_.total() - 1;
    return msg_quant(n.q, n.zone, n.var, n.history, std::move(child), empty);
  }
};

// ---------------------------------------------------------------------------------------------
// Bob

// Bob's view of u e^N v: the padding and v. Reading inside u is a protocol bug.
class BobView : public LetterSource {
 public:
  BobView(const Word& v, std::int64_t len_u, std::int64_t n, char e) : v_(v), len_u_(len_u), n_(n), e_(e) {}

  std::int64_t size() const override { return len_u_ + n_ + v_.size(); }

  char letter_at(std::int64_t p) const override {
    check(p);
    return p < len_u_ + n_ ? e_ : v_.letter_at(p - len_u_ - n_);
  }

  std::int64_t run_end(std::int64_t p) const override {
    check(p);
    if (p < len_u_ + n_) return len_u_ + n_;
    return len_u_ + n_ + v_.run_end(p - len_u_ - n_);
  }

 private:
  void check(std::int64_t p) const {
    if (p < len_u_ || p >= size())
      throw ProtocolError("Bob read position " + std::to_string(p) + " outside his part [" + std::to_string(len_u_) +
                          ", " + std::to_string(size()) + ")");
  }

  const Word& v_;
  std::int64_t len_u_, n_;
  char e_;
};

// Bob knows phi's quantifier count, v and |uv|; he never sees u.
class Bob {
 public:
  Bob(int k, const Word& v, std::int64_t len_uv, const PredicateFamily& fam, char e,
      std::shared_ptr<StepBudget> budget = nullptr)
      : ctx_(fam), reg_(fam.registry()), budget_(std::move(budget)) {
    if (len_uv < v.size()) throw ProtocolError("|uv| smaller than |v|");
    params_ = protocol_params(k, len_uv - v.size(), v.size(), ctx_, e);
    view_ = std::make_unique<BobView>(v, params_.len_u, params_.N, e);
  }

  const ProtocolParams& params() const { return params_; }

  bool run(const std::string& message) {
    MsgPtr m = parse_message(message);
    std::map<std::string, std::int64_t> env;
    return ev(*m, env);
  }

 private:
  LinkContext ctx_;
  PredicateRegistry reg_;
  std::shared_ptr<StepBudget> budget_;
  ProtocolParams params_;
  std::unique_ptr<BobView> view_;
  std::map<std::string, std::unique_ptr<CompiledFormula>> compiled_;

  std::pair<std::int64_t, std::int64_t> range(const MsgNode& n) const {
    auto [l, r] = zone_bounds(n.history, params_, ctx_);
    if (n.zone == Zone::N) return {l + 1, r - 1};
    return {r, params_.total() - 1};
  }

  // leaf compiled with free order = its free variables plus `extra`
  CompiledFormula& compiled(const MsgNode& leaf, const std::string& extra) {
    std::string key = leaf.text + "|" + extra;
    auto it = compiled_.find(key);
    if (it != compiled_.end()) return *it->second;
    std::set<std::string> vs = leaf.free;
    if (!extra.empty()) vs.insert(extra);
    auto cf = std::make_unique<CompiledFormula>(leaf.leaf, reg_, std::vector<std::string>(vs.begin(), vs.end()));
    if (budget_) cf->set_budget(budget_);
    return *compiled_.emplace(key, std::move(cf)).first->second;
  }

  std::vector<std::int64_t> values(const CompiledFormula& cf, const std::map<std::string, std::int64_t>& env) const {
    std::vector<std::int64_t> out;
    for (auto& v : cf.free_vars()) {
      auto it = env.find(v);
      out.push_back(it == env.end() ? 0 : it->second);
    }
    return out;
  }

  bool ev(const MsgNode& n, std::map<std::string, std::int64_t>& env) {
    switch (n.kind) {
      case MsgNode::Kind::Const: return n.value;
      case MsgNode::Kind::Leaf: {
        auto& cf = compiled(n, "");
        return cf.eval(*view_, values(cf, env));
      }
      case MsgNode::Kind::And:
        for (auto& k : n.kids)
          if (!ev(*k, env)) return false;
        return true;
      case MsgNode::Kind::Or:
        for (auto& k : n.kids)
          if (ev(*k, env)) return true;
        return false;
      case MsgNode::Kind::Quant: break;
    }
    auto [lo, hi] = range(n);
    const bool want = n.q == Quantifier::Exists;
    if (lo > hi) return !want;
    const MsgNode& child = *n.kids[0];
    if (child.kind == MsgNode::Kind::Leaf) {
      auto& cf = compiled(child, n.var);
      auto pos = std::find(cf.free_vars().begin(), cf.free_vars().end(), n.var) - cf.free_vars().begin();
      return cf.quantify(n.q, static_cast<std::size_t>(pos), lo, hi, *view_, values(cf, env));
    }
    // a vacuous binder over a non-empty range changes nothing
    if (!child.free.count(n.var)) return ev(child, env);
    auto saved = env.find(n.var) == env.end() ? std::optional<std::int64_t>{} : std::optional{env[n.var]};
    bool result = !want;
    for (std::int64_t x = lo; x <= hi; ++x) {
      if (budget_) budget_->tick();
      env[n.var] = x;
      if (ev(child, env) == want) {
        result = want;
        break;
      }
    }
    if (saved)
      env[n.var] = *saved;
    else
      env.erase(n.var);
    return result;
  }
};

// ---------------------------------------------------------------------------------------------
// full runs

struct ProtocolOptions {
  bool with_oracle = true;
  std::uint64_t step_limit = 0;  // shared by Bob and the oracle; 0 = unlimited
  std::uint64_t alice_leaf_limit = 0;
};

struct Transcript {
  std::string formula;
  std::string prenex;
  std::string family;
  std::string u, v;
  ProtocolParams params;
  std::string message;
  bool result = false;
  std::optional<bool> oracle_result;

  std::size_t message_bytes() const { return message.size(); }
};

inline Transcript run_protocol(const Formula& phi, const Word& u, const Word& v, const PredicateFamily& fam, char e,
                               const ProtocolOptions& opt = {}) {
  if (!is_closed(phi)) throw ProtocolError("the protocol needs a closed formula");
  if (!u.alphabet().contains(e)) throw ProtocolError(std::string("neutral letter '") + e + "' not in the alphabet");
  PredicateRegistry reg = fam.registry();
  for (auto& name : predicate_names(phi))
    if (!reg.contains(name)) throw ProtocolError("predicate " + name + " is not in the family {" + fam.names() + "}");
  // the padded word has N >= 1 positions, so vacuous binders can go
  PrenexFormula pf = drop_vacuous_binders(to_prenex(phi));
  const std::int64_t len_uv = u.size() + v.size();

  Transcript t;
  t.formula = print_formula(phi);
  t.prenex = print_formula(pf.to_formula());
  t.family = fam.names();
  t.u = u.str();
  t.v = v.str();

  Alice alice(pf, u, len_uv, fam, e, opt.alice_leaf_limit);
  t.params = alice.params();
  t.message = alice.run()->text;

  std::shared_ptr<StepBudget> budget;
  if (opt.step_limit) budget = std::make_shared<StepBudget>(StepBudget{opt.step_limit, 0});
  Bob bob(static_cast<int>(pf.k()), v, len_uv, fam, e, budget);
  if (bob.params().N != t.params.N) throw ProtocolError("Alice and Bob disagree on N");
  t.result = bob.run(t.message);

  if (opt.with_oracle) {
    CompiledFormula cf(phi, reg);
    if (opt.step_limit) cf.set_budget(std::make_shared<StepBudget>(StepBudget{opt.step_limit, 0}));
    t.oracle_result = cf.eval(PaddedWord(u, e, t.params.N, v));
  }
  return t;
}

// ---------------------------------------------------------------------------------------------
// message size bound

struct SizeBound {
  std::size_t atoms = 0;
  std::size_t distinct_leaves = 0;  // folded matrices, constants included
  std::size_t max_leaf_bytes = 0;
  long double bytes = 0;            // S(phi); may be inf
};

// Every leaf Alice sends is the matrix with each atom kept or replaced by a constant, so the
// distinct leaves bound the tree level by level.
inline SizeBound message_size_bound(const PrenexFormula& pf, const PredicateRegistry& reg) {
  detail::MatrixAtoms ma(pf, reg);
  SizeBound sb;
  sb.atoms = ma.atoms.size();
  if (sb.atoms > 12) throw ProtocolError("size bound enumerates 3^atoms leaves; " + std::to_string(sb.atoms) + " atoms is too many");
  std::set<std::string> texts;
  std::string st(sb.atoms, 'S');
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == st.size()) {
      texts.insert(msg_leaf(ma.substitute(pf.matrix, st))->text);
      return;
    }
    for (char c : {'S', 'T', 'F'}) {
      st[i] = c;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  sb.distinct_leaves = texts.size();
  for (auto& t : texts) sb.max_leaf_bytes = std::max(sb.max_leaf_bytes, t.size());

  long double T = static_cast<long double>(sb.distinct_leaves);
  long double B = static_cast<long double>(std::max<std::size_t>(sb.max_leaf_bytes, 13));
  for (std::size_t i = pf.k(); i-- > 0;) {
    long double var = static_cast<long double>(pf.prefix[i].second.size());
    long double nb = 8 + (5 + T * (B + 1)) + 2 * (15 + var + static_cast<long double>(i) + B);
    long double nt = std::pow(2.0L, T) * (T + 2) * (T + 2) + 2;
    T = nt;
    B = nb;
  }
  sb.bytes = B;
  return sb;
}

// ---------------------------------------------------------------------------------------------
// Nerode classes of ~_p among short prefixes

inline std::size_t nerode_classes(const std::function<bool(const std::string&)>& member, int p, int max_prefix_len,
                                  const Alphabet& alphabet, std::uint64_t budget = std::uint64_t{1} << 26) {
  if (p < 0 || max_prefix_len < 0) throw Error("nerode_classes: negative length");
  std::uint64_t suffixes = word_count(alphabet, static_cast<std::size_t>(p));
  std::uint64_t prefixes = 0;
  for (int l = 0; l <= max_prefix_len; ++l) prefixes += word_count(alphabet, static_cast<std::size_t>(l));
  if (suffixes == 0 || prefixes > budget / suffixes)
    throw BudgetError("nerode_classes: " + std::to_string(prefixes) + " prefixes x " + std::to_string(suffixes) +
                      " suffixes exceeds the budget of " + std::to_string(budget) + " membership queries");
  std::vector<std::string> sfx;
  for_each_word(alphabet, static_cast<std::size_t>(p), [&](const Word& w) { sfx.push_back(w.str()); });
  std::set<std::vector<bool>> sigs;
  for (int l = 0; l <= max_prefix_len; ++l)
    for_each_word(alphabet, static_cast<std::size_t>(l), [&](const Word& w) {
      std::vector<bool> sig;
      sig.reserve(sfx.size());
      for (auto& s : sfx) sig.push_back(member(w.str() + s));
      sigs.insert(std::move(sig));
    });
  return sigs.size();
}

// ---------------------------------------------------------------------------------------------
// typed position sequences

struct CruxReport {
  std::size_t samples = 0;
  std::size_t positions = 0;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty(); }
};

// Random history-consistent sequences: at each step a type, then a position in that type's range.
inline CruxReport sample_crux(const ProtocolParams& p, const LinkContext& ctx, std::size_t samples, std::uint64_t seed) {
  CruxReport rep;
  Rng rng(seed);
  const std::int64_t total = p.total();
  for (std::size_t s = 0; s < samples; ++s) {
    std::string h;
    std::vector<std::int64_t> pos;
    for (int i = 0; i < p.k; ++i) {
      auto [l, r] = zone_bounds(h, p, ctx);
      char t = "ANB"[rng.below(3)];
      std::int64_t lo = t == 'A' ? 0 : t == 'N' ? l + 1 : r;
      std::int64_t hi = t == 'A' ? l : t == 'N' ? r - 1 : total - 1;
      if (lo > hi) {
        rep.problems.push_back("empty " + std::string(1, t) + " range after '" + h + "'");
        break;
      }
      h += t;
      pos.push_back(rng.range(lo, hi));
    }
    ++rep.samples;
    rep.positions += pos.size();
    for (std::size_t i = 0; i < pos.size(); ++i) {
      if (h[i] == 'N' && (pos[i] < p.len_u || pos[i] >= p.len_u + p.N))
        rep.problems.push_back("neutral position " + std::to_string(pos[i]) + " outside the padding");
      for (std::size_t j = 0; j < pos.size(); ++j) {
        if (h[i] == h[j]) continue;
        if (ctx.adjacent(pos[i], pos[j]))
          rep.problems.push_back(std::string("edge between ") + h[i] + "@" + std::to_string(pos[i]) + " and " + h[j] +
                                 "@" + std::to_string(pos[j]));
        int ri = zone_rank(static_cast<Zone>(h[i])), rj = zone_rank(static_cast<Zone>(h[j]));
        if (ri < rj && !(pos[i] < pos[j]))
          rep.problems.push_back(std::string("order ") + h[i] + "@" + std::to_string(pos[i]) + " vs " + h[j] + "@" +
                                 std::to_string(pos[j]));
      }
    }
  }
  return rep;
}

}  // namespace fofin
