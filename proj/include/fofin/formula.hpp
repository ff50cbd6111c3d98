#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fofin {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

enum class OrderOp { Lt, Le, Eq };
enum class Quantifier { Exists, Forall };

inline const char* op_text(OrderOp op) {
  switch (op) {
    case OrderOp::Lt: return "<";
    case OrderOp::Le: return "<=";
    case OrderOp::Eq: return "=";
  }
  return "?";
}

inline const char* quantifier_text(Quantifier q) { return q == Quantifier::Exists ? "exists" : "forall"; }

inline Quantifier dual(Quantifier q) {
  return q == Quantifier::Exists ? Quantifier::Forall : Quantifier::Exists;
}

struct FormulaNode;

// Immutable handle; copies share structure.
class Formula {
 public:
  Formula();

  const FormulaNode& node() const { return *node_; }

  template <class T>
  const T* as() const;
  template <class T>
  bool is() const { return as<T>() != nullptr; }

  template <class F>
  decltype(auto) visit(F&& f) const;

  bool same_object(const Formula& o) const { return node_ == o.node_; }

  friend bool operator==(const Formula& a, const Formula& b);

  static Formula wrap(FormulaNode n);

 private:
  explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const FormulaNode> node_;
};

struct TrueConst {
  bool operator==(const TrueConst&) const = default;
};
struct FalseConst {
  bool operator==(const FalseConst&) const = default;
};
struct LetterAtom {
  char letter;
  std::string var;
  bool operator==(const LetterAtom&) const = default;
};
struct OrderAtom {
  OrderOp op;
  std::string left;
  std::string right;
  bool operator==(const OrderAtom&) const = default;
};
struct PredAtom {
  std::string name;
  std::vector<std::string> args;
  bool operator==(const PredAtom&) const = default;
};
struct Not {
  Formula child;
  bool operator==(const Not&) const = default;
};
struct And {
  std::vector<Formula> children;
  bool operator==(const And&) const = default;
};
struct Or {
  std::vector<Formula> children;
  bool operator==(const Or&) const = default;
};
struct Implies {
  Formula lhs;
  Formula rhs;
  bool operator==(const Implies&) const = default;
};
struct Quantified {
  Quantifier q;
  std::string var;
  Formula body;
  bool operator==(const Quantified&) const = default;
};

using FormulaVariant =
    std::variant<TrueConst, FalseConst, LetterAtom, OrderAtom, PredAtom, Not, And, Or, Implies, Quantified>;

struct FormulaNode : FormulaVariant {
  using FormulaVariant::FormulaVariant;
  const FormulaVariant& base() const { return *this; }
};

inline Formula Formula::wrap(FormulaNode n) { return Formula(std::make_shared<const FormulaNode>(std::move(n))); }

inline Formula::Formula() : node_(std::make_shared<const FormulaNode>(TrueConst{})) {}

template <class T>
const T* Formula::as() const {
  return std::get_if<T>(&node_->base());
}

template <class F>
decltype(auto) Formula::visit(F&& f) const {
  return std::visit(std::forward<F>(f), node_->base());
}

inline bool operator==(const Formula& a, const Formula& b) {
  return a.node_ == b.node_ || a.node_->base() == b.node_->base();
}

// builders

inline Formula truth() { return Formula::wrap(TrueConst{}); }
inline Formula falsity() { return Formula::wrap(FalseConst{}); }
inline Formula constant(bool v) { return v ? truth() : falsity(); }
inline Formula letter(char a, std::string var) { return Formula::wrap(LetterAtom{a, std::move(var)}); }
inline Formula order(OrderOp op, std::string l, std::string r) {
  return Formula::wrap(OrderAtom{op, std::move(l), std::move(r)});
}
inline Formula pred(std::string name, std::vector<std::string> args) {
  return Formula::wrap(PredAtom{std::move(name), std::move(args)});
}
inline Formula negate(Formula f) { return Formula::wrap(Not{std::move(f)}); }
inline Formula conj(std::vector<Formula> cs) { return Formula::wrap(And{std::move(cs)}); }
inline Formula disj(std::vector<Formula> cs) { return Formula::wrap(Or{std::move(cs)}); }
inline Formula implies(Formula a, Formula b) { return Formula::wrap(Implies{std::move(a), std::move(b)}); }
inline Formula quantified(Quantifier q, std::string v, Formula body) {
  return Formula::wrap(Quantified{q, std::move(v), std::move(body)});
}
inline Formula exists(std::string v, Formula body) { return quantified(Quantifier::Exists, std::move(v), std::move(body)); }
inline Formula forall(std::string v, Formula body) { return quantified(Quantifier::Forall, std::move(v), std::move(body)); }

inline bool is_atom(const Formula& f) { return f.is<LetterAtom>() || f.is<OrderAtom>() || f.is<PredAtom>(); }
inline bool is_constant(const Formula& f) { return f.is<TrueConst>() || f.is<FalseConst>(); }

// Rebuilds f with children mapped through g (one level only).
template <class G>
Formula map_children(const Formula& f, G&& g) {
  return f.visit(overloaded{
      [&](const Not& n) { return negate(g(n.child)); },
      [&](const And& n) {
        std::vector<Formula> cs;
        cs.reserve(n.children.size());
        for (const auto& c : n.children) cs.push_back(g(c));
        return conj(std::move(cs));
      },
      [&](const Or& n) {
        std::vector<Formula> cs;
        cs.reserve(n.children.size());
        for (const auto& c : n.children) cs.push_back(g(c));
        return disj(std::move(cs));
      },
      [&](const Implies& n) { return implies(g(n.lhs), g(n.rhs)); },
      [&](const Quantified& n) { return quantified(n.q, n.var, g(n.body)); },
      [&](const auto&) { return f; },
  });
}

namespace detail {

inline void atom_vars(const Formula& f, std::vector<std::string>& out) {
  f.visit(overloaded{
      [&](const LetterAtom& a) { out.push_back(a.var); },
      [&](const OrderAtom& a) {
        out.push_back(a.left);
        out.push_back(a.right);
      },
      [&](const PredAtom& a) { out.insert(out.end(), a.args.begin(), a.args.end()); },
      [&](const auto&) {},
  });
}

inline void collect_free(const Formula& f, std::multiset<std::string>& bound, std::set<std::string>& out) {
  if (is_atom(f)) {
    std::vector<std::string> vs;
    atom_vars(f, vs);
    for (auto& v : vs)
      if (!bound.count(v)) out.insert(v);
    return;
  }
  f.visit(overloaded{
      [&](const Not& n) { collect_free(n.child, bound, out); },
      [&](const And& n) {
        for (const auto& c : n.children) collect_free(c, bound, out);
      },
      [&](const Or& n) {
        for (const auto& c : n.children) collect_free(c, bound, out);
      },
      [&](const Implies& n) {
        collect_free(n.lhs, bound, out);
        collect_free(n.rhs, bound, out);
      },
      [&](const Quantified& n) {
        auto it = bound.insert(n.var);
        collect_free(n.body, bound, out);
        bound.erase(it);
      },
      [&](const auto&) {},
  });
}

}  // namespace detail

inline std::vector<std::string> atom_variables(const Formula& f) {
  std::vector<std::string> out;
  detail::atom_vars(f, out);
  return out;
}

inline std::set<std::string> free_variables(const Formula& f) {
  std::multiset<std::string> bound;
  std::set<std::string> out;
  detail::collect_free(f, bound, out);
  return out;
}

inline bool is_closed(const Formula& f) { return free_variables(f).empty(); }

// Every variable name occurring anywhere, bound or free.
inline std::set<std::string> all_variables(const Formula& f) {
  std::set<std::string> out;
  auto rec = [&](auto&& self, const Formula& g) -> void {
    if (is_atom(g)) {
      for (auto& v : atom_variables(g)) out.insert(v);
      return;
    }
    if (auto q = g.as<Quantified>()) out.insert(q->var);
    map_children(g, [&](const Formula& c) {
      self(self, c);
      return c;
    });
  };
  rec(rec, f);
  return out;
}

template <class V>
void for_each_subformula(const Formula& f, V&& visit) {
  visit(f);
  f.visit(overloaded{
      [&](const Not& n) { for_each_subformula(n.child, visit); },
      [&](const And& n) {
        for (const auto& c : n.children) for_each_subformula(c, visit);
      },
      [&](const Or& n) {
        for (const auto& c : n.children) for_each_subformula(c, visit);
      },
      [&](const Implies& n) {
        for_each_subformula(n.lhs, visit);
        for_each_subformula(n.rhs, visit);
      },
      [&](const Quantified& n) { for_each_subformula(n.body, visit); },
      [&](const auto&) {},
  });
}

inline std::size_t quantifier_count(const Formula& f) {
  std::size_t n = 0;
  for_each_subformula(f, [&](const Formula& g) { n += g.is<Quantified>(); });
  return n;
}

inline std::size_t quantifier_depth(const Formula& f) {
  return f.visit(overloaded{
      [&](const Not& n) { return quantifier_depth(n.child); },
      [&](const And& n) {
        std::size_t d = 0;
        for (const auto& c : n.children) d = std::max(d, quantifier_depth(c));
        return d;
      },
      [&](const Or& n) {
        std::size_t d = 0;
        for (const auto& c : n.children) d = std::max(d, quantifier_depth(c));
        return d;
      },
      [&](const Implies& n) { return std::max(quantifier_depth(n.lhs), quantifier_depth(n.rhs)); },
      [&](const Quantified& n) { return 1 + quantifier_depth(n.body); },
      [&](const auto&) { return std::size_t{0}; },
  });
}

inline std::set<std::string> predicate_names(const Formula& f) {
  std::set<std::string> out;
  for_each_subformula(f, [&](const Formula& g) {
    if (auto p = g.as<PredAtom>()) out.insert(p->name);
  });
  return out;
}

// Substitutes free occurrences of variables according to `ren`. Does not avoid capture;
// callers rename bound variables apart first when that matters.
inline Formula rename_free(const Formula& f, const std::vector<std::pair<std::string, std::string>>& ren) {
  auto look = [&](const std::string& v) -> const std::string& {
    for (auto& [from, to] : ren)
      if (from == v) return to;
    return v;
  };
  return f.visit(overloaded{
      [&](const LetterAtom& a) { return letter(a.letter, look(a.var)); },
      [&](const OrderAtom& a) { return order(a.op, look(a.left), look(a.right)); },
      [&](const PredAtom& a) {
        std::vector<std::string> args;
        for (auto& v : a.args) args.push_back(look(v));
        return pred(a.name, std::move(args));
      },
      [&](const Quantified& q) {
        std::vector<std::pair<std::string, std::string>> inner;
        for (auto& p : ren)
          if (p.first != q.var) inner.push_back(p);
        return quantified(q.q, q.var, rename_free(q.body, inner));
      },
      [&](const auto&) { return map_children(f, [&](const Formula& c) { return rename_free(c, ren); }); },
  });
}

}  // namespace fofin
