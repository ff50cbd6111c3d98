#pragma once

#include <string>

#include "fofin/formula.hpp"

namespace fofin {

namespace detail {

void print_into(const Formula& f, std::string& out);

// Operand position: quantifiers would swallow everything to their right, so they get parentheses.
inline void print_operand(const Formula& f, std::string& out) {
  if (f.is<Quantified>()) {
    out += '(';
    print_into(f, out);
    out += ')';
  } else {
    print_into(f, out);
  }
}

inline void print_nary(const std::vector<Formula>& cs, const char* sep, bool empty_value, std::string& out) {
  if (cs.empty()) {
    out += empty_value ? "true" : "false";
    return;
  }
  if (cs.size() == 1) {
    print_operand(cs.front(), out);
    return;
  }
  out += '(';
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) out += sep;
    print_operand(cs[i], out);
  }
  out += ')';
}

inline void print_into(const Formula& f, std::string& out) {
  f.visit(overloaded{
      [&](const TrueConst&) { out += "true"; },
      [&](const FalseConst&) { out += "false"; },
      [&](const LetterAtom& a) {
        out += a.letter;
        out += '(';
        out += a.var;
        out += ')';
      },
      [&](const OrderAtom& a) {
        out += a.left;
        out += ' ';
        out += op_text(a.op);
        out += ' ';
        out += a.right;
      },
      [&](const PredAtom& a) {
        out += a.name;
        out += '(';
        for (std::size_t i = 0; i < a.args.size(); ++i) {
          if (i) out += ", ";
          out += a.args[i];
        }
        out += ')';
      },
      [&](const Not& n) {
        out += '!';
        if (n.child.is<OrderAtom>()) {
          out += '(';
          print_into(n.child, out);
          out += ')';
        } else {
          print_operand(n.child, out);
        }
      },
      [&](const And& n) { print_nary(n.children, " & ", true, out); },
      [&](const Or& n) { print_nary(n.children, " | ", false, out); },
      [&](const Implies& n) {
        out += '(';
        print_operand(n.lhs, out);
        out += " -> ";
        print_into(n.rhs, out);
        out += ')';
      },
      [&](const Quantified& q) {
        out += quantifier_text(q.q);
        out += ' ';
        out += q.var;
        out += ". ";
        print_into(q.body, out);
      },
  });
}

}  // namespace detail

// And/Or with at least two children and every Implies are fully parenthesized, so the
// output re-parses to the same tree. Degenerate And/Or (0 or 1 child) print as their value.
inline std::string print_formula(const Formula& f) {
  std::string out;
  detail::print_into(f, out);
  return out;
}

}  // namespace fofin
