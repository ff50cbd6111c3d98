#pragma once

#include <cctype>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fofin/error.hpp"

namespace fofin {

// Values saturate at +-kInf so that huge function values compare as "beyond any universe".
inline constexpr std::int64_t kInf = std::int64_t{1} << 62;

inline std::int64_t sat(std::int64_t v) { return v > kInf ? kInf : (v < -kInf ? -kInf : v); }

inline std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) return a > 0 ? kInf : -kInf;
  return sat(r);
}

inline std::int64_t sat_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) return a > 0 ? kInf : -kInf;
  return sat(r);
}

inline std::int64_t sat_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) return (a > 0) == (b > 0) ? kInf : -kInf;
  return sat(r);
}

inline std::int64_t sat_pow(std::int64_t base, std::int64_t e) {
  if (e < 0) throw Error("negative exponent in expression");
  std::int64_t r = 1;
  while (e > 0) {
    if (e & 1) r = sat_mul(r, base);
    e >>= 1;
    if (e) base = sat_mul(base, base);
  }
  return r;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  if (b == 0) throw Error("division by zero in expression");
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline int floor_log2(std::int64_t v) {
  if (v <= 0) throw Error("floorlog2 of non-positive value " + std::to_string(v));
  return 63 - __builtin_clzll(static_cast<unsigned long long>(v));
}

// Integer expressions in one variable x: + - * / (floor division, also written //) ^ (power),
// unary minus, and floorlog2(e), min(a,b), max(a,b), pow(a,b).
class Expr {
 public:
  static Expr parse(std::string_view text) {
    Parser p{text};
    Expr e;
    e.root_ = p.expr(e.nodes_);
    p.skip();
    if (p.i != text.size()) throw Error("trailing input in expression '" + std::string(text) + "' at offset " + std::to_string(p.i));
    e.text_ = std::string(text);
    return e;
  }

  // Splits on top-level commas, e.g. "x,x+1".
  static std::vector<Expr> parse_list(std::string_view text) {
    std::vector<Expr> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i == text.size() || (text[i] == ',' && depth == 0)) {
        out.push_back(parse(text.substr(start, i - start)));
        start = i + 1;
      } else if (text[i] == '(') {
        ++depth;
      } else if (text[i] == ')') {
        --depth;
      }
    }
    return out;
  }

  std::int64_t operator()(std::int64_t x) const { return eval(root_, x); }
  const std::string& text() const { return text_; }

 private:
  enum class Op { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Log, Min, Max };
  struct Node {
    Op op;
    std::int64_t value = 0;
    int a = -1;
    int b = -1;
  };

  std::vector<Node> nodes_;
  int root_ = -1;
  std::string text_;

  std::int64_t eval(int id, std::int64_t x) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    switch (n.op) {
      case Op::Num: return n.value;
      case Op::Var: return x;
      case Op::Add: return sat_add(eval(n.a, x), eval(n.b, x));
      case Op::Sub: return sat_sub(eval(n.a, x), eval(n.b, x));
      case Op::Mul: return sat_mul(eval(n.a, x), eval(n.b, x));
      case Op::Div: return floor_div(eval(n.a, x), eval(n.b, x));
      case Op::Pow: return sat_pow(eval(n.a, x), eval(n.b, x));
      case Op::Neg: return sat_sub(0, eval(n.a, x));
      case Op::Log: return floor_log2(eval(n.a, x));
      case Op::Min: return std::min(eval(n.a, x), eval(n.b, x));
      case Op::Max: return std::max(eval(n.a, x), eval(n.b, x));
    }
    return 0;
  }

  struct Parser {
    std::string_view s;
    std::size_t i = 0;

    void skip() {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(std::string_view tok) {
      skip();
      if (s.substr(i, tok.size()) == tok) {
        i += tok.size();
        return true;
      }
      return false;
    }
    [[noreturn]] void fail(const std::string& m) {
      throw Error("expression '" + std::string(s) + "': " + m + " at offset " + std::to_string(i));
    }
    static int add(std::vector<Node>& ns, Node n) {
      ns.push_back(n);
      return static_cast<int>(ns.size()) - 1;
    }

    int expr(std::vector<Node>& ns) {
      int l = term(ns);
      for (;;) {
        if (eat("+"))
          l = add(ns, {Op::Add, 0, l, term(ns)});
        else if (eat("-"))
          l = add(ns, {Op::Sub, 0, l, term(ns)});
        else
          return l;
      }
    }
    int term(std::vector<Node>& ns) {
      int l = unary(ns);
      for (;;) {
        if (eat("*"))
          l = add(ns, {Op::Mul, 0, l, unary(ns)});
        else if (eat("//") || eat("/"))
          l = add(ns, {Op::Div, 0, l, unary(ns)});
        else
          return l;
      }
    }
    int unary(std::vector<Node>& ns) {
      if (eat("-")) return add(ns, {Op::Neg, 0, unary(ns), -1});
      int base = atom(ns);
      if (eat("^")) return add(ns, {Op::Pow, 0, base, unary(ns)});
      return base;
    }
    int atom(std::vector<Node>& ns) {
      skip();
      if (i >= s.size()) fail("unexpected end");
      if (std::isdigit(static_cast<unsigned char>(s[i]))) {
        std::int64_t v = 0;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) v = sat_add(sat_mul(v, 10), s[i++] - '0');
        return add(ns, {Op::Num, v});
      }
      if (eat("(")) {
        int e = expr(ns);
        if (!eat(")")) fail("expected ')'");
        return e;
      }
      if (std::isalpha(static_cast<unsigned char>(s[i]))) {
        std::size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
        std::string name(s.substr(i, j - i));
        i = j;
        if (name == "x") return add(ns, {Op::Var});
        Op op;
        int arity;
        if (name == "floorlog2") {
          op = Op::Log;
          arity = 1;
        } else if (name == "min" || name == "max" || name == "pow") {
          op = name == "min" ? Op::Min : (name == "max" ? Op::Max : Op::Pow);
          arity = 2;
        } else {
          fail("unknown identifier '" + name + "'");
        }
        if (!eat("(")) fail("expected '(' after " + name);
        int a = expr(ns);
        int b = -1;
        if (arity == 2) {
          if (!eat(",")) fail("expected ',' in " + name);
          b = expr(ns);
        }
        if (!eat(")")) fail("expected ')' after arguments of " + name);
        return add(ns, {op, 0, a, b});
      }
      fail(std::string("unexpected character '") + s[i] + "'");
    }
  };
};

}  // namespace fofin
