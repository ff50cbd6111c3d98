#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "fofin/error.hpp"
#include "fofin/formula.hpp"

namespace fofin {

namespace detail {

enum class Tok { Ident, Upper, LParen, RParen, Comma, Dot, Bang, Amp, Bar, Arrow, Lt, Le, Eq, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Upper: return "predicate name";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Dot: return "'.'";
    case Tok::Bang: return "'!'";
    case Tok::Amp: return "'&'";
    case Tok::Bar: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Eq: return "'='";
    case Tok::End: return "end of input";
  }
  return "?";
}

inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    int l = line, cl = col;
    auto single = [&](Tok t) {
      out.push_back({t, std::string(1, c), l, cl});
      advance(1);
    };
    if (c >= 'a' && c <= 'z') {
      std::size_t j = i;
      while (j < s.size() && ((s[j] >= 'a' && s[j] <= 'z') || (s[j] >= '0' && s[j] <= '9') || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), l, cl});
      advance(j - i);
    } else if (c >= 'A' && c <= 'Z') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Upper, std::string(s.substr(i, j - i)), l, cl});
      advance(j - i);
    } else if (c == '(') {
      single(Tok::LParen);
    } else if (c == ')') {
      single(Tok::RParen);
    } else if (c == ',') {
      single(Tok::Comma);
    } else if (c == '.') {
      single(Tok::Dot);
    } else if (c == '!') {
      single(Tok::Bang);
    } else if (c == '&') {
      single(Tok::Amp);
    } else if (c == '|') {
      single(Tok::Bar);
    } else if (c == '=') {
      single(Tok::Eq);
    } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
      out.push_back({Tok::Arrow, "->", l, cl});
      advance(2);
    } else if (c == '<' && i + 1 < s.size() && s[i + 1] == '=') {
      out.push_back({Tok::Le, "<=", l, cl});
      advance(2);
    } else if (c == '<') {
      single(Tok::Lt);
    } else {
      throw ParseError(std::string("unknown token '") + c + "'", l, cl);
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

inline bool is_keyword(const std::string& s) {
  return s == "exists" || s == "forall" || s == "true" || s == "false";
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

  Formula parse_all() {
    Formula f = formula();
    if (peek().kind != Tok::End) fail("unexpected " + describe(peek()));
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::End) return "end of input";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().col); }

  Token expect(Tok k) {
    if (peek().kind != k) fail(std::string("expected ") + tok_name(k) + ", got " + describe(peek()));
    return take();
  }

  std::string variable() {
    if (peek().kind != Tok::Ident) fail("expected variable, got " + describe(peek()));
    if (is_keyword(peek().text)) fail("keyword '" + peek().text + "' used as variable");
    return take().text;
  }

  bool at_keyword(const char* kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

  Formula formula() {
    if (at_keyword("exists") || at_keyword("forall")) {
      Quantifier q = take().text == "exists" ? Quantifier::Exists : Quantifier::Forall;
      std::string v = variable();
      expect(Tok::Dot);
      return quantified(q, std::move(v), formula());
    }
    Formula lhs = disjunction();
    if (peek().kind == Tok::Arrow) {
      take();
      return implies(std::move(lhs), formula());
    }
    return lhs;
  }

  Formula disjunction() {
    std::vector<Formula> cs{conjunction()};
    while (peek().kind == Tok::Bar) {
      take();
      cs.push_back(conjunction());
    }
    return cs.size() == 1 ? cs.front() : disj(std::move(cs));
  }

  Formula conjunction() {
    std::vector<Formula> cs{negation()};
    while (peek().kind == Tok::Amp) {
      take();
      cs.push_back(negation());
    }
    return cs.size() == 1 ? cs.front() : conj(std::move(cs));
  }

  Formula negation() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Bang:
        take();
        return negate(negation());
      case Tok::LParen: {
        take();
        Formula f = formula();
        expect(Tok::RParen);
        return f;
      }
      case Tok::Upper: return predicate_atom();
      case Tok::Ident:
        if (t.text == "true") {
          take();
          return truth();
        }
        if (t.text == "false") {
          take();
          return falsity();
        }
        if (t.text == "exists" || t.text == "forall")
          fail("quantifier must be parenthesized here");
        return ident_atom();
      default: fail("unexpected " + describe(t));
    }
  }

  Formula predicate_atom() {
    std::string name = take().text;
    expect(Tok::LParen);
    std::vector<std::string> args{variable()};
    while (peek().kind == Tok::Comma) {
      take();
      args.push_back(variable());
    }
    expect(Tok::RParen);
    return pred(std::move(name), std::move(args));
  }

  Formula ident_atom() {
    if (peek(1).kind == Tok::LParen) {
      const Token& t = peek();
      if (t.text.size() != 1) fail("letter predicate must be a single lowercase letter, got '" + t.text + "'");
      char a = take().text[0];
      take();
      std::string v = variable();
      expect(Tok::RParen);
      return letter(a, std::move(v));
    }
    std::string l = variable();
    OrderOp op;
    switch (peek().kind) {
      case Tok::Lt: op = OrderOp::Lt; break;
      case Tok::Le: op = OrderOp::Le; break;
      case Tok::Eq: op = OrderOp::Eq; break;
      default: fail("expected '<', '<=' or '=', got " + describe(peek()));
    }
    take();
    std::string r = variable();
    return order(op, std::move(l), std::move(r));
  }
};

}  // namespace detail

inline Formula parse_formula(std::string_view text) { return detail::Parser(text).parse_all(); }

}  // namespace fofin
