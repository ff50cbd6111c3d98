#include <gtest/gtest.h>

#include "fofin/evaluator.hpp"
#include "fofin/normalize.hpp"
#include "fofin/parser.hpp"
#include "fofin/printer.hpp"
#include "fofin/random_formula.hpp"

using namespace fofin;

namespace {

const char* kToy = "exists x. forall y. (a(x) & (x < y -> b(y)))";

bool same_on_all_words(const Formula& f, const Formula& g, const std::string& letters, int max_len) {
  Alphabet al(letters);
  auto reg = default_registry();
  auto rep = equivalent_up_to(f, g, al, max_len, reg, VerifyBudget{UINT64_MAX, -1, 0, 1});
  return !rep.counterexample;
}

}  // namespace

TEST(Parser, SimpleExists) {
  EXPECT_EQ(parse_formula("exists x. a(x)"), exists("x", letter('a', "x")));
}

TEST(Parser, ToyFormula) {
  Formula want = exists("x", forall("y", conj({letter('a', "x"), implies(order(OrderOp::Lt, "x", "y"), letter('b', "y"))})));
  EXPECT_EQ(parse_formula(kToy), want);
}

TEST(Parser, MissingCommaIsSyntaxError) {
  try {
    parse_formula("P(x y)");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 5);
  }
}

TEST(Parser, ReportsLineAndColumn) {
  try {
    parse_formula("exists x.\n  a(x) & $");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 10);
  }
}

TEST(Parser, Precedence) {
  // & binds tighter than |, which binds tighter than ->, and -> is right associative
  Formula f = parse_formula("a(x) | b(x) & c(x) -> a(y) -> b(y)");
  Formula want = implies(disj({letter('a', "x"), conj({letter('b', "x"), letter('c', "x")})}),
                         implies(letter('a', "y"), letter('b', "y")));
  EXPECT_EQ(f, want);
}

TEST(Parser, OrderAtomsAndPredicates) {
  EXPECT_EQ(parse_formula("x <= y"), order(OrderOp::Le, "x", "y"));
  EXPECT_EQ(parse_formula("x = y"), order(OrderOp::Eq, "x", "y"));
  EXPECT_EQ(parse_formula("MSB0(x, y)"), pred("MSB0", {"x", "y"}));
  EXPECT_EQ(parse_formula("!!true"), negate(negate(truth())));
}

TEST(Parser, Rejections) {
  EXPECT_THROW(parse_formula("ab(x)"), ParseError);          // letters are single characters
  EXPECT_THROW(parse_formula("exists true. a(x)"), ParseError);
  EXPECT_THROW(parse_formula("a(x) & exists y. b(y)"), ParseError);  // needs parentheses
  EXPECT_THROW(parse_formula("(a(x)"), ParseError);
  EXPECT_THROW(parse_formula("a(x) #"), ParseError);
  EXPECT_THROW(parse_formula(""), ParseError);
}

TEST(Printer, Basics) {
  EXPECT_EQ(print_formula(truth()), "true");
  EXPECT_EQ(print_formula(conj({letter('a', "x"), letter('b', "y")})), "(a(x) & b(y))");
  EXPECT_EQ(print_formula(parse_formula(kToy)), kToy);
  EXPECT_EQ(print_formula(parse_formula("!(exists x. a(x))")), "!(exists x. a(x))");
  EXPECT_EQ(print_formula(parse_formula("!(x < y)")), "!(x < y)");
}

TEST(Printer, RoundTripToy) {
  Formula f = parse_formula(kToy);
  EXPECT_EQ(parse_formula(print_formula(f)), f);
}

TEST(Printer, RoundTripRandom) {
  FormulaShape shape;
  shape.letters = "abc";
  shape.predicates = {{"SUCC", 2}, {"PLUS", 3}, {"POW2", 1}};
  shape.free_vars = {"x", "y"};
  for (int i = 0; i < 1000; ++i) {
    shape.quantifiers = i % 4;
    FormulaGenerator gen(shape, 1000 + i);
    Formula f = gen.next();
    std::string text = print_formula(f);
    ASSERT_EQ(parse_formula(text), f) << text;
  }
}

TEST(FreeVariables, Examples) {
  EXPECT_TRUE(free_variables(parse_formula(kToy)).empty());
  EXPECT_EQ(free_variables(letter('a', "x")), std::set<std::string>{"x"});
  EXPECT_EQ(free_variables(exists("x", order(OrderOp::Lt, "x", "y"))), std::set<std::string>{"y"});
  EXPECT_EQ(free_variables(parse_formula("a(x) & (exists x. b(x))")), std::set<std::string>{"x"});
}

TEST(ConstantFold, Examples) {
  EXPECT_EQ(constant_fold(conj({truth(), letter('a', "x")})), letter('a', "x"));
  EXPECT_EQ(constant_fold(disj({truth(), letter('b', "y")})), truth());
  EXPECT_EQ(constant_fold(implies(falsity(), falsity())), truth());
  EXPECT_EQ(constant_fold(implies(letter('a', "x"), falsity())), negate(letter('a', "x")));
  EXPECT_EQ(constant_fold(negate(conj({truth(), falsity()}))), truth());
  EXPECT_EQ(constant_fold(exists("x", falsity())), falsity());
  // exists over true is false on the empty word, so it must survive
  EXPECT_EQ(constant_fold(exists("x", truth())), exists("x", truth()));
}

TEST(ConstantFold, ReflexiveOrderAtoms) {
  EXPECT_EQ(constant_fold(order(OrderOp::Lt, "x", "x")), falsity());
  EXPECT_EQ(constant_fold(order(OrderOp::Le, "x", "x")), truth());
  EXPECT_EQ(constant_fold(order(OrderOp::Eq, "x", "x")), truth());
  EXPECT_EQ(constant_fold(order(OrderOp::Lt, "x", "y")), order(OrderOp::Lt, "x", "y"));
}

TEST(Prenex, DropVacuousBinders) {
  auto pf = drop_vacuous_binders(to_prenex(parse_formula("exists y. exists x. exists y. b(x)")));
  ASSERT_EQ(pf.k(), 1u);
  EXPECT_EQ(pf.prefix[0].first, Quantifier::Exists);
}

TEST(ConstantFold, NoConstantChildSurvives) {
  FormulaShape shape;
  shape.free_vars = {"x"};
  for (int i = 0; i < 300; ++i) {
    shape.quantifiers = i % 3;
    Formula f = constant_fold(FormulaGenerator(shape, 77 + i).next());
    if (is_constant(f)) continue;
    for_each_subformula(f, [&](const Formula& g) {
      auto check = [&](const Formula& c) { EXPECT_FALSE(is_constant(c)) << print_formula(f); };
      if (auto n = g.as<Not>()) check(n->child);
      if (auto n = g.as<And>())
        for (auto& c : n->children) check(c);
      if (auto n = g.as<Or>())
        for (auto& c : n->children) check(c);
      if (auto n = g.as<Implies>()) {
        check(n->lhs);
        check(n->rhs);
      }
    });
  }
}

TEST(ConstantFold, IdempotentAndSound) {
  FormulaShape shape;
  shape.letters = "ab";
  for (int i = 0; i < 200; ++i) {
    shape.quantifiers = 1 + i % 3;
    Formula f = FormulaGenerator(shape, 5000 + i).next();
    Formula g = constant_fold(f);
    EXPECT_EQ(constant_fold(g), g);
    EXPECT_TRUE(same_on_all_words(f, g, "ab", 6)) << print_formula(f);
  }
}

TEST(Canonicalize, SortsAndDedups) {
  Formula f = disj({letter('b', "x"), letter('a', "x"), letter('b', "x")});
  EXPECT_EQ(canonicalize(f), disj({letter('a', "x"), letter('b', "x")}));
  EXPECT_EQ(canonicalize(conj({letter('a', "x"), letter('a', "x")})), letter('a', "x"));
}

TEST(Prenex, NegatedExists) {
  auto p = to_prenex(parse_formula("!(exists x. a(x))"));
  ASSERT_EQ(p.prefix.size(), 1u);
  EXPECT_EQ(p.prefix[0], std::make_pair(Quantifier::Forall, std::string("x")));
  EXPECT_EQ(p.matrix, negate(letter('a', "x")));
}

TEST(Prenex, ToyIsAlreadyPrenex) {
  auto p = to_prenex(parse_formula(kToy));
  ASSERT_EQ(p.k(), 2u);
  EXPECT_EQ(p.prefix[0], std::make_pair(Quantifier::Exists, std::string("x")));
  EXPECT_EQ(p.prefix[1], std::make_pair(Quantifier::Forall, std::string("y")));
  EXPECT_EQ(p.matrix, parse_formula("a(x) & (x < y -> b(y))"));
}

TEST(Prenex, RenamesApart) {
  auto p = to_prenex(parse_formula("(exists x. a(x)) & (exists x. b(x))"));
  ASSERT_EQ(p.k(), 2u);
  EXPECT_NE(p.prefix[0].second, p.prefix[1].second);
  EXPECT_TRUE(same_on_all_words(parse_formula("(exists x. a(x)) & (exists x. b(x))"), p.to_formula(), "ab", 6));
}

TEST(Prenex, RejectsOpenFormula) { EXPECT_THROW(to_prenex(letter('a', "x")), TransformError); }

TEST(Prenex, EmptyWordOrdering) {
  // exists-block first under And, forall-block first under Or
  for (const char* s : {"(forall y. a(y)) & (exists x. b(x))", "(exists x. b(x)) | (forall y. a(y))",
                        "(exists x. a(x)) -> (exists y. b(y))"}) {
    Formula f = parse_formula(s);
    EXPECT_TRUE(same_on_all_words(f, to_prenex(f).to_formula(), "ab", 5)) << s;
  }
}

TEST(Prenex, PreservesSemanticsOnRandomFormulas) {
  FormulaShape shape;
  shape.letters = "ab";
  int checked = 0;
  for (int i = 0; checked < 150; ++i) {
    shape.quantifiers = 1 + i % 3;
    Formula f = FormulaGenerator(shape, 9000 + i).next();
    auto p = to_prenex(f);
    EXPECT_EQ(p.k(), quantifier_count(constant_fold(f)));
    for (std::size_t a = 0; a < p.prefix.size(); ++a)
      for (std::size_t b = a + 1; b < p.prefix.size(); ++b) EXPECT_NE(p.prefix[a].second, p.prefix[b].second);
    for_each_subformula(p.matrix, [](const Formula& g) { EXPECT_FALSE(g.is<Quantified>()); });
    ASSERT_TRUE(same_on_all_words(f, p.to_formula(), "ab", 6)) << print_formula(f);
    ++checked;
  }
}

TEST(Nnf, Desugars) {
  Formula f = parse_formula("!(exists x. (a(x) -> b(x)))");
  Formula g = to_nnf(f);
  for_each_subformula(g, [](const Formula& h) {
    EXPECT_FALSE(h.is<Implies>());
    if (auto n = h.as<Not>()) EXPECT_TRUE(is_atom(n->child));
  });
  EXPECT_TRUE(same_on_all_words(f, g, "ab", 6));
}
