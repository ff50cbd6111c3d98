#include <gtest/gtest.h>

#include "fofin/parser.hpp"
#include "fofin/printer.hpp"
#include "fofin/protocol.hpp"
#include "fofin/random_formula.hpp"
#include "naive_eval.hpp"

using namespace fofin;

namespace {

const char* kToy = "exists x. forall y. (a(x) & (x < y -> b(y)))";

Transcript run(const char* f, const std::string& u, const std::string& v, const char* fam = "succ", char e = 'b',
               const std::string& letters = "abc") {
  Alphabet al(letters);
  return run_protocol(parse_formula(f), Word(al, u), Word(al, v), family_by_name(fam), e);
}

}  // namespace

TEST(ProtocolParams, SuccExample) {
  LinkContext ctx(family_by_name("succ"));
  auto p = protocol_params(1, 3, 0, ctx, 'b');
  EXPECT_EQ(p.n_total, 1);
  EXPECT_EQ(p.l0, 7);
  EXPECT_EQ(p.r0, 13);
  EXPECT_EQ(p.N, 17);
  EXPECT_EQ(zone_bounds("", p, ctx), (std::pair<std::int64_t, std::int64_t>{7, 13}));
  EXPECT_EQ(zone_bounds("N", p, ctx), (std::pair<std::int64_t, std::int64_t>{5, 15}));
  EXPECT_EQ(zone_bounds("A", p, ctx), (std::pair<std::int64_t, std::int64_t>{9, 13}));
  EXPECT_EQ(zone_bounds("B", p, ctx), (std::pair<std::int64_t, std::int64_t>{7, 11}));
  EXPECT_THROW(zone_bounds("NN", p, ctx), ProtocolError);
}

TEST(ProtocolParams, QuantifierFree) {
  LinkContext ctx(family_by_name("double"));
  auto p = protocol_params(0, 4, 2, ctx, 'b');
  EXPECT_EQ(p.n_total, 0);
  EXPECT_LT(p.len_u, p.l0);
  EXPECT_LT(p.l0, p.r0);
  EXPECT_LT(p.r0, p.len_u + p.N);
}

TEST(ProtocolParams, ValidUpToEightQuantifiersForSucc) {
  LinkContext ctx(family_by_name("succ"));
  for (int k = 0; k <= 8; ++k) EXPECT_NO_THROW(protocol_params(k, 5, 5, ctx, 'b')) << k;
  EXPECT_THROW(protocol_params(9, 5, 5, ctx, 'b'), ProtocolError);
}

TEST(Annotate, Shapes) {
  auto t = annotate_prenex(to_prenex(parse_formula(kToy)));
  EXPECT_EQ(t->leaf_count(), 9u);
  auto one = annotate_prenex(to_prenex(parse_formula("exists x. a(x)")));
  ASSERT_EQ(one->kind, AnnotatedNode::Kind::Junction);
  EXPECT_FALSE(one->conj);
  ASSERT_EQ(one->kids.size(), 3u);
  EXPECT_EQ(one->kids[1]->zone, Zone::N);
  EXPECT_EQ(one->kids[1]->kids[0]->kind, AnnotatedNode::Kind::Leaf);
  EXPECT_EQ(annotate_prenex(to_prenex(parse_formula("true")))->leaf_count(), 1u);
}

TEST(Protocol, ToyExamples) {
  auto t = run(kToy, "aa", "bb");
  EXPECT_TRUE(t.result);
  EXPECT_EQ(t.oracle_result, std::optional<bool>(true));
  EXPECT_TRUE(run(kToy, "aa", "ba").result);
  auto f = run(kToy, "ac", "cb");
  EXPECT_FALSE(f.result);
  EXPECT_EQ(f.oracle_result, std::optional<bool>(false));
}

TEST(Protocol, VacuousBindersAreDropped) {
  auto t = run("exists y. exists x. exists y. b(x)", "a", "c");
  EXPECT_EQ(t.params.k, 1);
  EXPECT_TRUE(t.result);
  EXPECT_EQ(t.oracle_result, std::optional<bool>(true));
}

TEST(Protocol, EmptyWords) {
  auto t = run("exists x. b(x)", "", "");
  EXPECT_TRUE(t.result);  // e^N is all b
  EXPECT_EQ(t.oracle_result, std::optional<bool>(true));
}

TEST(Protocol, AlicePartFoldsAway) {
  // no a in u: the A branch of exists x. a(x) is an empty disjunction
  auto t = run("exists x. a(x)", "bb", "ab");
  EXPECT_TRUE(t.result);
  auto m = parse_message(t.message);
  EXPECT_EQ(m->kind, MsgNode::Kind::Or);
  EXPECT_EQ(t.message, "(or (exists^B x [] (leaf a(x))) (exists^N x [] (leaf a(x))))");
  auto s = run("exists x. a(x)", "ab", "bb");
  EXPECT_EQ(s.message, "(const true)");
}

TEST(Protocol, Rejections) {
  Alphabet al("ab");
  EXPECT_THROW(run_protocol(parse_formula("a(x)"), Word(al, "a"), Word(al, ""), family_by_name("succ"), 'b'), ProtocolError);
  EXPECT_THROW(run_protocol(parse_formula("exists x. exists y. DOUBLE(x, y)"), Word(al, "a"), Word(al, ""),
                            family_by_name("succ"), 'b'),
               ProtocolError);
  EXPECT_THROW(run_protocol(parse_formula("exists x. a(x)"), Word(al, "a"), Word(al, ""), family_by_name("succ"), 'c'),
               ProtocolError);
}

TEST(Message, RoundTripAndDedup) {
  auto t = run(kToy, "abca", "cab", "succ", 'b');
  EXPECT_EQ(parse_message(t.message)->text, t.message);
  auto j = msg_junction(false, {msg_leaf(parse_formula("a(x)")), msg_leaf(parse_formula("a(x)"))});
  EXPECT_EQ(j->text, "(leaf a(x))");
  EXPECT_THROW(parse_message("(and (const true))"), ProtocolError);
  EXPECT_THROW(parse_message("(forall^A x [] (const true))"), ProtocolError);
  EXPECT_THROW(parse_message("(leaf a(x)"), ProtocolError);
}

TEST(Message, NoAlicicVariables) {
  FormulaShape shape;
  shape.letters = "abc";
  shape.predicates = {{"SUCC", 2}};
  Alphabet al("abc");
  for (int i = 0; i < 60; ++i) {
    shape.quantifiers = 1 + i % 3;
    FormulaGenerator gen(shape, 40 + static_cast<std::uint64_t>(i));
    Formula f = gen.next();
    PrenexFormula pf = to_prenex(f);
    Word u(al, gen.rng().word("abc", gen.rng().below(5)));
    Alice alice(pf, u, u.size() + 3, family_by_name("succ"), 'c');
    MsgPtr m = alice.run();
    // closed, and no quantifier node is Alicic: every variable is bound by an N/B node
    EXPECT_TRUE(m->free.empty()) << m->text;
    EXPECT_EQ(m->text.find("^A"), std::string::npos);
  }
}

TEST(Bob, NeverReadsU) {
  Alphabet al("ab");
  Word v(al, "ab");
  BobView view(v, 3, 10, 'b');
  EXPECT_THROW(view.letter_at(2), ProtocolError);
  EXPECT_EQ(view.letter_at(3), 'b');
  EXPECT_EQ(view.letter_at(13), 'a');
  EXPECT_EQ(view.run_end(3), 13);
}

// the oracle against the plain evaluator on the materialized word, then the protocol against it
TEST(Protocol, AgreesWithOracleOnRandomTriples) {
  Alphabet al("abc");
  auto reg = default_registry();
  int runs = 0;
  for (const char* fam : {"succ", "double"}) {
    FormulaShape shape;
    shape.letters = "abc";
    shape.predicates = {{std::string(fam) == "succ" ? "SUCC" : "DOUBLE", 2}};
    for (int i = 0; i < 80; ++i) {
      shape.quantifiers = i % 3;
      FormulaGenerator gen(shape, 1000 + static_cast<std::uint64_t>(i));
      Formula f = gen.next();
      Word u(al, gen.rng().word("abc", gen.rng().below(5)));
      Word v(al, gen.rng().word("abc", gen.rng().below(5)));
      char e = "abc"[gen.rng().below(3)];
      auto t = run_protocol(f, u, v, family_by_name(fam), e);
      ASSERT_EQ(t.result, *t.oracle_result) << print_formula(f) << " u=" << u.str() << " v=" << v.str() << " " << fam;
      if (t.params.total() <= 200) {
        std::string w = u.str() + std::string(static_cast<std::size_t>(t.params.N), e) + v.str();
        ASSERT_EQ(*t.oracle_result, naive::holds(f, w, reg)) << print_formula(f);
      }
      ++runs;
    }
  }
  EXPECT_EQ(runs, 160);
}

TEST(Protocol, QuantifierSplitOnPaddedWord) {
  Alphabet al("abc");
  auto reg = default_registry();
  FormulaShape shape;
  shape.letters = "abc";
  shape.predicates = {{"SUCC", 2}};
  for (int i = 0; i < 60; ++i) {
    shape.quantifiers = 1 + i % 3;
    FormulaGenerator gen(shape, 2000 + static_cast<std::uint64_t>(i));
    PrenexFormula pf = to_prenex(gen.next());
    if (pf.prefix.empty()) continue;
    Word u(al, gen.rng().word("abc", gen.rng().below(6))), v(al, gen.rng().word("abc", gen.rng().below(6)));
    LinkContext ctx(family_by_name("succ"));
    auto p = protocol_params(static_cast<int>(pf.k()), u.size(), v.size(), ctx, 'a');
    PaddedWord w(u, 'a', p.N, v);
    auto [q, x] = pf.prefix.front();
    PrenexFormula rest{{pf.prefix.begin() + 1, pf.prefix.end()}, pf.matrix};
    CompiledFormula inner(rest.to_formula(), reg, {x});
    std::vector<std::int64_t> vals{0};
    bool a = inner.quantify(q, 0, 0, p.l0, w, vals);
    bool n = inner.quantify(q, 0, p.l0 + 1, p.r0 - 1, w, vals);
    bool b = inner.quantify(q, 0, p.r0, w.size() - 1, w, vals);
    bool split = q == Quantifier::Exists ? (a || n || b) : (a && n && b);
    EXPECT_EQ(split, evaluate(pf.to_formula(), w, reg));
  }
}

TEST(Crux, SampledSequences) {
  for (const char* fam : {"succ", "double"}) {
    LinkContext ctx(family_by_name(fam));
    for (int k = 1; k <= 3; ++k)
      for (std::int64_t lu : {0, 3, 6}) {
        auto p = protocol_params(k, lu, 4, ctx, 'b');
        auto rep = sample_crux(p, ctx, 1000, 77 + static_cast<std::uint64_t>(k));
        EXPECT_EQ(rep.samples, 1000u);
        EXPECT_TRUE(rep.ok()) << fam << " k=" << k << ": " << rep.problems.front();
      }
  }
}

TEST(SizeBound, ToyMessagesStayBelow) {
  PrenexFormula pf = to_prenex(parse_formula(kToy));
  auto sb = message_size_bound(pf, family_by_name("succ").registry());
  EXPECT_EQ(sb.atoms, 3u);
  EXPECT_GE(sb.distinct_leaves, 2u);
  EXPECT_LE(sb.distinct_leaves, 27u);
  EXPECT_TRUE(std::isfinite(static_cast<double>(sb.bytes)));
  for (auto [u, v] : {std::pair{"aa", "bb"}, {"abab", "cc"}, {"", "a"}})
    EXPECT_LE(static_cast<long double>(run(kToy, u, v).message_bytes()), sb.bytes);
}

TEST(Nerode, Examples) {
  Alphabet ab("ab");
  auto has_a = [](const std::string& w) { return w.find('a') != std::string::npos; };
  EXPECT_EQ(nerode_classes(has_a, 2, 6, ab), 2u);
  EXPECT_EQ(nerode_classes([](const std::string&) { return true; }, 3, 4, ab), 1u);
  EXPECT_EQ(nerode_classes([](const std::string& w) { return w.size() % 2 == 0; }, 3, 8, Alphabet("a")), 2u);
  EXPECT_THROW(nerode_classes(has_a, 20, 20, ab), BudgetError);
}
