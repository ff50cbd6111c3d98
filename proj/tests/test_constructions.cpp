#include <gtest/gtest.h>

#include "fofin/constructions.hpp"
#include "fofin/printer.hpp"

using namespace fofin;

namespace {

bool is_pow2(std::int64_t n) { return n > 0 && (n & (n - 1)) == 0; }

std::int64_t top_bit(std::int64_t n) {
  std::int64_t p = 1;
  while (p * 2 <= n) p *= 2;
  return p;
}

std::int64_t count_o(const std::string& w) { return static_cast<std::int64_t>(std::count(w.begin(), w.end(), 'o')); }

}  // namespace

TEST(MsbViaF, SpecExamples) {
  auto phi = build_msbz_via_F();
  NatEvaluator ev(msb_relations());
  EXPECT_EQ(f_square_log(7), nat{16});
  EXPECT_EQ(f_square_log(8), nat{512});
  EXPECT_EQ(f_square_log(512), nat{1} << 81);
  EXPECT_TRUE(ev.eval(phi.q, {{"n", 8}}));
  EXPECT_FALSE(ev.eval(phi.q, {{"n", 3}}));
  EXPECT_TRUE(ev.eval(phi.q, {{"n", 1}}));
  EXPECT_TRUE(ev.eval(phi.msb0, {{"n", 6}, {"m", 2}}));
  EXPECT_FALSE(ev.eval(phi.msb0, {{"n", 6}, {"m", 3}}));
}

TEST(MsbViaF, AgreesOverTheNaturals) {
  auto phi = build_msbz_via_F();
  NatEvaluator ev(msb_relations());
  for (std::int64_t n = 1; n <= 512; ++n) {
    ASSERT_EQ(ev.eval(phi.q, {{"n", static_cast<nat>(n)}}), is_pow2(n)) << n;
    for (std::int64_t m = 0; m <= 512; ++m)
      ASSERT_EQ(ev.eval(phi.msb0, {{"n", static_cast<nat>(n)}, {"m", static_cast<nat>(m)}}), m == n - top_bit(n))
          << n << "," << m;
  }
  auto [rq, rm] = check_msb_via_F(1, 512);
  EXPECT_TRUE(rq.ok());
  EXPECT_TRUE(rm.ok());
  EXPECT_EQ(rq.checks, 512u);
}

TEST(MsbViaF, ClippedUniverseBreaksIt) {
  // over 513 positions F(n) has no value in range from n = 16 on, so Q turns true there
  auto [rq, rm] = check_msb_via_F(1, 64, 513);
  EXPECT_FALSE(rq.ok());
  NatEvaluator ev(msb_relations(), nat{513});
  EXPECT_TRUE(ev.eval(build_msbz_via_F().q, {{"n", 20}}));
  EXPECT_TRUE(ev.eval(build_msbz_via_F().q, {{"n", 8}}));
  EXPECT_FALSE(ev.eval(build_msbz_via_F().q, {{"n", 6}}));
}

// the naturals evaluator under a universe bound against the word evaluator
TEST(MsbViaF, ClippedMatchesWordEvaluator) {
  PredicateRegistry reg;
  reg.add(builtin_predicate("plus"));
  reg.add(function_graph_predicate(
      "F",
      [](std::int64_t n) -> std::int64_t {
        if (n <= 0) return 0;
        int l = floor_log2(n);
        return l * l >= 62 ? kInf : std::int64_t{1} << (l * l);
      },
      "2^(log x)^2", false));
  auto phi = build_msbz_via_F();
  const std::int64_t len = 40;
  Word w(Alphabet("a"), std::string(len, 'a'));
  CompiledFormula cq(phi.q, reg, {"n"}), cm(phi.msb0, reg, {"n", "m"});
  NatEvaluator ev(msb_relations(), nat{len});
  for (std::int64_t n = 0; n < len; ++n) {
    std::int64_t v[1] = {n};
    ASSERT_EQ(cq.eval(w, std::span<const std::int64_t>(v, 1)), ev.eval(phi.q, {{"n", static_cast<nat>(n)}})) << n;
    for (std::int64_t m = 0; m < len; ++m) {
      std::int64_t vm[2] = {n, m};
      ASSERT_EQ(cm.eval(w, std::span<const std::int64_t>(vm, 2)),
                ev.eval(phi.msb0, {{"n", static_cast<nat>(n)}, {"m", static_cast<nat>(m)}}))
          << n << "," << m;
    }
  }
}

TEST(NatEvaluator, RejectsUnguarded) {
  NatEvaluator ev(msb_relations());
  EXPECT_THROW(ev.eval(parse_formula("exists x. !(x < n)"), {{"n", 3}}), EvalError);
  EXPECT_THROW(ev.eval(parse_formula("exists x. a(x)"), {}), EvalError);
  EXPECT_TRUE(ev.eval(parse_formula("forall x. (x < n -> exists s. F(x, s))"), {{"n", 5}}));
}

TEST(Independence, Examples) {
  auto w = independence_witness(3);
  EXPECT_EQ(w.b(0b101), 13);
  EXPECT_EQ(w.a, (std::vector<std::int64_t>{9, 10, 12}));
  auto& r = *w.predicate.rel;
  EXPECT_TRUE(r.contains(Tuple{9, 13}));
  EXPECT_FALSE(r.contains(Tuple{10, 13}));
  EXPECT_FALSE(r.contains(Tuple{3, 2}));
  EXPECT_THROW(independence_witness(0), ConstructionError);
  EXPECT_THROW(independence_witness(17), ConstructionError);
}

TEST(Independence, AllSubsets) {
  for (int n = 1; n <= 10; ++n) {
    auto r = check_independence(n);
    EXPECT_TRUE(r.ok()) << n;
    EXPECT_EQ(r.subsets, std::uint64_t{1} << n);
  }
}

TEST(Independence, FiniteDegree) {
  auto rep = verify_finite_degree(and_msb_predicate(), 1 << 12);
  EXPECT_TRUE(rep.ok()) << rep.problems.front();
  // 2^k is below every element of its block
  EXPECT_EQ(rep.argmax, 1 << 12);
}

TEST(Independence, CorruptedAndFailsTheScan) {
  EXPECT_TRUE(check_independence(6, corrupted_and_predicate()).ok());
  auto rep = verify_finite_degree(corrupted_and_predicate(), 64);
  EXPECT_FALSE(rep.ok());
}

TEST(Count, ConstCounter) {
  auto cf = count_up_to_const(2);
  EXPECT_EQ(quantifier_depth(cf.formula), 3u);
  PredicateRegistry none;
  Alphabet zo("zo");
  auto holds = [&](const std::string& w, std::int64_t c) { return evaluate(cf.formula, Word(zo, w), {{"c", c}}, none); };
  EXPECT_TRUE(holds("ozo", 2));
  EXPECT_FALSE(holds("ooo", 2));
  EXPECT_TRUE(holds("zzz", 0));
  EXPECT_THROW(count_up_to_const(5), ConstructionError);
}

TEST(Count, BruteForce) {
  Alphabet zo("zo");
  PredicateRegistry none;
  for (int kmax = 0; kmax <= 4; ++kmax) {
    CompiledFormula cf(count_up_to_const(kmax).formula, none, {"c"});
    for (int len = 1; len <= 8; ++len)
      for_each_word(zo, static_cast<std::size_t>(len), [&](const Word& w) {
        for (std::int64_t c = 0; c < len; ++c) {
          std::int64_t v[1] = {c};
          bool want = c <= kmax && c == count_o(w.str());
          ASSERT_EQ(cf.eval(w, std::span<const std::int64_t>(v, 1)), want) << w.str() << " c=" << c << " kmax=" << kmax;
        }
      });
  }
}

TEST(Count, IntervalVersion) {
  auto cf = count_up_to_const(2);
  Formula phi = count_to_interval(cf);
  EXPECT_EQ(free_variables(phi), (std::set<std::string>{"a", "b", "c"}));
  CompiledFormula c(phi, PredicateRegistry{}, {"a", "b", "c"});
  Word w(Alphabet("z"), std::string(9, 'z'));
  for (std::int64_t a = 0; a < 9; ++a)
    for (std::int64_t b = 0; b < 9; ++b)
      for (std::int64_t k = 0; k < 9; ++k) {
        std::int64_t v[3] = {a, b, k};
        bool want = k <= 2 && k == std::max<std::int64_t>(0, a - b);
        ASSERT_EQ(c.eval(w, std::span<const std::int64_t>(v, 3)), want) << a << b << k;
      }
}

TEST(Count, GraphFromCount) {
  auto F = graph_from_count(count_up_to_const(2));
  auto& r = *F.rel;
  EXPECT_TRUE(r.contains(Tuple{5, 2}));
  EXPECT_FALSE(r.contains(Tuple{5, 3}));
  EXPECT_TRUE(r.contains(Tuple{0, 0}));
  EXPECT_TRUE(r.contains(Tuple{1, 1}));
  EXPECT_FALSE(F.finite_degree);
}

TEST(Count, SumMatchesOracle) {
  for (int kmax : {1, 2, 3}) {
    auto s = sum_from_count(count_up_to_const(kmax));
    CompiledFormula psi(s.psi, s.registry, {"a", "b", "c"});
    for (int len = 1; len <= 12; ++len) {
      Word w(Alphabet("zo"), std::string(static_cast<std::size_t>(len), 'z'));
      for (std::int64_t a = 0; a < len; ++a)
        for (std::int64_t b = 0; b < len; ++b)
          for (std::int64_t c = 0; c < len; ++c) {
            std::int64_t v[3] = {a, b, c};
            bool want = a == b + std::min<std::int64_t>(c, kmax);
            ASSERT_EQ(psi.eval(w, std::span<const std::int64_t>(v, 3)), want) << a << "," << b << "," << c;
          }
    }
  }
  auto s = sum_from_count(count_up_to_const(2));
  Word w8(Alphabet("z"), std::string(8, 'z'));
  EXPECT_TRUE(evaluate(s.psi, w8, {{"a", 5}, {"b", 3}, {"c", 7}}, s.registry));
  EXPECT_FALSE(evaluate(s.psi, w8, {{"a", 5}, {"b", 3}, {"c", 1}}, s.registry));
  EXPECT_TRUE(evaluate(s.psi, w8, {{"a", 3}, {"b", 3}, {"c", 0}}, s.registry));
}

TEST(Count, MalformedInput) {
  CountFormula bad;
  bad.formula = parse_formula("exists x. a(x) & c < x");
  EXPECT_THROW(sum_from_count(bad), ConstructionError);
  bad.formula = parse_formula("exists x. o(x)");
  EXPECT_THROW(sum_from_count(bad), ConstructionError);
}

TEST(BitPrime, Examples) {
  auto bp = bit_translate("x");
  EXPECT_TRUE(pred_contains(bp, Tuple{5, 5}));
  EXPECT_FALSE(pred_contains(bp, Tuple{5, 6}));
  EXPECT_TRUE(pred_contains(bp, Tuple{5, 7}));
  EXPECT_FALSE(pred_contains(bp, Tuple{5, 4}));
  EXPECT_THROW(bit_translate("5 - x"), ConstructionError);
  EXPECT_THROW(bit_translate("3"), ConstructionError);
}

TEST(BitPrime, DegreeAgainstScan) {
  for (const char* f : {"x", "2*x", "x*x"}) {
    auto bp = bit_translate(f);
    auto rep = verify_finite_degree(bp, 256);
    EXPECT_TRUE(rep.ok()) << f << ": " << rep.problems.front();
    for (std::int64_t n = 0; n <= 256; ++n)
      for (auto& t : tuples_containing(bp, n)) ASSERT_TRUE(pred_contains(bp, t));
  }
  // n = 64 under identity: (64, 64 + 6) plus the x <= 64 whose shifted bit lands on 64
  auto bp = bit_translate("x");
  std::size_t brute = 0;
  for (std::int64_t x = 0; x <= 200; ++x)
    for (std::int64_t y = 0; y <= 200; ++y)
      if ((x == 64 || y == 64) && y >= x && y - x < 62 && (x >> (y - x) & 1)) ++brute;
  EXPECT_EQ(tuples_containing(bp, 64).size(), brute);
}

TEST(BitPrime, RecoversBit) {
  auto r = check_bit_recovery("x", 64);
  EXPECT_TRUE(r.ok()) << r.mismatches.front();
  EXPECT_EQ(r.checks, 65u * 65u);
}
