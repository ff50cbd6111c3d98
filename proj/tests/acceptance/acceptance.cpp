// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
//   acceptance            all criteria
//   acceptance 3 8        only criteria 3 and 8

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "fofin/fofin.hpp"

using namespace fofin;

namespace {

const char* kToy = "exists x. forall y. (a(x) & (x < y -> b(y)))";

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string words(std::initializer_list<std::string> parts) {
  std::string s;
  for (auto& p : parts) s += (s.empty() ? "" : "; ") + p;
  return s;
}

// ---------------------------------------------------------------------------------------------

Outcome protocol_soundness() {
  // k uniform in 0..3, families alternate, budgets cap the few double/k=3 triples whose padding
  // runs into the billions
  const int runs = 500;
  Alphabet al("abc");
  ProtocolOptions opt;
  opt.step_limit = 20'000'000;
  opt.alice_leaf_limit = 20'000'000;
  int agree = 0, disagree = 0, budget = 0;
  std::map<std::string, int> budget_by;
  std::string first_bad;
  for (int i = 0; i < runs; ++i) {
    const char* fam = i % 2 == 0 ? "succ" : "double";
    FormulaShape shape;
    shape.letters = "abc";
    shape.predicates = {{i % 2 == 0 ? "SUCC" : "DOUBLE", 2}};
    FormulaGenerator gen(shape, 0xACCE55 + static_cast<std::uint64_t>(i));
    shape.quantifiers = static_cast<int>(gen.rng().below(4));
    FormulaGenerator g2(shape, 0xACCE55 + static_cast<std::uint64_t>(i));
    Formula f = g2.next();
    auto& rng = g2.rng();
    Word u(al, rng.word("abc", rng.below(7))), v(al, rng.word("abc", rng.below(7)));
    char e = "abc"[rng.below(3)];
    try {
      auto t = run_protocol(f, u, v, family_by_name(fam), e, opt);
      if (t.result == *t.oracle_result) {
        ++agree;
      } else {
        ++disagree;
        if (first_bad.empty()) first_bad = print_formula(f) + " u=" + u.str() + " v=" + v.str();
      }
    } catch (const BudgetError&) {
      ++budget;
      ++budget_by[std::string(fam) + " k=" + std::to_string(shape.quantifiers)];
    }
  }
  std::ostringstream d;
  d << agree << "/" << runs << " agree, " << disagree << " disagree, " << budget << " over budget";
  for (auto& [k, n] : budget_by) d << " [" << k << ": " << n << "]";
  if (!first_bad.empty()) d << "; first disagreement " << first_bad;
  return {agree == runs, d.str()};
}

Outcome crane_beach_surrogate() {
  Alphabet al("abc");
  const char e = 'c';
  const char* formulas[] = {
      "exists x. a(x)",
      "exists x. exists y. (x < y & a(x) & b(y))",
      "forall x. (a(x) -> (exists y. (x < y & b(y))))",
  };
  auto reg = default_registry();
  std::vector<Word> ws;
  for (int len = 0; len <= 4; ++len) for_each_word(al, static_cast<std::size_t>(len), [&](const Word& w) { ws.push_back(w); });
  std::uint64_t runs = 0, agree = 0;
  std::string problems;
  for (const char* s : formulas) {
    Formula f = parse_formula(s);
    if (check_neutral_letter(f, e, al, 6, reg)) {
      problems += std::string(" not neutral: ") + s;
      continue;
    }
    CompiledFormula cf(f, reg);
    ProtocolOptions opt;
    opt.with_oracle = false;
    for (auto& u : ws)
      for (auto& v : ws) {
        auto t = run_protocol(f, u, v, family_by_name("succ"), e, opt);
        ++runs;
        if (t.result == cf.eval(u.concat(v))) ++agree;
      }
  }
  std::ostringstream d;
  d << agree << "/" << runs << " runs match membership of uv (3 formulas, |u|,|v| <= 4)" << problems;
  return {problems.empty() && agree == runs && runs == 3 * ws.size() * ws.size(), d.str()};
}

Outcome toy_fidelity() {
  Alphabet al("abc");
  const char e = 'b';
  auto fam = family_by_name("succ");
  Formula toy = parse_formula(kToy);
  PrenexFormula pf = to_prenex(toy);
  auto t = run_protocol(toy, Word(al, "aa"), Word(al, "bb"), fam, e);
  bool result_ok = t.result && t.oracle_result == std::optional<bool>(true);
  // the simplified form: all of Bob's part is b, or some a in Bob's part is followed only by b's
  const std::string reference =
      "(or (forall^B y [A] (leaf b(y))) (exists^B x [] (and (leaf a(x)) (forall^B y [B] (leaf (x < y -> b(y)))))))";
  parse_message(reference);
  Word u(al, "aa");
  std::uint64_t compared = 0, same = 0;
  for (int len = 0; len <= 5; ++len)
    for_each_word(al, static_cast<std::size_t>(len), [&](const Word& v) {
      std::int64_t len_uv = u.size() + v.size();
      Alice alice(pf, u, len_uv, fam, e);
      std::string msg = alice.run()->text;
      Bob b1(static_cast<int>(pf.k()), v, len_uv, fam, e), b2(static_cast<int>(pf.k()), v, len_uv, fam, e);
      ++compared;
      if (b1.run(msg) == b2.run(reference)) ++same;
    });
  std::ostringstream d;
  d << "result " << (t.result ? "true" : "false") << ", oracle " << (t.oracle_result.value_or(false) ? "true" : "false")
    << "; message agrees with the simplified formula on " << same << "/" << compared << " words v (|v| <= 5)";
  return {result_ok && same == compared, d.str()};
}

Outcome facts_minl_move() {
  std::uint64_t violations = 0, checks = 0, skipped = 0;
  for (const char* fam : {"succ", "double"}) {
    LinkContext c(family_by_name(fam));
    auto prev = c.bounds(1);
    for (std::int64_t p = 1; p <= 200; ++p) {
      auto [l, r] = c.bounds(p);
      checks += 4;
      violations += !(l < p) + !(p < r) + !(prev.first <= l) + !(prev.second <= r);
      prev = {l, r};
    }
    for (std::int64_t p = 0; p <= 120; ++p) {
      auto [lp, rp] = c.bounds(p);
      for (int n = 1; n <= 6; ++n)
        for (int m = 0; m < n; ++m) {
          ++checks;
          violations += !(iterate_link(c, LinkDir::L, m, iterate_link(c, LinkDir::R, n, p)) >= rp);
          // L^n(p) only exists while the iteration stays in N
          std::int64_t down = p;
          bool under = false;
          for (int i = 0; i < n && !under; ++i) {
            down = c.bounds(down).first;
            under = down < 0;
          }
          if (under) {
            ++skipped;
            continue;
          }
          ++checks;
          violations += !(iterate_link(c, LinkDir::R, m, down) <= lp);
        }
    }
  }
  std::ostringstream d;
  d << violations << " violations in " << checks << " checks (" << skipped << " L^n(p) below 0 skipped)";
  return {violations == 0, d.str()};
}

Outcome workzone_compiler() {
  auto reg = default_registry();
  Alphabet al("ab");
  const char* samples[] = {
      "exists x. exists y. (BIT(x, y) & a(x) & a(y))",
      "forall x. forall y. (SUCC(x, y) -> (a(x) -> b(y)))",
      "exists x. exists y. exists z. (DOUBLE(x, y) & SUCC(y, z) & a(x) & b(z))",
  };
  bool ok = true;
  std::string notes;
  std::uint64_t checked = 0;
  for (const char* s : samples) {
    Formula f = parse_formula(s);
    auto r = workzone_transform(f, reg, al);
    PredicateRegistry both = reg;
    both.merge(r.registry);
    auto ex = equivalent_up_to(f, r.formula, al, 12, both, VerifyBudget{1u << 12, -1, 0, 1});
    auto sm = equivalent_up_to(f, r.formula, al, 20, both, VerifyBudget{1u << 12, -1, 2000, 7});
    checked += ex.words_checked + sm.words_checked;
    if (ex.counterexample || sm.counterexample || ex.exhaustive_through != 12) {
      ok = false;
      notes += std::string(" counterexample for ") + s;
    }
  }
  auto z = zone_layout(30);
  bool zones_ok = z.zones[0] == std::pair<std::int64_t, std::int64_t>{0, 8} && z.zones[1] == std::pair<std::int64_t, std::int64_t>{8, 16} &&
                  z.zones[2] == std::pair<std::int64_t, std::int64_t>{16, 24} && z.zones[3] == std::pair<std::int64_t, std::int64_t>{24, 30};
  // the unique y with trans^3(13, y) over 30 positions
  auto zf = build_zone_formulas();
  CompiledFormula t3(zf.trans(3), reg, {"x", "y"});
  Word w(al, std::string(30, 'a'));
  std::vector<std::int64_t> hits;
  for (std::int64_t y = 0; y < 30; ++y) {
    std::int64_t v[2] = {13, y};
    if (t3.eval(w, std::span<const std::int64_t>(v, 2))) hits.push_back(y);
  }
  bool trans_ok = hits == std::vector<std::int64_t>{21};
  std::ostringstream d;
  d << "3 formulas, " << checked << " words, no counterexample: " << (ok ? "yes" : "no") << notes
    << "; zones of 30 = [0,8) [8,16) [16,24) [24,30): " << (zones_ok ? "yes" : "no")
    << "; trans3(13) = " << (hits.size() == 1 ? std::to_string(hits[0]) : std::to_string(hits.size()) + " values");
  return {ok && zones_ok && trans_ok, d.str()};
}

Outcome message_boundedness() {
  Alphabet al("abc");
  auto fam = family_by_name("succ");
  Formula toy = parse_formula(kToy);
  auto sb = message_size_bound(to_prenex(toy), fam.registry());
  ProtocolOptions opt;
  opt.with_oracle = false;
  Rng rng(6);
  std::vector<std::size_t> maxima;
  std::set<std::string> distinct;
  for (std::int64_t len : {8, 16, 32, 64, 128}) {
    std::size_t mx = 0;
    for (int i = 0; i < 50; ++i) {
      auto lu = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(len) + 1));
      Word u(al, rng.word("abc", lu)), v(al, rng.word("abc", static_cast<std::size_t>(len) - lu));
      auto t = run_protocol(toy, u, v, fam, 'b', opt);
      mx = std::max(mx, t.message_bytes());
      distinct.insert(t.message);
    }
    maxima.push_back(mx);
  }
  bool nonincreasing = true, bounded = true;
  for (std::size_t i = 0; i < maxima.size(); ++i) {
    if (i && maxima[i] > maxima[i - 1]) nonincreasing = false;
    if (static_cast<long double>(maxima[i]) > sb.bytes) bounded = false;
  }
  std::ostringstream d;
  d << "class maxima";
  for (auto m : maxima) d << " " << m;
  d << " bytes; bound " << static_cast<double>(sb.bytes) << "; " << distinct.size() << " distinct messages";
  return {nonincreasing && bounded, d.str()};
}

Outcome independence() {
  bool ok = true;
  std::uint64_t subsets = 0;
  for (int n = 1; n <= 10; ++n) {
    auto r = check_independence(n);
    ok = ok && r.ok();
    subsets += r.subsets;
  }
  auto fd = verify_finite_degree(and_msb_predicate(), std::int64_t{1} << 12);
  // degree of 2^12 by direct count: every y in its block contains it
  const auto& rel = *and_msb_predicate().rel;
  std::int64_t n = std::int64_t{1} << 12;
  std::size_t direct = 0;
  for (std::int64_t y = 0; y < 4 * n; ++y) direct += rel.contains(Tuple{n, y}) || rel.contains(Tuple{y, n});
  std::ostringstream d;
  d << subsets << " subsets over n = 1..10 " << (ok ? "all encoded" : "NOT all encoded") << "; AND_MSB degree scan to 2^12 "
    << (fd.ok() ? "ok" : "failed") << ", max degree " << fd.max_degree << " at " << fd.argmax << ", direct count at 2^12 = " << direct;
  return {ok && fd.ok() && fd.argmax == n && fd.max_degree == direct, d.str()};
}

Outcome msb_chain() {
  auto [rq, rm] = check_msb_via_F(1, 512);
  std::ostringstream d;
  d << "Q vs pow2 " << rq.passed << "/" << rq.checks << ", MSB0 vs msb0 " << rm.passed << "/" << rm.checks
    << " (evaluated over the naturals)";
  return {rq.ok() && rm.ok(), d.str()};
}

Outcome count_machinery() {
  const int kmax = 2;
  auto s = sum_from_count(count_up_to_const(kmax));
  CompiledFormula psi(s.psi, s.registry, {"a", "b", "c"});
  std::uint64_t checks = 0, good = 0;
  for (int len = 1; len <= 12; ++len) {
    Word w(Alphabet("zo"), std::string(static_cast<std::size_t>(len), 'z'));
    for (std::int64_t a = 0; a < len; ++a)
      for (std::int64_t b = 0; b < len; ++b)
        for (std::int64_t c = 0; c < len; ++c) {
          std::int64_t v[3] = {a, b, c};
          ++checks;
          good += psi.eval(w, std::span<const std::int64_t>(v, 3)) == (a == b + std::min<std::int64_t>(c, kmax));
        }
  }
  auto bp = bit_translate("x");
  auto fd = verify_finite_degree(bp, 256);
  std::uint64_t listed = 0, members = 0;
  for (std::int64_t n = 0; n <= 256; ++n)
    for (auto& t : tuples_containing(bp, n)) {
      ++listed;
      members += pred_contains(bp, t);
    }
  std::ostringstream d;
  d << "sum " << good << "/" << checks << "; BIT' degree scan to 256 " << (fd.ok() ? "ok" : "failed") << " (max degree "
    << fd.max_degree << "), " << members << "/" << listed << " enumerated tuples are members";
  return {good == checks && fd.ok() && members == listed, d.str()};
}

Outcome nerode() {
  Alphabet ab("ab");
  auto reg = default_registry();
  CompiledFormula has_a(parse_formula("exists x. a(x)"), reg);
  auto member = [&](const std::string& w) { return has_a.eval(Word(ab, w)); };
  std::string counts;
  bool ok = true;
  for (int p = 0; p <= 5; ++p) {
    auto n = nerode_classes(member, p, 6, ab);
    counts += (counts.empty() ? "" : " ") + std::to_string(n);
    ok = ok && n == 2;
  }
  return {ok, "classes for p = 0..5: " + counts};
}

Outcome infrastructure() {
  int roundtrip = 0;
  std::string first_bad;
  for (int i = 0; i < 1000; ++i) {
    FormulaShape shape;
    shape.letters = "abc";
    shape.predicates = {{"SUCC", 2}, {"PLUS", 3}, {"POW2", 1}};
    shape.quantifiers = i % 5;
    shape.free_vars = i % 3 == 0 ? std::vector<std::string>{"u"} : std::vector<std::string>{};
    FormulaGenerator gen(shape, 0x5EED + static_cast<std::uint64_t>(i));
    Formula f = gen.next();
    std::string text = print_formula(f);
    Formula g = parse_formula(text);
    if (g == f && print_formula(g) == text)
      ++roundtrip;
    else if (first_bad.empty())
      first_bad = text;
  }
  // the same seeded work twice must serialize identically
  auto reports = [] {
    json all = json::array();
    Alphabet al("abc");
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
      FormulaShape shape;
      shape.letters = "abc";
      shape.predicates = {{"SUCC", 2}};
      shape.quantifiers = 1 + i % 2;
      FormulaGenerator gen(shape, rng.next());
      Formula f = gen.next();
      Word u(al, rng.word("abc", rng.below(5))), v(al, rng.word("abc", rng.below(5)));
      all.push_back(transcript_to_json(run_protocol(f, u, v, family_by_name("succ"), 'c')));
    }
    json demo = report_header("demo");
    demo["check"] = range_check_to_json(check_msb_via_F(1, 40).second);
    all.push_back(demo);
    all.push_back(registry_to_json(default_registry()));
    return all.dump();
  };
  bool same = reports() == reports();
  std::ostringstream d;
  d << roundtrip << "/1000 formulas round-trip; repeated JSON reports " << (same ? "byte-identical" : "DIFFER");
  if (!first_bad.empty()) d << "; first failure " << first_bad;
  return {roundtrip == 1000 && same, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all = {
      {1, "protocol soundness on 500 random triples", protocol_soundness},
      {2, "neutral-letter formulas: protocol decides uv", crane_beach_surrogate},
      {3, "toy example result and message", toy_fidelity},
      {4, "link graph facts minl and move", facts_minl_move},
      {5, "work-zone compiler", workzone_compiler},
      {6, "message size stays bounded", message_boundedness},
      {7, "independence witness and AND_MSB degree", independence},
      {8, "powers of two and MSB0 from F", msb_chain},
      {9, "count, sum and BIT' machinery", count_machinery},
      {10, "Nerode classes of 'contains an a'", nerode},
      {11, "parser round-trip and deterministic JSON", infrastructure},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.id == 1 && secs > 300) {
      o.pass = false;
      o.detail += "; over the 5 minute limit";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1fs", secs);
    std::cout << "criterion " << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << c.name << " (" << buf << ")\n"
              << "    " << o.detail << std::endl;
    failed += !o.pass;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
  return failed ? 1 : 0;
}
