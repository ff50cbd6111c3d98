// fofin: command-line front end.
//
// Exit codes: 0 = true / check passed, 1 = false / check failed, 2 = error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "fofin/fofin.hpp"

using namespace fofin;

namespace {

struct Common {
  std::string formula;
  std::string formula_file;
  std::string registry;
  std::string alphabet = "abc";
  bool json = false;
  std::uint64_t seed = 1;
};

void add_formula(CLI::App* c, Common& o) {
  c->add_option("-f,--formula", o.formula, "formula text");
  c->add_option("--formula-file", o.formula_file, "file holding the formula ('#' starts a comment line)");
}

void add_registry(CLI::App* c, Common& o) { c->add_option("--registry", o.registry, "predicate registry JSON"); }

std::string read_formula_text(const Common& o) {
  if (!o.formula.empty() && !o.formula_file.empty()) throw Error("give --formula or --formula-file, not both");
  if (!o.formula.empty()) return o.formula;
  if (o.formula_file.empty()) throw Error("no formula given (--formula or --formula-file)");
  std::ifstream in(o.formula_file);
  if (!in) throw Error("cannot open " + o.formula_file);
  std::string line, text;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] == '#') continue;
    text += line + "\n";
  }
  return text;
}

Formula read_formula(const Common& o) { return parse_formula(read_formula_text(o)); }

PredicateRegistry read_registry(const Common& o) {
  return o.registry.empty() ? default_registry() : load_registry_file(o.registry);
}

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

const char* tf(bool b) { return b ? "true" : "false"; }

Assignment parse_assignments(const std::vector<std::string>& items) {
  Assignment a;
  for (auto& s : items) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw Error("assignment '" + s + "' is not var=value");
    try {
      a[s.substr(0, eq)] = std::stoll(s.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error("assignment '" + s + "' has a bad value");
    }
  }
  return a;
}

std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
  if (out.empty()) throw Error("empty list '" + s + "'");
  return out;
}

// ---------------------------------------------------------------------------------------------

int cmd_eval(const Common& o, const std::string& word, const std::vector<std::string>& assign) {
  Formula f = read_formula(o);
  auto reg = read_registry(o);
  Word w(Alphabet(o.alphabet), word);
  bool r = evaluate(f, w, parse_assignments(assign), reg);
  if (o.json) {
    json j = report_header("eval");
    j["formula"] = print_formula(f);
    j["word"] = word;
    j["result"] = r;
    emit(j);
  } else {
    std::cout << tf(r) << "\n";
  }
  return r ? 0 : 1;
}

VerifyBudget verify_budget(std::uint64_t samples, std::uint64_t seed) {
  VerifyBudget b;
  b.samples_per_length = samples;
  b.seed = seed;
  return b;
}

int cmd_equiv(const Common& o, const std::string& other, int maxlen, std::uint64_t samples) {
  Formula f = read_formula(o), g = parse_formula(other);
  auto reg = read_registry(o);
  auto rep = equivalent_up_to(f, g, Alphabet(o.alphabet), maxlen, reg, verify_budget(samples, o.seed));
  bool eq = !rep.counterexample;
  if (o.json) {
    json j = report_header("equiv");
    j["equivalent"] = eq;
    j["max_len"] = maxlen;
    j["exhaustive_through"] = rep.exhaustive_through;
    j["words_checked"] = rep.words_checked;
    if (!eq) j["counterexample"] = {{"word", rep.counterexample->str()}, {"first", rep.f_value}, {"second", rep.g_value}};
    emit(j);
  } else {
    std::cout << "equivalent: " << tf(eq) << " (" << rep.words_checked << " words, exhaustive through length "
              << rep.exhaustive_through << ")\n";
    if (!eq) std::cout << "counterexample: \"" << rep.counterexample->str() << "\"\n";
  }
  return eq ? 0 : 1;
}

int cmd_neutral(const Common& o, char e, int maxlen) {
  Formula f = read_formula(o);
  auto v = check_neutral_letter(f, e, Alphabet(o.alphabet), maxlen, read_registry(o));
  if (o.json) {
    json j = report_header("neutral-check");
    j["neutral"] = std::string(1, e);
    j["max_len"] = maxlen;
    j["neutral_ok"] = !v;
    if (v) j["violation"] = {v->shorter.str(), v->longer.str()};
    emit(j);
  } else if (v) {
    std::cout << "not neutral: \"" << v->shorter.str() << "\" vs \"" << v->longer.str() << "\"\n";
  } else {
    std::cout << "neutral up to length " << maxlen << "\n";
  }
  return v ? 1 : 0;
}

int cmd_transform(const Common& o, int maxlen, std::uint64_t samples) {
  Formula f = read_formula(o);
  auto reg = read_registry(o);
  Alphabet al(o.alphabet);
  auto tr = workzone_transform(f, reg, al);
  PredicateRegistry both = reg;
  both.merge(tr.registry);
  auto rep = equivalent_up_to(f, tr.formula, al, maxlen, both, verify_budget(samples, o.seed));
  bool eq = !rep.counterexample;
  // the wrapped predicates refer to their bases by name
  PredicateRegistry out = tr.registry;
  for (auto& d : tr.wrapped)
    if (auto w = std::dynamic_pointer_cast<const WrappedRelation>(d.rel)) out.add_or_replace(reg.at(w->base_name()));
  if (o.json) {
    json j = report_header("transform");
    j["formula"] = print_formula(f);
    j["transformed"] = print_formula(tr.formula);
    j["registry"] = registry_to_json(out);
    j["equivalent"] = eq;
    j["max_len"] = maxlen;
    j["words_checked"] = rep.words_checked;
    if (!eq) j["counterexample"] = rep.counterexample->str();
    emit(j);
  } else {
    std::cout << "transformed: " << print_formula(tr.formula) << "\n";
    std::cout << "registry: " << registry_to_json(out).dump() << "\n";
    std::cout << "equivalent: " << tf(eq) << "\n";
    if (!eq) std::cout << "counterexample: \"" << rep.counterexample->str() << "\"\n";
  }
  return eq ? 0 : 1;
}

struct ProtoArgs {
  std::string u, v, family = "succ", lengths = "8,16,32,64,128";
  char neutral = 'b';
  std::uint64_t samples = 50;
  std::uint64_t step_limit = 0;
  int p = 3, maxlen = 6;
};

int cmd_protocol_run(const Common& o, const ProtoArgs& a) {
  Formula f = read_formula(o);
  Alphabet al(o.alphabet);
  ProtocolOptions opt;
  opt.step_limit = a.step_limit;
  auto t = run_protocol(f, Word(al, a.u), Word(al, a.v), family_by_name(a.family), a.neutral, opt);
  if (o.json) {
    emit(transcript_to_json(t));
  } else {
    std::cout << "prenex: " << t.prenex << "\n"
              << "N = " << t.params.N << ", l0 = " << t.params.l0 << ", r0 = " << t.params.r0 << "\n"
              << "message (" << t.message_bytes() << " bytes): " << t.message << "\n"
              << "result: " << tf(t.result) << "\n";
    if (t.oracle_result) std::cout << "oracle: " << tf(*t.oracle_result) << "\n";
  }
  if (t.oracle_result && *t.oracle_result != t.result) return 1;
  return t.result ? 0 : 1;
}

int cmd_protocol_sweep(const Common& o, const ProtoArgs& a) {
  Formula f = read_formula(o);
  Alphabet al(o.alphabet);
  auto fam = family_by_name(a.family);
  auto sb = message_size_bound(to_prenex(f), fam.registry());
  Rng rng(o.seed);
  ProtocolOptions opt;
  opt.with_oracle = false;
  opt.step_limit = a.step_limit;
  json rows = json::array();
  bool within = true;
  for (auto len : parse_int_list(a.lengths)) {
    std::size_t mx = 0, total = 0;
    for (std::uint64_t i = 0; i < a.samples; ++i) {
      auto lu = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(len) + 1));
      Word u(al, rng.word(o.alphabet, lu)), v(al, rng.word(o.alphabet, static_cast<std::size_t>(len) - lu));
      auto t = run_protocol(f, u, v, fam, a.neutral, opt);
      mx = std::max(mx, t.message_bytes());
      total += t.message_bytes();
    }
    within = within && static_cast<long double>(mx) <= sb.bytes;
    rows.push_back({{"length", len},
                    {"runs", a.samples},
                    {"max_bytes", mx},
                    {"mean_bytes", a.samples ? static_cast<double>(total) / static_cast<double>(a.samples) : 0.0}});
  }
  if (o.json) {
    json j = report_header("protocol-sweep");
    j["formula"] = print_formula(f);
    j["family"] = a.family;
    j["seed"] = o.seed;
    j["bound_bytes"] = static_cast<double>(sb.bytes);
    j["rows"] = rows;
    j["within_bound"] = within;
    emit(j);
  } else {
    std::cout << "length  runs  max_bytes  mean_bytes\n";
    for (auto& r : rows)
      std::cout << r["length"] << "  " << r["runs"] << "  " << r["max_bytes"] << "  " << r["mean_bytes"] << "\n";
    std::cout << "size bound: " << static_cast<double>(sb.bytes) << " bytes, within: " << tf(within) << "\n";
  }
  return within ? 0 : 1;
}

int cmd_protocol_nerode(const Common& o, const ProtoArgs& a) {
  Formula f = read_formula(o);
  auto reg = read_registry(o);
  Alphabet al(o.alphabet);
  CompiledFormula cf(f, reg);
  auto member = [&](const std::string& w) { return cf.eval(Word(al, w)); };
  auto n = nerode_classes(member, a.p, a.maxlen, al);
  if (o.json) {
    json j = report_header("nerode");
    j["formula"] = print_formula(f);
    j["suffix_length"] = a.p;
    j["max_prefix_len"] = a.maxlen;
    j["classes"] = n;
    emit(j);
  } else {
    std::cout << "classes: " << n << "\n";
  }
  return 0;
}

int cmd_linkgraph(const Common& o, const std::string& family, std::int64_t from, std::int64_t to) {
  LinkContext ctx(family_by_name(family));
  json rows = json::array();
  for (std::int64_t p = from; p <= to; ++p) {
    auto [l, r] = ctx.bounds(p);
    rows.push_back({{"p", p}, {"L", l}, {"R", r}});
  }
  if (o.json) {
    json j = report_header("linkgraph");
    j["family"] = family;
    j["rows"] = rows;
    emit(j);
  } else {
    std::cout << "p  L(p)  R(p)\n";
    for (auto& r : rows) std::cout << r["p"] << "  " << r["L"] << "  " << r["R"] << "\n";
  }
  return 0;
}

int cmd_demo(const Common& o, const std::string& which, int n, int k) {
  json j = report_header("demo");
  j["name"] = which;
  bool ok = true;
  std::ostringstream text;
  if (which == "msb-via-f") {
    int hi = n > 0 ? n : 512;
    auto [rq, rm] = check_msb_via_F(1, hi);
    auto [cq, cm] = check_msb_via_F(1, std::min(hi, 64), static_cast<std::int64_t>(hi) + 1);
    auto phi = build_msbz_via_F();
    j["Q"] = print_formula(phi.q);
    j["MSB0"] = print_formula(phi.msb0);
    j["naturals"] = {range_check_to_json(rq), range_check_to_json(rm)};
    j["clipped_universe"] = hi + 1;
    j["clipped"] = {range_check_to_json(cq), range_check_to_json(cm)};
    ok = rq.ok() && rm.ok();
    text << "Q = pow2 on [1, " << hi << "]: " << rq.passed << "/" << rq.checks << "\n"
         << "MSB0 = msb0 on [1, " << hi << "] x [0, " << hi << "]: " << rm.passed << "/" << rm.checks << "\n"
         << "clipped to " << hi + 1 << " positions, Q on [1, " << std::min(hi, 64) << "]: " << cq.passed << "/" << cq.checks
         << "\n";
  } else if (which == "independence") {
    int m = n > 0 ? n : 10;
    auto r = check_independence(m);
    auto fd = verify_finite_degree(and_msb_predicate(), std::int64_t{1} << std::min(m + 2, 12));
    auto bad = verify_finite_degree(corrupted_and_predicate(), 64);
    j["n"] = m;
    j["range"] = {0, m - 1};
    j["subsets"] = r.subsets;
    j["checks_passed"] = r.subsets_ok;
    j["degree"] = degree_report_to_json(fd);
    j["unguarded_and_degree_ok"] = bad.ok();
    ok = r.ok() && fd.ok() && !bad.ok();
    text << r.subsets_ok << "/" << r.subsets << " subsets OK\n"
         << "AND_MSB max degree " << fd.max_degree << " up to " << fd.upto << " (" << (fd.ok() ? "ok" : "FAILED") << ")\n"
         << "AND without msb guard: degree scan " << (bad.ok() ? "passed (unexpected)" : "fails as expected") << "\n";
  } else if (which == "count-sum") {
    int kmax = k >= 0 ? k : 2;
    int maxw = n > 0 ? n : 12;
    auto cf = count_up_to_const(kmax);
    auto s = sum_from_count(cf);
    CompiledFormula psi(s.psi, s.registry, {"a", "b", "c"});
    RangeCheck rc{"psi(a,b,c) = (a = b + f(c))", 1, maxw};
    for (int len = 1; len <= maxw; ++len) {
      Word w(Alphabet("zo"), std::string(static_cast<std::size_t>(len), 'z'));
      for (std::int64_t a = 0; a < len; ++a)
        for (std::int64_t b = 0; b < len; ++b)
          for (std::int64_t c = 0; c < len; ++c) {
            std::int64_t v[3] = {a, b, c};
            bool want = a == b + std::min<std::int64_t>(c, kmax);
            rc.record(psi.eval(w, std::span<const std::int64_t>(v, 3)) == want,
                      std::to_string(len) + ":" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c));
          }
    }
    j["count_formula"] = print_formula(cf.formula);
    j["interval_formula"] = print_formula(s.interval);
    j["psi"] = print_formula(s.psi);
    j["check"] = range_check_to_json(rc);
    ok = rc.ok();
    text << "psi = " << print_formula(s.psi) << "\n"
         << "a = b + min(c, " << kmax << ") for |w| <= " << maxw << ": " << rc.passed << "/" << rc.checks << "\n";
  } else if (which == "bit-prime") {
    int upto = n > 0 ? n : 256;
    auto bp = bit_translate("x");
    auto fd = verify_finite_degree(bp, upto);
    std::uint64_t coherent = 0, listed = 0;
    for (std::int64_t v = 0; v <= upto; ++v)
      for (auto& t : tuples_containing(bp, v)) {
        ++listed;
        if (pred_contains(bp, t)) ++coherent;
      }
    auto rec = check_bit_recovery("x", 64);
    j["degree"] = degree_report_to_json(fd);
    j["listed_tuples"] = listed;
    j["listed_members"] = coherent;
    j["recovery"] = range_check_to_json(rec);
    ok = fd.ok() && coherent == listed && rec.ok();
    text << "BIT' (f = x) degree scan to " << upto << ": " << (fd.ok() ? "ok" : "FAILED") << ", max degree "
         << fd.max_degree << "\n"
         << "enumerated tuples that are members: " << coherent << "/" << listed << "\n"
         << "BIT recovered on [0,64]^2: " << rec.passed << "/" << rec.checks << "\n";
  } else {
    throw Error("unknown demo '" + which + "' (msb-via-f, independence, count-sum, bit-prime)");
  }
  j["ok"] = ok;
  if (o.json)
    emit(j);
  else
    std::cout << text.str();
  return ok ? 0 : 1;
}

int cmd_verify_fd(const Common& o, const std::string& family, const std::vector<std::string>& names, std::int64_t upto) {
  std::vector<PredicateDef> defs;
  if (!names.empty()) {
    auto reg = read_registry(o);
    for (auto& n : names) defs.push_back(reg.at(normalize_predicate_name(n)));
  } else {
    defs = family_by_name(family).defs;
  }
  json reps = json::array();
  bool ok = true;
  for (auto& d : defs) {
    auto r = verify_finite_degree(d, upto);
    ok = ok && r.ok();
    reps.push_back(degree_report_to_json(r));
    if (!o.json) {
      std::cout << d.name << ": " << (r.ok() ? "ok" : "FAILED") << ", max degree " << r.max_degree << " at " << r.argmax
                << " (values <= " << upto << ")\n";
      for (auto& p : r.problems) std::cout << "  " << p << "\n";
    }
  }
  if (o.json) {
    json j = report_header("verify-fd");
    j["reports"] = reps;
    emit(j);
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-order logic over words with numerical predicates"};
  app.require_subcommand(1);
  app.fallthrough();
  Common o;
  app.add_flag("--json", o.json, "machine-readable output");
  app.add_option("--seed", o.seed, "seed for every randomized check");
  app.add_option("--alphabet", o.alphabet, "word alphabet");

  std::string word;
  std::vector<std::string> assign;
  auto* eval = app.add_subcommand("eval", "evaluate a formula on a word");
  add_formula(eval, o);
  add_registry(eval, o);
  eval->add_option("-w,--word", word, "the word")->required();
  eval->add_option("--assign", assign, "free variable values, var=value");

  std::string other;
  int maxlen = 6;
  std::uint64_t samples = 0;
  auto* equiv = app.add_subcommand("equiv", "compare two formulas on all short words");
  add_formula(equiv, o);
  add_registry(equiv, o);
  equiv->add_option("-g,--other", other, "second formula")->required();
  equiv->add_option("--maxlen", maxlen, "longest word length");
  equiv->add_option("--samples", samples, "samples per length beyond the exhaustive range");

  char neutral = 'b';
  auto* neut = app.add_subcommand("neutral-check", "check that a letter is neutral");
  add_formula(neut, o);
  add_registry(neut, o);
  neut->add_option("--neutral", neutral, "the letter")->required();
  neut->add_option("--maxlen", maxlen, "longest word length");

  int tmaxlen = 12;
  std::uint64_t tsamples = 0;
  auto* trans = app.add_subcommand("transform", "rewrite into work-zone form and check equivalence");
  add_formula(trans, o);
  add_registry(trans, o);
  trans->add_option("--maxlen", tmaxlen, "equivalence check length");
  trans->add_option("--samples", tsamples, "samples per length beyond the exhaustive range");

  ProtoArgs pa;
  auto* proto = app.add_subcommand("protocol", "two-party protocol");
  proto->require_subcommand(1);
  auto* prun = proto->add_subcommand("run", "one protocol run");
  add_formula(prun, o);
  prun->add_option("--u", pa.u, "Alice's word");
  prun->add_option("--v", pa.v, "Bob's word");
  prun->add_option("--family", pa.family, "predicate family: succ, double, pow2 or a comma list");
  prun->add_option("--neutral", pa.neutral, "neutral letter");
  prun->add_option("--step-limit", pa.step_limit, "evaluation step budget (0 = none)");
  auto* psweep = proto->add_subcommand("sweep", "message size over random splits of growing length");
  add_formula(psweep, o);
  psweep->add_option("--family", pa.family, "predicate family");
  psweep->add_option("--neutral", pa.neutral, "neutral letter");
  psweep->add_option("--lengths", pa.lengths, "comma list of |u|+|v|");
  psweep->add_option("--samples", pa.samples, "runs per length");
  psweep->add_option("--step-limit", pa.step_limit, "evaluation step budget (0 = none)");
  auto* pner = proto->add_subcommand("nerode", "count suffix classes of the language of a formula");
  add_formula(pner, o);
  add_registry(pner, o);
  pner->add_option("--p", pa.p, "suffix length");
  pner->add_option("--maxlen", pa.maxlen, "longest prefix");

  std::string lfamily = "succ";
  std::int64_t from = 0, to = 20;
  auto* link = app.add_subcommand("linkgraph", "print L(p) and R(p)");
  link->add_option("--family", lfamily, "predicate family");
  link->add_option("--from", from, "first p");
  link->add_option("--to", to, "last p");

  std::string which;
  int dn = 0, dk = -1;
  auto* demo = app.add_subcommand("demo", "definability constructions");
  demo->add_option("which", which, "msb-via-f | independence | count-sum | bit-prime")->required();
  demo->add_option("--n", dn, "size parameter (range, subset count or word length)");
  demo->add_option("--k", dk, "counting bound for count-sum");

  std::string vfamily = "succ,double";
  std::vector<std::string> vnames;
  std::int64_t upto = 256;
  auto* vfd = app.add_subcommand("verify-fd", "cross-check tuple enumeration against a membership scan");
  add_registry(vfd, o);
  vfd->add_option("--family", vfamily, "predicate family");
  vfd->add_option("--name", vnames, "predicate names from the registry (overrides --family)");
  vfd->add_option("--upto", upto, "largest value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*eval) return cmd_eval(o, word, assign);
    if (*equiv) return cmd_equiv(o, other, maxlen, samples);
    if (*neut) return cmd_neutral(o, neutral, maxlen);
    if (*trans) return cmd_transform(o, tmaxlen, tsamples);
    if (*prun) return cmd_protocol_run(o, pa);
    if (*psweep) return cmd_protocol_sweep(o, pa);
    if (*pner) return cmd_protocol_nerode(o, pa);
    if (*link) return cmd_linkgraph(o, lfamily, from, to);
    if (*demo) return cmd_demo(o, which, dn, dk);
    if (*vfd) return cmd_verify_fd(o, vfamily, vnames, upto);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
