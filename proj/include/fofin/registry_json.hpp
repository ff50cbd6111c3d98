#pragma once

// JSON for predicate registries, protocol transcripts and construction reports.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fofin/constructions.hpp"
#include "fofin/error.hpp"
#include "fofin/predicates.hpp"
#include "fofin/protocol.hpp"
#include "fofin/workzone.hpp"

namespace fofin {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline json report_header(const std::string& kind) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["report"] = kind;
  return j;
}

// {"name":..,"kind":"table","tuples_rule":"x,x+1"} | {"kind":"table","arity":2,"tuples":[[..]]}
// | {"kind":"function_graph","expr":"2*x"} | {"kind":"builtin","tag":"msb0"}
// | {"kind":"wrapped","base":"SUCC","zones":[2,3]}  (base must already be known)
inline PredicateDef predicate_from_json(const json& j, const PredicateRegistry& known) {
  if (!j.is_object()) throw PredicateError("predicate entry must be an object");
  auto str = [&](const char* key) -> std::string {
    if (!j.contains(key) || !j[key].is_string()) throw PredicateError(std::string("predicate entry needs string field '") + key + "'");
    return j[key].get<std::string>();
  };
  std::string name = str("name"), kind = str("kind");
  bool fd = j.value("finite_degree", false);
  PredicateDef d;
  if (kind == "builtin") {
    d = builtin_predicate(str("tag"), name);
  } else if (kind == "table") {
    if (j.contains("tuples_rule")) {
      d = rule_table_predicate(name, str("tuples_rule"), fd);
    } else if (j.contains("tuples")) {
      if (!j.contains("arity")) throw PredicateError("explicit table " + name + " needs an arity");
      std::vector<Tuple> ts;
      for (auto& t : j["tuples"]) ts.push_back(t.get<Tuple>());
      d = explicit_table_predicate(name, j["arity"].get<int>(), std::move(ts));
      d.finite_degree = fd;
    } else {
      throw PredicateError("table " + name + " needs tuples or tuples_rule");
    }
  } else if (kind == "function_graph") {
    d = function_graph_predicate(name, str("expr"), fd);
  } else if (kind == "wrapped") {
    const auto& base = known.at(normalize_predicate_name(str("base")));
    d = wrap_predicate(base, j.at("zones").get<std::vector<int>>());
    d.name = normalize_predicate_name(name);
  } else {
    throw PredicateError("unknown predicate kind '" + kind + "'");
  }
  if (j.contains("arity") && j["arity"].get<int>() != d.arity)
    throw PredicateError(name + ": declared arity " + std::to_string(j["arity"].get<int>()) + ", definition has " +
                         std::to_string(d.arity));
  return d;
}

// Entries are added on top of `base`; later entries may refer to earlier ones.
inline PredicateRegistry registry_from_json(const json& j, PredicateRegistry base = default_registry()) {
  if (!j.is_object() || !j.contains("predicates") || !j["predicates"].is_array())
    throw PredicateError("registry JSON needs a \"predicates\" array");
  for (auto& e : j["predicates"]) base.add_or_replace(predicate_from_json(e, base));
  return base;
}

inline PredicateRegistry load_registry_file(const std::string& path, PredicateRegistry base = default_registry()) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open registry file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw PredicateError(path + ": " + e.what());
  }
  return registry_from_json(j, std::move(base));
}

// Round-trippable where the definition allows it; anything built from code is marked "derived".
inline json predicate_to_json(const PredicateDef& d) {
  json j;
  j["name"] = d.name;
  j["arity"] = d.arity;
  j["finite_degree"] = d.finite_degree;
  if (auto w = std::dynamic_pointer_cast<const WrappedRelation>(d.rel)) {
    j["kind"] = "wrapped";
    j["base"] = w->base_name();
    j["zones"] = w->zones();
    return j;
  }
  switch (d.kind) {
    case PredicateKind::Builtin:
      j["kind"] = "builtin";
      j["tag"] = d.detail;
      break;
    case PredicateKind::Table:
      j["kind"] = "table";
      if (auto t = std::dynamic_pointer_cast<const ExplicitTableRelation>(d.rel))
        j["tuples"] = t->tuples();
      else
        j["tuples_rule"] = d.detail;
      break;
    case PredicateKind::FunctionGraph:
      j["kind"] = "function_graph";
      j["expr"] = d.detail;
      break;
    case PredicateKind::Derived:
      j["kind"] = "derived";
      j["detail"] = d.detail;
      break;
  }
  return j;
}

// Registry order is by name; wrapped entries go last so a reader sees their bases first.
inline json registry_to_json(const PredicateRegistry& reg) {
  json arr = json::array(), wrapped = json::array();
  for (auto& [name, d] : reg.defs()) {
    json e = predicate_to_json(d);
    (e["kind"] == "wrapped" ? wrapped : arr).push_back(std::move(e));
  }
  for (auto& e : wrapped) arr.push_back(std::move(e));
  json j;
  j["predicates"] = std::move(arr);
  return j;
}

inline json params_to_json(const ProtocolParams& p) {
  json j;
  j["k"] = p.k;
  j["n_total"] = p.n_total;
  j["l0"] = p.l0;
  j["r0"] = p.r0;
  j["N"] = p.N;
  j["len_u"] = p.len_u;
  j["len_v"] = p.len_v;
  j["neutral"] = std::string(1, p.neutral);
  j["total_length"] = p.total();
  return j;
}

inline json transcript_to_json(const Transcript& t) {
  json j = report_header("protocol");
  j["formula"] = t.formula;
  j["prenex"] = t.prenex;
  j["family"] = t.family;
  j["u"] = t.u;
  j["v"] = t.v;
  j["params"] = params_to_json(t.params);
  j["rounds"] = 1;  // Alice speaks once
  j["message"] = t.message;
  j["message_bytes"] = t.message_bytes();
  j["result"] = t.result;
  j["oracle_result"] = t.oracle_result ? json(*t.oracle_result) : json(nullptr);
  return j;
}

inline json range_check_to_json(const RangeCheck& r) {
  json j;
  j["name"] = r.name;
  j["range"] = {r.lo, r.hi};
  j["checks"] = r.checks;
  j["checks_passed"] = r.passed;
  j["ok"] = r.ok();
  j["mismatches"] = r.mismatches;
  return j;
}

inline json degree_report_to_json(const DegreeReport& r) {
  json j;
  j["name"] = r.name;
  j["upto"] = r.upto;
  j["max_degree"] = r.max_degree;
  j["argmax"] = r.argmax;
  j["ok"] = r.ok();
  j["problems"] = r.problems;
  return j;
}

}  // namespace fofin
