// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include "ssr/codec.hpp"

#include <charconv>

#include "ssr/error.hpp"

namespace ssr {

std::string canonical(const Json& value) {
  return value.dump(-1, ' ', false, Json::error_handler_t::replace);
}

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::malformed_document, std::string(what) + ": " + e.what());
  }
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& msg) {
  throw Error(ErrorKind::malformed_document, where + ": " + msg);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where, "must be an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing \"") + key + "\"");
  return *it;
}

const Json* optional_field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

NodeId node_value(const Json& v, const std::string& where) {
  if (v.is_number_unsigned()) return NodeId{v.get<std::uint64_t>()};
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return NodeId{static_cast<std::uint64_t>(v.get<std::int64_t>())};
  }
  bad(where, "node id must be a non-negative integer");
}

std::string string_value(const Json& v, const std::string& where) {
  if (!v.is_string()) bad(where, "must be a string");
  return v.get<std::string>();
}

std::vector<NodeId> node_list(const Json& v, const std::string& where) {
  if (!v.is_array()) bad(where, "must be an array of node ids");
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(node_value(v[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

template <typename T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<std::string> opt_string(const Json& j, const char* key, const std::string& where) {
  const Json* v = optional_field(j, key);
  if (!v) return std::nullopt;
  return string_value(*v, where + "." + key);
}

std::optional<double> opt_number(const Json& j, const char* key, const std::string& where) {
  const Json* v = optional_field(j, key);
  if (!v) return std::nullopt;
  if (!v->is_number()) bad(where + "." + key, "must be a number");
  return v->get<double>();
}

std::optional<bool> opt_bool(const Json& j, const char* key, const std::string& where) {
  const Json* v = optional_field(j, key);
  if (!v) return std::nullopt;
  if (!v->is_boolean()) bad(where + "." + key, "must be a boolean");
  return v->get<bool>();
}

std::size_t index_value(const Json& v, const std::string& where) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    bad(where, "must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

Json to_json(const Subgraph& g) {
  Json central = Json::array();
  for (NodeId n : g.central) central.push_back(n.value);
  Json neighbors = Json::array();
  for (NodeId n : g.neighbors) neighbors.push_back(n.value);
  Json edges = Json::array();
  for (const Edge& e : g.edges) edges.push_back({e.a.value, e.b.value});
  return {{"central", std::move(central)}, {"neighbors", std::move(neighbors)}, {"edges", std::move(edges)}};
}

Subgraph subgraph_from_json(const Json& j) {
  const std::string where = "subgraph";
  Subgraph g;
  g.central = node_list(field(j, "central", where), where + ".central");
  for (NodeId n : node_list(field(j, "neighbors", where), where + ".neighbors")) g.neighbors.insert(n);
  const Json& edges = field(j, "edges", where);
  if (!edges.is_array()) bad(where + ".edges", "must be an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string w = where + ".edges[" + std::to_string(i) + "]";
    if (!edges[i].is_array() || edges[i].size() != 2) bad(w, "must be a [int, int] pair");
    NodeId a = node_value(edges[i][0], w);
    NodeId b = node_value(edges[i][1], w);
    if (a == b) throw Error(ErrorKind::validation, w + ": self-loop");
    g.edges.insert(make_edge(a, b));
  }
  return g;
}

Json to_json(const TaskInstance& task) {
  Json central = Json::array();
  for (NodeId n : task.central) central.push_back(n.value);
  return {{"kind", to_string(task.kind)},
          {"central", std::move(central)},
          {"options", task.options},
          {"description", task.description},
          {"gold_label", opt(task.gold_label)}};
}

TaskInstance task_from_json(const Json& j) {
  const std::string where = "task";
  TaskInstance t;
  auto kind = parse_task_kind(string_value(field(j, "kind", where), where + ".kind"));
  if (!kind) bad(where + ".kind", "unknown task kind");
  t.kind = *kind;
  t.central = node_list(field(j, "central", where), where + ".central");
  const Json& options = field(j, "options", where);
  if (!options.is_array()) bad(where + ".options", "must be an array of strings");
  for (const auto& o : options) t.options.push_back(string_value(o, where + ".options"));
  t.description = opt_string(j, "description", where).value_or("");
  t.gold_label = opt_string(j, "gold_label", where);
  return t;
}

Json texts_to_json(const NodeTexts& texts) {
  Json out = Json::object();
  for (const auto& [id, text] : texts) out[std::to_string(id.value)] = text;
  return out;
}

NodeTexts texts_from_json(const Json& j) {
  if (!j.is_object()) bad("texts", "must be an object keyed by node id");
  NodeTexts out;
  for (const auto& [key, value] : j.items()) {
    auto id = parse_node_token(key);
    if (!id) bad("texts", "bad node id key \"" + key + "\"");
    out[*id] = string_value(value, "texts." + key);
  }
  return out;
}

Json to_json(const Instance& inst) {
  return {{"id", inst.id},
          {"task", to_json(inst.task)},
          {"context", to_json(inst.context)},
          {"texts", texts_to_json(inst.texts)}};
}

Instance instance_from_json(const Json& j) {
  const std::string where = "instance";
  if (!j.is_object()) bad(where, "must be an object");
  Instance inst;
  inst.id = opt_string(j, "id", where).value_or("");
  inst.task = task_from_json(field(j, "task", where));
  inst.context = subgraph_from_json(field(j, "context", where));
  inst.texts = texts_from_json(field(j, "texts", where));
  validate_instance(inst);
  return inst;
}

Json to_json(const SsrTrace& trace) {
  Json candidates = Json::array();
  for (const auto& c : trace.candidates) candidates.push_back(to_json(c));
  return {{"candidates", std::move(candidates)},
          {"chosen_index", opt(trace.chosen_index)},
          {"repeated_subgraph", trace.repeated_subgraph ? to_json(*trace.repeated_subgraph) : Json(nullptr)},
          {"answer", opt(trace.answer)},
          {"reasoning", opt(trace.reasoning)},
          {"chosen_reason", opt(trace.chosen_reason)},
          {"malformed_candidates", trace.malformed_candidates},
          {"repeated_malformed", trace.repeated_malformed}};
}

SsrTrace trace_from_json(const Json& j) {
  const std::string where = "trace";
  SsrTrace t;
  const Json& candidates = field(j, "candidates", where);
  if (!candidates.is_array()) bad(where + ".candidates", "must be an array");
  for (const auto& c : candidates) t.candidates.push_back(subgraph_from_json(c));
  if (const Json* v = optional_field(j, "chosen_index")) t.chosen_index = index_value(*v, where + ".chosen_index");
  if (const Json* v = optional_field(j, "repeated_subgraph")) t.repeated_subgraph = subgraph_from_json(*v);
  t.answer = opt_string(j, "answer", where);
  t.reasoning = opt_string(j, "reasoning", where);
  t.chosen_reason = opt_string(j, "chosen_reason", where);
  if (const Json* v = optional_field(j, "malformed_candidates")) {
    if (!v->is_array()) bad(where + ".malformed_candidates", "must be an array");
    for (const auto& i : *v) t.malformed_candidates.push_back(index_value(i, where + ".malformed_candidates"));
  }
  t.repeated_malformed = opt_bool(j, "repeated_malformed", where).value_or(false);
  return t;
}

Json to_json(const Defect& d) {
  return {{"kind", to_string(d.kind)}, {"offset", d.offset}, {"length", d.length}, {"message", d.message}};
}

Json to_json(const ParseReport& report) {
  Json defects = Json::array();
  for (const auto& d : report.defects) defects.push_back(to_json(d));
  return {{"trace", to_json(report.trace)}, {"defects", std::move(defects)}};
}

Json to_json(const VerifyOutcome& o) {
  Json flags = Json::array();
  for (StructuralFlag f : o.structural_flags) flags.push_back(to_string(f));
  return {{"status_real", o.status_real},
          {"status_consist", o.status_consist},
          {"status_ans", opt(o.status_ans)},
          {"structural_flags", std::move(flags)},
          {"energy", opt(o.energy)},
          {"mean_distance", opt(o.mean_distance)}};
}

Json to_json(const RewardBreakdown& b) {
  return {{"status_real", b.status_real},
          {"status_consist", b.status_consist},
          {"status_ans", b.status_ans},
          {"r1", b.r1},
          {"rho", opt(b.rho)},
          {"r_s", opt(b.r_s)},
          {"r2", b.r2},
          {"stage", to_string(b.stage)}};
}

RewardBreakdown breakdown_from_json(const Json& j) {
  const std::string where = "breakdown";
  RewardBreakdown b;
  b.status_real = field(j, "status_real", where).get<bool>();
  b.status_consist = field(j, "status_consist", where).get<bool>();
  b.status_ans = field(j, "status_ans", where).get<bool>();
  b.r1 = field(j, "r1", where).get<double>();
  if (const Json* v = optional_field(j, "rho")) b.rho = index_value(*v, where + ".rho");
  b.r_s = opt_number(j, "r_s", where);
  b.r2 = field(j, "r2", where).get<double>();
  auto stage = parse_stage(string_value(field(j, "stage", where), where + ".stage"));
  if (!stage) bad(where + ".stage", "unknown stage");
  b.stage = *stage;
  return b;
}

Json to_json(const SynthRecord& r) {
  Json defects = Json::array();
  for (const auto& d : r.defects) defects.push_back(to_json(d));
  Json flags = Json::array();
  for (StructuralFlag f : r.structural_flags) flags.push_back(to_string(f));
  return {{"schema", "ssr.synth_record/v1"},
          {"id", r.id},
          {"task", to_json(r.task)},
          {"prompt", r.prompt},
          {"completion", r.completion},
          {"trace", to_json(r.trace)},
          {"defects", std::move(defects)},
          {"verdicts",
           {{"authenticity", opt(r.verdicts.authenticity)},
            {"diversity", opt(r.verdicts.diversity)},
            {"consistency", opt(r.verdicts.consistency)},
            {"answer", opt(r.verdicts.answer)}}},
          {"structural_flags", std::move(flags)},
          {"energy", opt(r.energy)},
          {"mean_distance", opt(r.mean_distance)},
          {"retained", r.retained},
          {"rejection_reason", r.rejection_reason ? Json(to_string(*r.rejection_reason)) : Json(nullptr)},
          {"error", opt(r.error)}};
}

SynthRecord synth_record_from_json(const Json& j) {
  const std::string where = "synth_record";
  SynthRecord r;
  r.id = string_value(field(j, "id", where), where + ".id");
  r.task = task_from_json(field(j, "task", where));
  r.prompt = string_value(field(j, "prompt", where), where + ".prompt");
  r.completion = string_value(field(j, "completion", where), where + ".completion");
  r.trace = trace_from_json(field(j, "trace", where));
  const Json& verdicts = field(j, "verdicts", where);
  r.verdicts.authenticity = opt_bool(verdicts, "authenticity", where);
  r.verdicts.diversity = opt_bool(verdicts, "diversity", where);
  r.verdicts.consistency = opt_bool(verdicts, "consistency", where);
  r.verdicts.answer = opt_bool(verdicts, "answer", where);
  if (const Json* flags = optional_field(j, "structural_flags")) {
    for (const auto& f : *flags) {
      auto flag = parse_structural_flag(string_value(f, where + ".structural_flags"));
      if (!flag) bad(where + ".structural_flags", "unknown flag");
      r.structural_flags.insert(*flag);
    }
  }
  r.energy = opt_number(j, "energy", where);
  r.mean_distance = opt_number(j, "mean_distance", where);
  r.retained = field(j, "retained", where).get<bool>();
  if (auto reason = opt_string(j, "rejection_reason", where)) {
    r.rejection_reason = parse_rejection_reason(*reason);
    if (!r.rejection_reason) bad(where + ".rejection_reason", "unknown reason");
  }
  r.error = opt_string(j, "error", where);
  return r;
}

Json to_json(const EvalReport& r) {
  return {{"n", r.n},
          {"accuracy", r.accuracy},
          {"success_rate", r.success_rate},
          {"mean_r1", r.mean_r1},
          {"mean_r2", r.mean_r2},
          {"avg_selected_size", r.avg_selected_size},
          {"avg_context_size", r.avg_context_size},
          {"avg_selected_edges", r.avg_selected_edges},
          {"avg_context_edges", r.avg_context_edges},
          {"selected_count", r.selected_count},
          {"real_rate", r.real_rate},
          {"consist_rate", r.consist_rate},
          {"failures", r.failures},
          {"failure_rate", r.failure_rate}};
}

Json to_json(const EvalRow& row) {
  return {{"id", row.id},
          {"breakdown", to_json(row.breakdown)},
          {"selected_nodes", opt(row.selected_nodes)},
          {"selected_edges", opt(row.selected_edges)},
          {"context_nodes", row.context_nodes},
          {"context_edges", row.context_edges},
          {"error", opt(row.error)}};
}

Json to_json(const ScoreResponse& r) {
  Json results = Json::array();
  for (std::size_t i = 0; i < r.breakdowns.size(); ++i) {
    results.push_back({{"breakdown", to_json(r.breakdowns[i])},
                       {"defects", {{"count", r.defects[i].count}, {"kinds", r.defects[i].kinds}}}});
  }
  return {{"schema", kScoreResponseSchema},
          {"version", version_string()},
          {"stage", to_string(r.stage)},
          {"results", std::move(results)},
          {"advantages", r.advantages}};
}

Json to_json(const VerifyResponse& r) {
  return {{"schema", kVerifyResponseSchema},
          {"version", version_string()},
          {"outcome", to_json(r.outcome)},
          {"report", to_json(r.report)}};
}

}  // namespace ssr
