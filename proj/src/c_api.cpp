// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include "ssr/ssr.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>

#include "ssr/codec.hpp"
#include "ssr/error.hpp"

struct ssr_graph {
  ssr::GraphDocument doc;
};

struct ssr_server {
  std::unique_ptr<ssr::ScoreServer> server;
};

namespace {

using ssr::Error;
using ssr::ErrorKind;
using ssr::Json;

thread_local std::string g_last_error;

ssr_status status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return SSR_ERR_INVALID_ARGUMENT;
    case ErrorKind::malformed_document: return SSR_ERR_MALFORMED;
    case ErrorKind::validation: return SSR_ERR_VALIDATION;
    case ErrorKind::missing_gold: return SSR_ERR_MISSING_GOLD;
    case ErrorKind::transport: return SSR_ERR_TRANSPORT;
    case ErrorKind::provider: return SSR_ERR_PROVIDER;
    case ErrorKind::io: return SSR_ERR_IO;
  }
  return SSR_ERR_INTERNAL;
}

template <typename Fn>
ssr_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SSR_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const Json::exception& e) {
    g_last_error = e.what();
    return SSR_ERR_MALFORMED;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SSR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SSR_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (!p) throw Error(ErrorKind::invalid_argument, std::string(name) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

void set_out(char** out, const std::string& s) {
  require(out, "out");
  *out = nullptr;
  *out = dup(s);
}

void emit(ssr_line_fn fn, void* user, const std::string& line) {
  if (fn) fn(line.c_str(), user);
}

Json options_from(const char* options_json) {
  if (!options_json || !*options_json) return Json::object();
  Json j = ssr::parse_json(options_json, "options");
  if (!j.is_object()) throw Error(ErrorKind::invalid_argument, "options must be a JSON object");
  return j;
}

template <typename T>
T opt(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const Json::exception&) {
    throw Error(ErrorKind::invalid_argument, std::string("option \"") + key + "\" has the wrong type");
  }
}

std::vector<std::pair<std::size_t, std::string>> jsonl_lines(const char* text) {
  require(text, "jsonl input");
  std::vector<std::pair<std::size_t, std::string>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.emplace_back(lineno, line);
  }
  return out;
}

std::vector<ssr::Instance> parse_instances(const char* jsonl) {
  std::vector<ssr::Instance> out;
  for (const auto& [lineno, line] : jsonl_lines(jsonl)) {
    const std::string where = "line " + std::to_string(lineno);
    try {
      ssr::Instance inst = ssr::instance_from_json(ssr::parse_json(line, where));
      if (inst.id.empty()) inst.id = "line-" + std::to_string(lineno);
      out.push_back(std::move(inst));
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.what());
    }
  }
  return out;
}

const ssr::TemplateSet& templates_for(const Json& opts, std::unique_ptr<ssr::TemplateSet>& holder) {
  auto dir = opt<std::string>(opts, "template_dir", "");
  if (dir.empty()) return ssr::TemplateSet::builtin();
  holder = std::make_unique<ssr::TemplateSet>(ssr::TemplateSet::from_directory(dir));
  return *holder;
}

std::unique_ptr<ssr::ChatClient> chat_client_from(const Json& spec, const char* what) {
  const auto kind = opt<std::string>(spec, "kind", "");
  if (kind == "script") {
    auto jsonl = opt<std::string>(spec, "jsonl", "");
    return ssr::ScriptedChatClient::from_jsonl(jsonl);
  }
  if (kind == "http") {
    ssr::HttpChatConfig cfg;
    cfg.endpoint = opt<std::string>(spec, "endpoint", "");
    if (cfg.endpoint.empty()) throw Error(ErrorKind::invalid_argument, std::string(what) + ": http needs an endpoint");
    cfg.path = opt<std::string>(spec, "path", cfg.path);
    cfg.api_key = opt<std::string>(spec, "api_key", "");
    cfg.model = opt<std::string>(spec, "model", cfg.model);
    cfg.timeout = std::chrono::milliseconds(opt<std::int64_t>(spec, "timeout_ms", cfg.timeout.count()));
    cfg.max_attempts = opt<int>(spec, "max_attempts", cfg.max_attempts);
    cfg.backoff = std::chrono::milliseconds(opt<std::int64_t>(spec, "backoff_ms", cfg.backoff.count()));
    return std::make_unique<ssr::HttpChatClient>(cfg);
  }
  throw Error(ErrorKind::invalid_argument, std::string(what) + ": unknown kind \"" + kind + "\"");
}

struct PolicyHolder {
  std::unique_ptr<ssr::ChatClient> client;
  std::unique_ptr<ssr::Policy> policy;
};

PolicyHolder policy_from(const Json& opts, const char* key) {
  auto it = opts.find(key);
  if (it == opts.end() || !it->is_object()) {
    throw Error(ErrorKind::invalid_argument, std::string("options need a \"") + key + "\" object");
  }
  const Json& spec = *it;
  PolicyHolder h;
  if (opt<std::string>(spec, "kind", "") == "scripted_policy") {
    auto behavior = ssr::parse_scripted_behavior(opt<std::string>(spec, "behavior", "oracle_denoiser"));
    if (!behavior) throw Error(ErrorKind::invalid_argument, std::string(key) + ": unknown scripted behavior");
    ssr::ScriptedPolicy::Options o;
    o.behavior = *behavior;
    o.seed = opt<std::uint64_t>(spec, "seed", 0);
    o.lambda = opt<double>(spec, "lambda", o.lambda);
    o.kappa = opt<double>(spec, "kappa", o.kappa);
    h.policy = std::make_unique<ssr::ScriptedPolicy>(o);
    return h;
  }
  h.client = chat_client_from(spec, key);
  h.policy = std::make_unique<ssr::ChatPolicy>(*h.client);
  return h;
}

struct JudgeHolder {
  std::unique_ptr<ssr::ChatClient> client;
  std::unique_ptr<ssr::DistanceCache> cache;
  std::unique_ptr<ssr::DistanceProvider> provider;
};

JudgeHolder judge_from(const Json& opts, const ssr::TemplateSet& templates) {
  JudgeHolder h;
  auto it = opts.find("judge");
  const std::string kind = (it == opts.end() || !it->is_object()) ? "jaccard" : opt<std::string>(*it, "kind", "jaccard");
  if (kind == "jaccard") {
    h.provider = std::make_unique<ssr::JaccardDistance>();
    return h;
  }
  h.client = chat_client_from(*it, "judge");
  auto cache_file = opt<std::string>(*it, "cache_file", "");
  h.cache = cache_file.empty() ? std::make_unique<ssr::DistanceCache>()
                               : std::make_unique<ssr::DistanceCache>(cache_file);
  h.provider = std::make_unique<ssr::JudgeDistance>(*h.client, h.cache.get(), templates);
  return h;
}

ssr::RewardConfig reward_from(const Json& opts) {
  ssr::RewardConfig cfg;
  if (auto s = opt<std::string>(opts, "stage", ""); !s.empty()) {
    auto stage = ssr::parse_stage(s);
    if (!stage) throw Error(ErrorKind::invalid_argument, "unknown stage \"" + s + "\"");
    cfg.stage = *stage;
  }
  cfg.lambda = opt<double>(opts, "lambda", cfg.lambda);
  if (auto m = opt<std::string>(opts, "size_metric", ""); !m.empty()) {
    auto metric = ssr::parse_size_metric(m);
    if (!metric) throw Error(ErrorKind::invalid_argument, "unknown size_metric \"" + m + "\"");
    cfg.size_metric = *metric;
  }
  ssr::validate(cfg);
  return cfg;
}

std::size_t sample_count_from(const Json& opts) {
  auto k = opt<std::size_t>(opts, "sample_count", 5);
  if (k < 2) throw Error(ErrorKind::invalid_argument, "sample_count must be >= 2");
  return k;
}

}  // namespace

extern "C" {

const char* ssr_version(void) { return ssr::version_string(); }

const char* ssr_status_name(ssr_status status) {
  switch (status) {
    case SSR_OK: return "ok";
    case SSR_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SSR_ERR_MALFORMED: return "malformed_document";
    case SSR_ERR_VALIDATION: return "validation";
    case SSR_ERR_MISSING_GOLD: return "missing_gold";
    case SSR_ERR_TRANSPORT: return "transport";
    case SSR_ERR_PROVIDER: return "provider";
    case SSR_ERR_IO: return "io";
    case SSR_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* ssr_last_error(void) { return g_last_error.c_str(); }

void ssr_string_free(char* s) { std::free(s); }

ssr_status ssr_graph_load(const char* tag_json, size_t len, ssr_graph** out) {
  return guard([&] {
    require(tag_json, "tag_json");
    require(out, "out");
    *out = nullptr;
    *out = new ssr_graph{ssr::load_document(std::string_view(tag_json, len))};
  });
}

void ssr_graph_free(ssr_graph* g) { delete g; }

size_t ssr_graph_node_count(const ssr_graph* g) { return g ? g->doc.graph.node_count() : 0; }
size_t ssr_graph_edge_count(const ssr_graph* g) { return g ? g->doc.graph.edge_count() : 0; }
size_t ssr_graph_task_count(const ssr_graph* g) { return g ? g->doc.tasks.size() : 0; }

ssr_status ssr_graph_serialize(const ssr_graph* g, char** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(g, "graph");
    set_out(out, ssr::serialize(g->doc.graph, g->doc.tasks));
  });
}

ssr_status ssr_graph_extract(const ssr_graph* g, const uint64_t* central, size_t n_central, unsigned hops,
                             size_t max_nodes, char** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(g, "graph");
    if (n_central > 0) require(central, "central");
    std::vector<ssr::NodeId> ids;
    for (size_t i = 0; i < n_central; ++i) ids.push_back(ssr::NodeId{central[i]});
    ssr::Subgraph sub = ssr::ego_subgraph(g->doc.graph, ids, hops, max_nodes);
    Json j = {{"context", ssr::to_json(sub)}, {"texts", ssr::texts_to_json(ssr::texts_for(g->doc.graph, sub))}};
    set_out(out, ssr::canonical(j));
  });
}

ssr_status ssr_graph_instances(const ssr_graph* g, unsigned hops, size_t max_nodes, ssr_line_fn fn, void* user) {
  return guard([&] {
    require(g, "graph");
    for (std::size_t i = 0; i < g->doc.tasks.size(); ++i) {
      auto inst = ssr::make_instance(g->doc.graph, g->doc.tasks[i], "task-" + std::to_string(i), hops, max_nodes);
      emit(fn, user, ssr::canonical(ssr::to_json(inst)));
    }
  });
}

ssr_status ssr_render_prompt(const char* instance_json, size_t sample_count, const char* template_dir,
                             char** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(instance_json, "instance_json");
    auto inst = ssr::instance_from_json(ssr::parse_json(instance_json, "instance"));
    std::unique_ptr<ssr::TemplateSet> holder;
    const ssr::TemplateSet& templates =
        templates_for(template_dir ? Json{{"template_dir", template_dir}} : Json::object(), holder);
    auto prompt = ssr::render_task_prompt(inst.context, inst.texts, inst.task,
                                          {sample_count, ssr::template_for(inst.task.kind)}, templates);
    Json manifest = Json::array();
    for (const auto& s : prompt.manifest) {
      manifest.push_back({{"name", s.name}, {"offset", s.offset}, {"length", s.length}});
    }
    set_out(out, ssr::canonical({{"text", prompt.text}, {"manifest", std::move(manifest)}}));
  });
}

ssr_status ssr_render_diversity_prompt(const char* request_json, const char* template_dir, char** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(request_json, "request_json");
    Json req = ssr::parse_json(request_json, "diversity request");
    if (!req.is_object()) throw Error(ErrorKind::malformed_document, "diversity request must be an object");
    auto a = ssr::subgraph_from_json(req.at("a"));
    auto b = ssr::subgraph_from_json(req.at("b"));
    auto texts = ssr::texts_from_json(req.at("texts"));
    std::unique_ptr<ssr::TemplateSet> holder;
    const ssr::TemplateSet& templates =
        templates_for(template_dir ? Json{{"template_dir", template_dir}} : Json::object(), holder);
    auto prompt = ssr::render_diversity_prompt(a, b, texts, templates);
    Json manifest = Json::array();
    for (const auto& s : prompt.manifest) {
      manifest.push_back({{"name", s.name}, {"offset", s.offset}, {"length", s.length}});
    }
    set_out(out, ssr::canonical({{"text", prompt.text}, {"manifest", std::move(manifest)}}));
  });
}

ssr_status ssr_parse_trace(const char* completion, size_t len, size_t expected_k, char** out) {
  if (out) *out = nullptr;
  return guard([&] {
    if (len > 0) require(completion, "completion");
    auto report = ssr::parse_trace(std::string_view(completion ? completion : "", len), expected_k);
    set_out(out, ssr::canonical(ssr::to_json(report)));
  });
}

ssr_status ssr_format_trace(const char* trace_json, char** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(trace_json, "trace_json");
    Json j = ssr::parse_json(trace_json, "trace");
    // Accept either a bare trace or a parse report.
    if (j.is_object() && j.contains("trace")) j = j["trace"];
    set_out(out, ssr::format_trace(ssr::trace_from_json(j)));
  });
}

ssr_status ssr_parse_distance_score(const char* completion, size_t len, int* found, double* value, int* clamped) {
  return guard([&] {
    if (len > 0) require(completion, "completion");
    require(found, "found");
    auto score = ssr::parse_distance_score(std::string_view(completion ? completion : "", len));
    *found = score ? 1 : 0;
    if (value) *value = score ? score->value : 0.0;
    if (clamped) *clamped = score && score->clamped ? 1 : 0;
  });
}

ssr_status ssr_verify(const char* request_json, char** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(request_json, "request_json");
    auto response = ssr::verify_completion(ssr::parse_verify_request(request_json));
    set_out(out, ssr::canonical(ssr::to_json(response)));
  });
}

ssr_status ssr_score(const char* request_json, char** out) {
  if (out) *out = nullptr;
  return guard([&] {
    require(request_json, "request_json");
    auto response = ssr::score(ssr::parse_score_request(request_json));
    set_out(out, ssr::canonical(ssr::to_json(response)));
  });
}

ssr_status ssr_reward_r1(int real, int consist, int ans, double* out) {
  return guard([&] {
    require(out, "out");
    *out = ssr::reward_r1(real != 0, consist != 0, ans != 0);
  });
}

ssr_status ssr_group_advantages(const double* rewards, size_t n, double* out) {
  return guard([&] {
    require(rewards, "rewards");
    require(out, "out");
    auto adv = ssr::group_advantages(std::span<const double>(rewards, n));
    std::copy(adv.begin(), adv.end(), out);
  });
}

ssr_status ssr_grpo_objective(const double* ratios, const double* advantages, const double* kl, size_t n,
                              double epsilon, double beta, double* out) {
  return guard([&] {
    require(ratios, "ratios");
    require(advantages, "advantages");
    require(kl, "kl");
    require(out, "out");
    *out = ssr::grpo_objective({ratios, n}, {advantages, n}, {kl, n}, epsilon, beta);
  });
}

ssr_status ssr_synth_sft(const char* instances_jsonl, const char* options_json, ssr_line_fn fn, void* user) {
  return guard([&] {
    Json opts = options_from(options_json);
    auto instances = parse_instances(instances_jsonl);
    std::unique_ptr<ssr::TemplateSet> tholder;
    const auto& templates = templates_for(opts, tholder);
    PolicyHolder teacher = policy_from(opts, "teacher");
    JudgeHolder judge = judge_from(opts, templates);
    ssr::SynthConfig cfg;
    cfg.sample_count = sample_count_from(opts);
    cfg.diversity_threshold = opt<double>(opts, "threshold", cfg.diversity_threshold);
    cfg.temperature = opt<double>(opts, "temperature", cfg.temperature);
    cfg.concurrency = opt<std::size_t>(opts, "concurrency", cfg.concurrency);
    const bool sft = opt<std::string>(opts, "emit", "records") == "sft";
    ssr::synthesize_sft(instances, *teacher.policy, *judge.provider, cfg, templates,
                        [&](const ssr::SynthRecord& r) {
                          if (!sft) {
                            emit(fn, user, ssr::canonical(ssr::to_json(r)));
                          } else if (r.retained) {
                            emit(fn, user, ssr::canonical({{"prompt", r.prompt}, {"completion", r.completion}}));
                          }
                        });
  });
}

ssr_status ssr_assess_difficulty(const char* instances_jsonl, const char* options_json, ssr_line_fn fn,
                                 void* user) {
  return guard([&] {
    Json opts = options_from(options_json);
    auto instances = parse_instances(instances_jsonl);
    std::unique_ptr<ssr::TemplateSet> tholder;
    const auto& templates = templates_for(opts, tholder);
    PolicyHolder policy = policy_from(opts, "policy");
    ssr::AssessConfig cfg;
    cfg.trials = opt<std::size_t>(opts, "trials", cfg.trials);
    cfg.sample_count = sample_count_from(opts);
    cfg.temperature = opt<double>(opts, "temperature", cfg.temperature);
    const auto concurrency = opt<std::size_t>(opts, "concurrency", 1);
    auto results = ssr::ordered_parallel_map<ssr::DifficultyAssessment>(
        instances.size(), concurrency,
        [&](std::size_t i) { return ssr::assess_difficulty(instances[i], *policy.policy, cfg, templates); });
    for (std::size_t i = 0; i < instances.size(); ++i) {
      Json j = ssr::to_json(instances[i]);
      j["tier"] = ssr::to_string(results[i].tier);
      j["correct_count"] = results[i].correct_count;
      j["trials"] = results[i].trials;
      emit(fn, user, ssr::canonical(j));
    }
  });
}

ssr_status ssr_build_rl(const char* pool_jsonl, const char* options_json, ssr_line_fn fn, void* user,
                        char** report) {
  if (report) *report = nullptr;
  return guard([&] {
    Json opts = options_from(options_json);
    std::vector<Json> rows;
    std::vector<ssr::DifficultyTier> tiers;
    for (const auto& [lineno, line] : jsonl_lines(pool_jsonl)) {
      const std::string where = "line " + std::to_string(lineno);
      Json j = ssr::parse_json(line, where);
      auto it = j.find("tier");
      auto tier = (it != j.end() && it->is_string()) ? ssr::parse_tier(it->get<std::string>()) : std::nullopt;
      if (!tier) throw Error(ErrorKind::validation, where + ": missing or unknown \"tier\"");
      tiers.push_back(*tier);
      rows.push_back(std::move(j));
    }
    std::array<std::size_t, 3> ratio{2, 2, 1};
    if (auto it = opts.find("ratio"); it != opts.end()) {
      if (!it->is_array() || it->size() != 3) throw Error(ErrorKind::invalid_argument, "ratio must be [easy, medium, hard]");
      for (std::size_t t = 0; t < 3; ++t) ratio[t] = (*it)[t].get<std::size_t>();
    }
    const auto target = opt<std::size_t>(opts, "target", 0);
    auto sel = ssr::build_rl_dataset(tiers, target, ratio, opt<std::uint64_t>(opts, "seed", 0));
    for (std::size_t i : sel.indices) emit(fn, user, ssr::canonical(rows[i]));
    if (report) {
      auto tiered = [](const std::array<std::size_t, 3>& a) {
        return Json{{"easy", a[0]}, {"medium", a[1]}, {"hard", a[2]}};
      };
      Json r = {{"target", target},
                {"requested", tiered(sel.requested)},
                {"selected", tiered(sel.selected)},
                {"available", tiered(sel.available)},
                {"redistributed", sel.redistributed}};
      set_out(report, ssr::canonical(r));
    }
  });
}

ssr_status ssr_eval(const char* instances_jsonl, const char* options_json, char** out) {
  if (out) *out = nullptr;
  return guard([&] {
    Json opts = options_from(options_json);
    auto instances = parse_instances(instances_jsonl);
    std::unique_ptr<ssr::TemplateSet> tholder;
    const auto& templates = templates_for(opts, tholder);
    PolicyHolder policy = policy_from(opts, "policy");
    ssr::EvalConfig cfg;
    cfg.reward = reward_from(opts);
    cfg.sample_count = sample_count_from(opts);
    cfg.temperature = opt<double>(opts, "temperature", cfg.temperature);
    cfg.concurrency = opt<std::size_t>(opts, "concurrency", cfg.concurrency);
    auto result = ssr::evaluate(instances, *policy.policy, cfg, templates);
    if (opt<std::string>(opts, "format", "json") == "text") {
      set_out(out, ssr::report_table(result.report));
      return;
    }
    Json rows = Json::array();
    for (const auto& r : result.rows) rows.push_back(ssr::to_json(r));
    set_out(out, ssr::canonical({{"report", ssr::to_json(result.report)}, {"rows", std::move(rows)}}));
  });
}

ssr_status ssr_lambda_sweep(const char* instances_jsonl, const char* options_json, char** out) {
  if (out) *out = nullptr;
  return guard([&] {
    Json opts = options_from(options_json);
    auto instances = parse_instances(instances_jsonl);
    auto lambdas = opt<std::vector<double>>(opts, "lambdas", {0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0});
    if (lambdas.empty()) throw Error(ErrorKind::invalid_argument, "lambdas must not be empty");
    ssr::EvalConfig cfg;
    cfg.reward = reward_from(opts);
    cfg.sample_count = sample_count_from(opts);
    cfg.concurrency = opt<std::size_t>(opts, "concurrency", cfg.concurrency);
    auto rows = ssr::lambda_sweep(instances, lambdas, cfg, opt<double>(opts, "kappa", 8.0));
    if (opt<std::string>(opts, "format", "csv") == "json") {
      Json j = Json::array();
      for (const auto& r : rows) {
        j.push_back({{"lambda", r.lambda}, {"accuracy", r.accuracy}, {"avg_selected_size", r.avg_selected_size}, {"n", r.n}});
      }
      set_out(out, ssr::canonical(j));
      return;
    }
    set_out(out, ssr::sweep_csv(rows));
  });
}

ssr_status ssr_planted_suite(size_t n_tasks, uint64_t seed, ssr_line_fn fn, void* user) {
  return guard([&] {
    auto suite = ssr::make_planted_noise_suite(n_tasks, seed);
    for (const auto& t : suite.tasks) emit(fn, user, ssr::canonical(ssr::to_json(t.instance)));
  });
}

ssr_status ssr_server_create(const char* host, int port, size_t threads, ssr_server** out) {
  return guard([&] {
    require(out, "out");
    *out = nullptr;
    if (port < 0 || port > 65535) throw Error(ErrorKind::invalid_argument, "port must be in [0, 65535]");
    ssr::ServerOptions o;
    if (host) o.host = host;
    o.port = port;
    o.threads = threads;
    *out = new ssr_server{std::make_unique<ssr::ScoreServer>(o)};
  });
}

ssr_status ssr_server_bind(ssr_server* s, int* bound_port) {
  return guard([&] {
    require(s, "server");
    int p = s->server->bind();
    if (bound_port) *bound_port = p;
  });
}

ssr_status ssr_server_serve(ssr_server* s) {
  return guard([&] {
    require(s, "server");
    s->server->serve();
  });
}

void ssr_server_stop(ssr_server* s) {
  if (s) s->server->stop();
}

void ssr_server_free(ssr_server* s) { delete s; }

}  // extern "C"
