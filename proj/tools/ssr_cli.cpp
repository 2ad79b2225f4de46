// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors
//
// `ssr` command-line front end. Every subcommand is a thin shell over the C
// API in ssr/ssr.h. Settings resolve with the precedence
//   command-line flag > environment variable > --config file > built-in default.

#include <csignal>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <pthread.h>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ssr/ssr.h"

namespace {

using Json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  ApiError(ssr_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  ssr_status status;
};

void check(ssr_status s) {
  if (s != SSR_OK) throw ApiError(s, std::string(ssr_status_name(s)) + ": " + ssr_last_error());
}

std::string take(char* s) {
  std::string out = s ? s : "";
  ssr_string_free(s);
  return out;
}

std::string read_stream(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// "-" or empty means standard input.
std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") return read_stream(std::cin);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_stream(in);
}

Json read_json_file(const std::string& path, const char* what) {
  try {
    return Json::parse(read_input(path));
  } catch (const Json::parse_error& e) {
    throw DataError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

void print_line(const char* line, void*) {
  std::fwrite(line, 1, std::strlen(line), stdout);
  std::fputc('\n', stdout);
}

void print(const std::string& s) {
  std::fwrite(s.data(), 1, s.size(), stdout);
  if (s.empty() || s.back() != '\n') std::fputc('\n', stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---- layered settings ------------------------------------------------------

// Flat `key = value` document with optional `[subcommand]` sections. Keys are
// long option names; '_' and '-' are interchangeable. Top-level keys apply to
// every subcommand that has the option, section keys only to that subcommand.
struct ConfigFile {
  std::map<std::string, std::string> global;
  std::map<std::string, std::map<std::string, std::string>> sections;
};

std::string trim(std::string s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string k) {
  for (char& c : k) {
    if (c == '_') c = '-';
  }
  return k;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  ConfigFile cfg;
  std::string line, section;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw UsageError(path + ":" + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = normalize_key(trim(line.substr(0, eq)));
    std::string value = unquote(trim(line.substr(eq + 1)));
    if (section.empty()) {
      cfg.global[key] = value;
    } else {
      cfg.sections[section][key] = value;
    }
  }
  return cfg;
}

const std::map<std::string, std::string>& env_bindings() {
  static const std::map<std::string, std::string> m = {{"teacher-endpoint", "SSR_TEACHER_ENDPOINT"},
                                                       {"teacher-key", "SSR_TEACHER_KEY"},
                                                       {"judge-endpoint", "SSR_JUDGE_ENDPOINT"},
                                                       {"cache-dir", "SSR_CACHE_DIR"}};
  return m;
}

enum class Source { none = 0, defaults = 1, file = 2, env = 3, flag = 4 };

// Splits "[a, b]" or "a,b" into items for vector-valued options.
std::vector<std::string> split_list(const std::string& v) {
  std::string body = trim(v);
  if (!body.empty() && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
  std::vector<std::string> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(trim(item));
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Layers {
 public:
  // Fills options of `sub` not given on the command line from the
  // environment, then from the config file. Records where each value came from.
  void apply(CLI::App& sub, const std::string& config_path) {
    ConfigFile cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (auto it = cfg.sections.find(sub.get_name()); it != cfg.sections.end()) {
      for (const auto& [key, _] : it->second) {
        if (!find(sub, key)) throw UsageError("config section [" + sub.get_name() + "] has unknown key \"" + key + "\"");
      }
    }
    for (CLI::Option* opt : sub.get_options()) {
      const std::string name = long_name(*opt);
      if (name.empty() || name == "help" || name == "config") continue;
      if (opt->count() > 0) {
        source_[name] = Source::flag;
        continue;
      }
      if (auto e = env_bindings().find(name); e != env_bindings().end()) {
        if (const char* v = std::getenv(e->second.c_str()); v && *v) {
          set(*opt, v);
          source_[name] = Source::env;
          continue;
        }
      }
      const std::string* value = nullptr;
      if (auto s = cfg.sections.find(sub.get_name()); s != cfg.sections.end()) {
        if (auto it = s->second.find(name); it != s->second.end()) value = &it->second;
      }
      if (!value) {
        if (auto it = cfg.global.find(name); it != cfg.global.end()) value = &it->second;
      }
      if (value) {
        set(*opt, *value);
        source_[name] = Source::file;
      }
    }
  }

  Source source(const std::string& name) const {
    auto it = source_.find(name);
    return it == source_.end() ? Source::none : it->second;
  }

 private:
  static std::string long_name(const CLI::Option& opt) {
    const auto& lnames = opt.get_lnames();
    return lnames.empty() ? "" : lnames.front();
  }

  static CLI::Option* find(CLI::App& sub, const std::string& name) {
    for (CLI::Option* opt : sub.get_options()) {
      if (long_name(*opt) == name) return opt;
    }
    return nullptr;
  }

  static void set(CLI::Option& opt, const std::string& value) {
    try {
      if (opt.get_items_expected_max() > 1) {
        for (const auto& item : split_list(value)) opt.add_result(item);
      } else {
        opt.add_result(value);
      }
      opt.run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("--" + long_name(opt) + " = \"" + value + "\": " + e.what());
    }
  }

  std::map<std::string, Source> source_;
};

// ---- shared option groups --------------------------------------------------

struct Common {
  std::string config;
  std::string format = "json";
  std::string input = "-";
  std::string template_dir;
  std::uint64_t seed = 0;
  std::size_t concurrency = 8;
};

void add_config(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "key = value settings file (flags > env > file > defaults)");
}

void add_format(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
}

void add_input(CLI::App* sub, Common& c, const char* what) {
  sub->add_option("-i,--input", c.input, what)->capture_default_str();
}

void add_seed(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Seed for every random choice")->capture_default_str();
}

void add_concurrency(CLI::App* sub, Common& c) {
  sub->add_option("--concurrency", c.concurrency, "Maximum remote calls in flight")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_template_dir(CLI::App* sub, Common& c) {
  sub->add_option("--template-dir", c.template_dir, "Directory overriding the built-in prompt templates");
}

// A completion source: a scripted JSONL file, an HTTP chat endpoint, or a
// built-in scripted policy. Exactly one must be chosen.
struct ModelSpec {
  std::string prefix;
  std::string script;
  std::string endpoint;
  std::string key;
  std::string model = "teacher";
  std::string scripted;
  double timeout_s = 60;
  int max_attempts = 3;
  double kappa = 8;
  double lambda = 0.1;
};

void add_model(CLI::App* sub, ModelSpec& m, const std::string& prefix, bool allow_scripted_policy) {
  m.prefix = prefix;
  sub->add_option("--" + prefix + "-script", m.script, "JSONL of {prompt_digest|prompt, completions}");
  sub->add_option("--" + prefix + "-endpoint", m.endpoint, "Chat-completion base URL");
  sub->add_option("--" + prefix + "-key", m.key, "Bearer token for the endpoint");
  sub->add_option("--" + prefix + "-model", m.model, "Model name sent to the endpoint")->capture_default_str();
  sub->add_option("--" + prefix + "-timeout", m.timeout_s, "Per-request timeout in seconds")->capture_default_str();
  sub->add_option("--" + prefix + "-attempts", m.max_attempts, "Attempts per request")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  if (allow_scripted_policy) {
    sub->add_option("--" + prefix + "-scripted", m.scripted, "Built-in scripted policy")
        ->check(CLI::IsMember({"oracle_denoiser", "greedy_largest", "central_only", "random_choice", "size_sensitive"}));
    sub->add_option("--" + prefix + "-kappa", m.kappa, "Size weight of the size_sensitive policy")->capture_default_str();
    sub->add_option("--" + prefix + "-lambda", m.lambda, "Lambda seen by the size_sensitive policy")
        ->capture_default_str();
  }
}

// Picks the model kind from the highest-precedence source; two kinds set at
// the same level conflict.
Json model_json(const ModelSpec& m, const Layers& layers, std::uint64_t seed) {
  struct Candidate {
    const char* kind;
    Source source;
  };
  std::vector<Candidate> set;
  if (!m.script.empty()) set.push_back({"script", layers.source(m.prefix + "-script")});
  if (!m.endpoint.empty()) set.push_back({"http", layers.source(m.prefix + "-endpoint")});
  if (!m.scripted.empty()) set.push_back({"scripted_policy", layers.source(m.prefix + "-scripted")});
  if (set.empty()) {
    throw UsageError("choose a " + m.prefix + ": --" + m.prefix + "-script, --" + m.prefix + "-endpoint" +
                     (m.prefix == "judge" ? "" : ", or --" + m.prefix + "-scripted"));
  }
  const Candidate* best = &set.front();
  bool tie = false;
  for (const auto& c : set) {
    if (&c == best) continue;
    if (c.source > best->source) {
      best = &c;
      tie = false;
    } else if (c.source == best->source) {
      tie = true;
    }
  }
  if (tie) throw UsageError("conflicting " + m.prefix + " settings: give only one source");
  const std::string kind = best->kind;
  if (kind == "script") return {{"kind", "script"}, {"jsonl", read_input(m.script)}};
  if (kind == "http") {
    return {{"kind", "http"},
            {"endpoint", m.endpoint},
            {"api_key", m.key},
            {"model", m.model},
            {"timeout_ms", static_cast<std::int64_t>(m.timeout_s * 1000)},
            {"max_attempts", m.max_attempts}};
  }
  return {{"kind", "scripted_policy"}, {"behavior", m.scripted}, {"seed", seed}, {"kappa", m.kappa}, {"lambda", m.lambda}};
}

struct RewardFlags {
  std::string stage = "stage1";
  double lambda = 0.1;
  std::string size_metric = "node_count";
};

void add_reward(CLI::App* sub, RewardFlags& r) {
  sub->add_option("--stage", r.stage, "Reward stage (1, 2, stage1, stage2)")
      ->check(CLI::IsMember({"1", "2", "stage1", "stage2"}))
      ->capture_default_str();
  sub->add_option("--lambda", r.lambda, "Size-reward weight")->capture_default_str();
  sub->add_option("--size-metric", r.size_metric, "Subgraph size measure")
      ->check(CLI::IsMember({"node_count", "node_plus_edge_count"}))
      ->capture_default_str();
}

void put_reward(Json& opts, const RewardFlags& r) {
  opts["stage"] = r.stage;
  opts["lambda"] = r.lambda;
  opts["size_metric"] = r.size_metric;
}

std::string cache_file(const std::string& dir) {
  if (dir.empty()) return "";
  return dir + (dir.back() == '/' ? "" : "/") + "distance_cache.jsonl";
}

// ---- subcommands -----------------------------------------------------------

struct ExtractCmd {
  std::vector<std::uint64_t> central;
  unsigned hops = 2;
  std::size_t max_nodes = 64;
};

int run_extract(const Common& c, const ExtractCmd& x) {
  const std::string doc = read_input(c.input);
  ssr_graph* g = nullptr;
  check(ssr_graph_load(doc.data(), doc.size(), &g));
  std::unique_ptr<ssr_graph, decltype(&ssr_graph_free)> hold(g, ssr_graph_free);
  if (x.central.empty()) {
    check(ssr_graph_instances(g, x.hops, x.max_nodes, print_line, nullptr));
    return kExitOk;
  }
  char* out = nullptr;
  check(ssr_graph_extract(g, x.central.data(), x.central.size(), x.hops, x.max_nodes, &out));
  print(take(out));
  return kExitOk;
}

struct PromptCmd {
  std::size_t sample_count = 5;
  bool diversity = false;
};

int run_prompt(const Common& c, const PromptCmd& p) {
  const char* dir = c.template_dir.empty() ? nullptr : c.template_dir.c_str();
  std::istringstream in(read_input(c.input));
  std::string line;
  bool any = false;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    any = true;
    char* out = nullptr;
    if (p.diversity) {
      check(ssr_render_diversity_prompt(line.c_str(), dir, &out));
    } else {
      check(ssr_render_prompt(line.c_str(), p.sample_count, dir, &out));
    }
    std::string rendered = take(out);
    if (c.format == "text") {
      print(Json::parse(rendered).at("text").get<std::string>());
    } else {
      print(rendered);
    }
  }
  if (!any) throw DataError("no input lines");
  return kExitOk;
}

int run_parse(const Common& c, std::size_t expect_k) {
  const std::string text = read_input(c.input);
  char* out = nullptr;
  check(ssr_parse_trace(text.data(), text.size(), expect_k, &out));
  std::string report = take(out);
  if (c.format == "text") {
    char* formatted = nullptr;
    check(ssr_format_trace(report.c_str(), &formatted));
    print(take(formatted));
    Json defects = Json::parse(report).at("defects");
    for (const auto& d : defects) std::fprintf(stderr, "defect: %s\n", d.dump().c_str());
  } else {
    print(report);
  }
  return kExitOk;
}

struct ScoringCmd {
  std::string request;
  std::string instance;
  std::vector<std::string> completions;
  std::size_t expect_k = 0;
};

Json base_request(const ScoringCmd& s, const char* schema) {
  if (!s.request.empty()) {
    if (!s.instance.empty()) throw UsageError("--request and --instance are mutually exclusive");
    return read_json_file(s.request, "request");
  }
  if (s.instance.empty()) throw UsageError("give --request or --instance");
  Json req = {{"schema", schema}, {"instance", read_json_file(s.instance, "instance")}};
  if (s.expect_k > 0) req["expected_k"] = s.expect_k;
  return req;
}

const char* yn(const Json& v) { return v.is_boolean() ? (v.get<bool>() ? "T" : "F") : "-"; }

int run_verify(const Common& c, const ScoringCmd& s) {
  Json req = base_request(s, "ssr.verify_request/v1");
  if (s.request.empty()) {
    if (s.completions.size() > 1) throw UsageError("verify takes one --completion");
    req["completion"] = read_input(s.completions.empty() ? "-" : s.completions.front());
  }
  char* out = nullptr;
  check(ssr_verify(req.dump().c_str(), &out));
  std::string body = take(out);
  if (c.format == "text") {
    Json j = Json::parse(body);
    const Json& o = j.at("outcome");
    std::printf("status_real = %s\nstatus_consist = %s\nstatus_ans = %s\n", yn(o.at("status_real")),
                yn(o.at("status_consist")), yn(o.at("status_ans")));
  } else {
    print(body);
  }
  return kExitOk;
}

int run_score(const Common& c, const ScoringCmd& s, const RewardFlags& r, const Layers& layers) {
  Json req = base_request(s, "ssr.score_request/v1");
  if (s.request.empty()) {
    Json completions = Json::array();
    if (s.completions.empty()) {
      completions.push_back(read_input("-"));
    } else {
      for (const auto& path : s.completions) completions.push_back(read_input(path));
    }
    req["completions"] = std::move(completions);
  }
  // Flags and their layered fallbacks override values in a request file.
  if (s.request.empty() || layers.source("stage") > Source::none) req["stage"] = r.stage;
  if (s.request.empty() || layers.source("lambda") > Source::none) req["lambda"] = r.lambda;
  if (s.request.empty() || layers.source("size-metric") > Source::none) req["size_metric"] = r.size_metric;
  if (s.expect_k > 0) req["expected_k"] = s.expect_k;
  char* out = nullptr;
  check(ssr_score(req.dump().c_str(), &out));
  std::string body = take(out);
  if (c.format == "text") {
    Json j = Json::parse(body);
    const auto& results = j.at("results");
    const auto& adv = j.at("advantages");
    for (std::size_t i = 0; i < results.size(); ++i) {
      const Json& b = results[i].at("breakdown");
      std::printf("[%zu] real=%s consist=%s ans=%s r1 = %s", i, yn(b.at("status_real")), yn(b.at("status_consist")),
                  yn(b.at("status_ans")), fmt(b.at("r1").get<double>()).c_str());
      if (b.at("r_s").is_number()) std::printf(" r_s = %s", fmt(b.at("r_s").get<double>()).c_str());
      std::printf(" r2 = %s advantage = %s\n", fmt(b.at("r2").get<double>()).c_str(),
                  fmt(adv.at(i).get<double>()).c_str());
    }
  } else {
    print(body);
  }
  return kExitOk;
}

struct SynthCmd {
  ModelSpec teacher;
  ModelSpec judge;
  std::string cache_dir;
  std::size_t sample_count = 5;
  double threshold = 0.3;
  double temperature = 0.6;
  std::string emit = "records";
};

int run_synth(const Common& c, const SynthCmd& s, const Layers& layers) {
  Json opts = {{"teacher", model_json(s.teacher, layers, c.seed)},
               {"sample_count", s.sample_count},
               {"threshold", s.threshold},
               {"temperature", s.temperature},
               {"concurrency", c.concurrency},
               {"emit", s.emit}};
  if (!c.template_dir.empty()) opts["template_dir"] = c.template_dir;
  if (!s.judge.script.empty() || !s.judge.endpoint.empty()) {
    Json judge = model_json(s.judge, layers, c.seed);
    judge["cache_file"] = cache_file(s.cache_dir);
    opts["judge"] = std::move(judge);
  } else {
    opts["judge"] = {{"kind", "jaccard"}};
  }
  const std::string input = read_input(c.input);
  check(ssr_synth_sft(input.c_str(), opts.dump().c_str(), print_line, nullptr));
  return kExitOk;
}

struct AssessCmd {
  ModelSpec policy;
  std::size_t trials = 5;
  std::size_t sample_count = 5;
  double temperature = 0.6;
};

int run_assess(const Common& c, const AssessCmd& a, const Layers& layers) {
  Json opts = {{"policy", model_json(a.policy, layers, c.seed)},
               {"trials", a.trials},
               {"sample_count", a.sample_count},
               {"temperature", a.temperature},
               {"concurrency", c.concurrency}};
  if (!c.template_dir.empty()) opts["template_dir"] = c.template_dir;
  const std::string input = read_input(c.input);
  check(ssr_assess_difficulty(input.c_str(), opts.dump().c_str(), print_line, nullptr));
  return kExitOk;
}

struct BuildRlCmd {
  std::size_t target = 0;
  std::vector<std::size_t> ratio{2, 2, 1};
  std::string report;
};

int run_build_rl(const Common& c, const BuildRlCmd& b) {
  if (b.ratio.size() != 3) throw UsageError("--ratio takes three values: easy medium hard");
  Json opts = {{"target", b.target}, {"ratio", b.ratio}, {"seed", c.seed}};
  const std::string input = read_input(c.input);
  char* report = nullptr;
  check(ssr_build_rl(input.c_str(), opts.dump().c_str(), print_line, nullptr, &report));
  const std::string r = take(report);
  std::string rendered = r;
  if (c.format == "text") {
    Json j = Json::parse(r);
    rendered.clear();
    for (const char* tier : {"easy", "medium", "hard"}) {
      rendered += std::string(tier) + ": requested " + std::to_string(j["requested"][tier].get<std::size_t>()) +
                  " selected " + std::to_string(j["selected"][tier].get<std::size_t>()) + " available " +
                  std::to_string(j["available"][tier].get<std::size_t>()) + "\n";
    }
  } else {
    rendered += "\n";
  }
  // Selected lines own stdout, so the report goes to a file or stderr.
  if (!b.report.empty()) {
    std::ofstream out(b.report, std::ios::binary);
    if (!out || !(out << rendered)) throw DataError("cannot write " + b.report);
  } else {
    std::fputs(rendered.c_str(), stderr);
  }
  return kExitOk;
}

struct EvalCmd {
  ModelSpec policy;
  std::size_t sample_count = 5;
  double temperature = 0.6;
};

int run_eval(const Common& c, const EvalCmd& e, const RewardFlags& r, const Layers& layers) {
  Json opts = {{"policy", model_json(e.policy, layers, c.seed)},
               {"sample_count", e.sample_count},
               {"temperature", e.temperature},
               {"concurrency", c.concurrency},
               {"format", c.format}};
  put_reward(opts, r);
  if (!c.template_dir.empty()) opts["template_dir"] = c.template_dir;
  const std::string input = read_input(c.input);
  char* out = nullptr;
  check(ssr_eval(input.c_str(), opts.dump().c_str(), &out));
  print(take(out));
  return kExitOk;
}

struct SweepCmd {
  std::vector<double> lambdas{0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0};
  double kappa = 8;
  std::size_t sample_count = 5;
};

int run_sweep(const Common& c, const SweepCmd& s, const RewardFlags& r) {
  Json opts = {{"lambdas", s.lambdas},
               {"kappa", s.kappa},
               {"sample_count", s.sample_count},
               {"concurrency", c.concurrency},
               {"format", c.format == "text" ? "csv" : "json"},
               {"size_metric", r.size_metric}};
  const std::string input = read_input(c.input);
  char* out = nullptr;
  check(ssr_lambda_sweep(input.c_str(), opts.dump().c_str(), &out));
  print(take(out));
  return kExitOk;
}

struct ServeCmd {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t threads = 4;
};

int run_serve(const ServeCmd& s) {
  // Signals are taken synchronously by a watcher thread so that stopping the
  // server never runs inside a signal handler.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  ssr_server* server = nullptr;
  check(ssr_server_create(s.host.c_str(), s.port, s.threads, &server));
  std::unique_ptr<ssr_server, decltype(&ssr_server_free)> hold(server, ssr_server_free);
  int bound = 0;
  check(ssr_server_bind(server, &bound));
  std::fprintf(stderr, "ssr %s listening on %s:%d with %zu threads\n", ssr_version(), s.host.c_str(), bound,
               s.threads);

  std::thread watcher([&] {
    int sig = 0;
    sigwait(&set, &sig);
    ssr_server_stop(server);
  });
  ssr_status st = ssr_server_serve(server);
  // Wake the watcher if serve returned on its own.
  pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
  check(st);
  return kExitOk;
}

int run_planted(const Common& c, std::size_t n) {
  check(ssr_planted_suite(n, c.seed, print_line, nullptr));
  return kExitOk;
}

int exit_code_for(ssr_status s) {
  return s == SSR_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample-select-reason pipeline tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ssr_version()));

  Common common;
  RewardFlags reward;

  auto* extract = app.add_subcommand("extract", "TAG-JSON document -> instance lines or one ego subgraph");
  ExtractCmd ex;
  add_input(extract, common, "TAG-JSON document");
  extract->add_option("--central", ex.central, "Central node ids (omit to emit one instance per task)");
  extract->add_option("--hops", ex.hops, "Neighborhood radius")->capture_default_str();
  extract->add_option("--max-nodes", ex.max_nodes, "Node budget per subgraph")->capture_default_str();
  add_config(extract, common);

  auto* prompt = app.add_subcommand("prompt", "Render task prompts (or judge prompts) from JSONL");
  PromptCmd pr;
  add_input(prompt, common, "Instance JSONL (or diversity requests)");
  prompt->add_option("--sample-count", pr.sample_count, "Candidates the model is asked to sample")
      ->check(CLI::Range(std::size_t{2}, std::size_t{64}))
      ->capture_default_str();
  prompt->add_flag("--diversity", pr.diversity, "Input lines are {a, b, texts} judge requests");
  add_template_dir(prompt, common);
  add_format(prompt, common);
  add_config(prompt, common);

  auto* parse = app.add_subcommand("parse", "Completion text -> canonical trace JSON");
  std::size_t expect_k = 0;
  add_input(parse, common, "Completion text");
  parse->add_option("--expect-k", expect_k, "Expected candidate count (0: no check)")->capture_default_str();
  add_format(parse, common);
  add_config(parse, common);

  ScoringCmd sc;
  auto* verify = app.add_subcommand("verify", "Filter statuses of one completion");
  verify->add_option("--request", sc.request, "Full verify request body");
  verify->add_option("--instance", sc.instance, "Instance JSON");
  verify->add_option("--completion", sc.completions, "Completion text file ('-' for stdin)");
  verify->add_option("--expect-k", sc.expect_k, "Expected candidate count (0: none)");
  add_format(verify, common);
  add_config(verify, common);

  auto* score = app.add_subcommand("score", "Rewards and group advantages of completions");
  score->add_option("--request", sc.request, "Full score request body");
  score->add_option("--instance", sc.instance, "Instance JSON");
  score->add_option("--completion", sc.completions, "Completion text file, repeat for a group");
  score->add_option("--expect-k", sc.expect_k, "Expected candidate count (0: none)");
  add_reward(score, reward);
  add_format(score, common);
  add_config(score, common);

  auto* synth = app.add_subcommand("synth-sft", "Distil and filter teacher traces into an SFT corpus");
  SynthCmd sy;
  add_input(synth, common, "Instance JSONL");
  add_model(synth, sy.teacher, "teacher", true);
  add_model(synth, sy.judge, "judge", false);
  synth->add_option("--cache-dir", sy.cache_dir, "Directory for the judge distance cache");
  synth->add_option("--sample-count", sy.sample_count, "Candidates per completion")
      ->check(CLI::Range(std::size_t{2}, std::size_t{64}))
      ->capture_default_str();
  synth->add_option("--threshold", sy.threshold, "Minimum mean candidate distance")->capture_default_str();
  synth->add_option("--temperature", sy.temperature, "Teacher sampling temperature")->capture_default_str();
  synth->add_option("--emit", sy.emit, "records: every verdict; sft: retained prompt/completion pairs")
      ->check(CLI::IsMember({"records", "sft"}))
      ->capture_default_str();
  add_template_dir(synth, common);
  add_concurrency(synth, common);
  add_seed(synth, common);
  add_config(synth, common);

  auto* assess = app.add_subcommand("assess-difficulty", "Tag instances easy/medium/hard by policy success");
  AssessCmd as;
  add_input(assess, common, "Instance JSONL");
  add_model(assess, as.policy, "policy", true);
  assess->add_option("--trials", as.trials, "Attempts per instance")->check(CLI::PositiveNumber)->capture_default_str();
  assess->add_option("--sample-count", as.sample_count, "Candidates per completion")
      ->check(CLI::Range(std::size_t{2}, std::size_t{64}))
      ->capture_default_str();
  assess->add_option("--temperature", as.temperature, "Sampling temperature")->capture_default_str();
  add_template_dir(assess, common);
  add_concurrency(assess, common);
  add_seed(assess, common);
  add_config(assess, common);

  auto* build = app.add_subcommand("build-rl", "Sample a tier-balanced RL set from tagged instances");
  BuildRlCmd br;
  add_input(build, common, "Tagged instance JSONL");
  build->add_option("--target", br.target, "Number of instances to select")->required();
  build->add_option("--ratio", br.ratio, "easy,medium,hard weights")->delimiter(',')->expected(3)->capture_default_str();
  build->add_option("--report", br.report, "Write the allocation report here instead of stderr");
  add_seed(build, common);
  add_format(build, common);
  add_config(build, common);

  auto* eval = app.add_subcommand("eval", "Accuracy and selected-size report for a policy");
  EvalCmd ev;
  add_input(eval, common, "Instance JSONL");
  add_model(eval, ev.policy, "policy", true);
  eval->add_option("--sample-count", ev.sample_count, "Candidates per completion")
      ->check(CLI::Range(std::size_t{2}, std::size_t{64}))
      ->capture_default_str();
  eval->add_option("--temperature", ev.temperature, "Sampling temperature")->capture_default_str();
  add_reward(eval, reward);
  add_template_dir(eval, common);
  add_concurrency(eval, common);
  add_seed(eval, common);
  add_format(eval, common);
  add_config(eval, common);

  auto* sweep = app.add_subcommand("lambda-sweep", "Accuracy and selected size across lambda values");
  SweepCmd sw;
  add_input(sweep, common, "Instance JSONL");
  sweep->add_option("--lambdas", sw.lambdas, "Lambda values")->delimiter(',')->capture_default_str();
  sweep->add_option("--kappa", sw.kappa, "Size weight of the size_sensitive policy")->capture_default_str();
  sweep->add_option("--sample-count", sw.sample_count, "Candidates per completion")
      ->check(CLI::Range(std::size_t{2}, std::size_t{64}))
      ->capture_default_str();
  sweep->add_option("--size-metric", reward.size_metric, "Subgraph size measure")
      ->check(CLI::IsMember({"node_count", "node_plus_edge_count"}))
      ->capture_default_str();
  add_concurrency(sweep, common);
  add_format(sweep, common);
  add_config(sweep, common);

  auto* serve = app.add_subcommand("serve", "Run the HTTP reward service");
  ServeCmd sv;
  serve->add_option("--host", sv.host, "Listen address")->capture_default_str();
  serve->add_option("--port", sv.port, "Listen port (0 picks a free one)")
      ->check(CLI::Range(0, 65535))
      ->capture_default_str();
  serve->add_option("--threads", sv.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  add_config(serve, common);

  auto* planted = app.add_subcommand("planted-suite", "Emit the seeded planted-noise instance suite");
  std::size_t n_tasks = 200;
  planted->add_option("-n,--tasks", n_tasks, "Number of tasks")->capture_default_str();
  add_seed(planted, common);
  add_config(planted, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    Layers layers;
    layers.apply(*sub, common.config);
    if (sub == extract) return run_extract(common, ex);
    if (sub == prompt) return run_prompt(common, pr);
    if (sub == parse) return run_parse(common, expect_k);
    if (sub == verify) return run_verify(common, sc);
    if (sub == score) return run_score(common, sc, reward, layers);
    if (sub == synth) return run_synth(common, sy, layers);
    if (sub == assess) return run_assess(common, as, layers);
    if (sub == build) return run_build_rl(common, br);
    if (sub == eval) return run_eval(common, ev, reward, layers);
    if (sub == sweep) return run_sweep(common, sw, reward);
    if (sub == serve) return run_serve(sv);
    if (sub == planted) return run_planted(common, n_tasks);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "ssr: %s\n", e.what());
    return kExitUsage;
  } catch (const ApiError& e) {
    std::fprintf(stderr, "ssr: %s\n", e.what());
    return exit_code_for(e.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ssr: %s\n", e.what());
    return kExitData;
  }
}
