// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include "ssr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "ssr/error.hpp"
#include "ssr/synth.hpp"

namespace ssr {

namespace {

const std::vector<std::string>& planted_labels() {
  static const std::vector<std::string> labels = {
      "Theory",         "Probabilistic Methods", "Genetic Algorithms", "Reinforcement Learning",
      "Case-Based",     "Neural Networks",       "Rule Learning",
  };
  return labels;
}

std::string cued_text(std::uint64_t id, std::string_view blurb, std::string_view label) {
  return "Paper " + std::to_string(id) + ": " + std::string(blurb) + " [topic: " + std::string(label) + "]";
}

Subgraph induced(const Subgraph& context, const std::set<NodeId>& neighbors) {
  Subgraph g;
  g.central = context.central;
  g.neighbors = neighbors;
  auto nodes = g.nodes();
  for (const Edge& e : context.edges) {
    if (nodes.count(e.a) && nodes.count(e.b)) g.edges.insert(e);
  }
  return g;
}

std::uint64_t text_hash(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

std::vector<Instance> PlantedSuite::instances() const {
  std::vector<Instance> out;
  out.reserve(tasks.size());
  for (const auto& t : tasks) out.push_back(t.instance);
  return out;
}

std::optional<std::string> topic_cue(std::string_view text) {
  constexpr std::string_view marker = "[topic: ";
  const std::size_t at = text.rfind(marker);
  if (at == std::string_view::npos) return std::nullopt;
  const std::size_t close = text.find(']', at);
  if (close == std::string_view::npos) return std::nullopt;
  return std::string(text.substr(at + marker.size(), close - at - marker.size()));
}

PlantedSuite make_planted_noise_suite(std::size_t n_tasks, std::uint64_t seed) {
  if (n_tasks == 0) throw Error(ErrorKind::invalid_argument, "planted suite needs at least one task");
  const auto& labels = planted_labels();

  struct Plan {
    NodeId central;
    std::vector<NodeId> clean, noisy;
    std::string gold, noise;
  };
  NodeTexts texts;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<Plan> plans;
  std::uint64_t next_id = 0;

  for (std::size_t t = 0; t < n_tasks; ++t) {
    Rng rng(mix_seed(seed, t));
    Plan p;
    const std::size_t gold = rng.below(labels.size());
    std::size_t noise = rng.below(labels.size() - 1);
    if (noise >= gold) ++noise;
    p.gold = labels[gold];
    p.noise = labels[noise];
    // The first task is the two-supportive / two-noisy shape; the rest vary,
    // always with at least as many noisy as clean neighbors so that the
    // central node plus the noisy group outvotes the clean group.
    const std::size_t c = t == 0 ? 2 : 2 + rng.below(2);
    const std::size_t m = t == 0 ? 2 : c + rng.below(2);
    const std::size_t f = t == 0 ? 1 : 1 + rng.below(2);

    p.central = NodeId{next_id++};
    std::vector<NodeId> ring;
    for (std::size_t i = 0; i < c + m; ++i) ring.push_back(NodeId{next_id++});
    for (std::size_t i = ring.size(); i > 1; --i) std::swap(ring[i - 1], ring[rng.below(i)]);
    p.clean.assign(ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(c));
    p.noisy.assign(ring.begin() + static_cast<std::ptrdiff_t>(c), ring.end());

    texts[p.central] = cued_text(p.central.value, "a study whose abstract touches several themes.", p.noise);
    for (NodeId n : p.clean) {
      texts[n] = cued_text(n.value, "closely related work sharing the core method.", p.gold);
      edges.emplace_back(p.central, n);
    }
    for (NodeId n : p.noisy) {
      texts[n] = cued_text(n.value, "a frequently co-cited paper from a neighbouring area.", p.noise);
      edges.emplace_back(p.central, n);
    }
    edges.emplace_back(p.clean.front(), p.noisy.front());
    for (std::size_t i = 0; i < f; ++i) {
      NodeId filler{next_id++};
      texts[filler] = "Paper " + std::to_string(filler.value) + ": a loosely connected reference.";
      edges.emplace_back(filler, ring[rng.below(ring.size())]);
    }
    plans.push_back(std::move(p));
  }

  PlantedSuite suite{TextGraph::build(std::move(texts), edges), {}};
  for (std::size_t t = 0; t < plans.size(); ++t) {
    const Plan& p = plans[t];
    TaskInstance task;
    task.kind = TaskKind::node_classification;
    task.central = {p.central};
    task.options = labels;
    task.gold_label = p.gold;
    PlantedTask pt;
    pt.instance = make_instance(suite.graph, task, "planted-" + std::to_string(t));
    pt.clean_subgraph = induced(pt.instance.context, {p.clean.begin(), p.clean.end()});
    pt.noise_label = p.noise;
    suite.tasks.push_back(std::move(pt));
  }
  return suite;
}

std::vector<Subgraph> scripted_candidates(const Instance& inst) {
  const Subgraph& ctx = inst.context;
  std::vector<Subgraph> out;
  auto push = [&](Subgraph g) {
    if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(std::move(g));
  };
  push(induced(ctx, {}));
  for (const auto& label : inst.task.options) {
    std::set<NodeId> group;
    for (NodeId n : ctx.neighbors) {
      auto it = inst.texts.find(n);
      if (it == inst.texts.end()) continue;
      auto cue = topic_cue(it->second);
      if (cue && normalize_label(*cue) == normalize_label(label)) group.insert(n);
    }
    if (!group.empty()) push(induced(ctx, group));
  }
  std::set<NodeId> direct;
  const auto central = ctx.central_set();
  for (const Edge& e : ctx.edges) {
    if (central.count(e.a) && !central.count(e.b)) direct.insert(e.b);
    if (central.count(e.b) && !central.count(e.a)) direct.insert(e.a);
  }
  push(induced(ctx, direct));
  push(ctx);
  return out;
}

std::optional<std::string> histogram_answer(const Subgraph& g, const Instance& inst) {
  std::map<std::string, std::size_t> counts;
  for (NodeId n : g.nodes()) {
    auto it = inst.texts.find(n);
    if (it == inst.texts.end()) continue;
    if (auto cue = topic_cue(it->second)) ++counts[normalize_label(*cue)];
  }
  std::optional<std::string> best;
  std::size_t best_count = 0;
  for (const auto& label : inst.task.options) {
    auto it = counts.find(normalize_label(label));
    if (it != counts.end() && it->second > best_count) {
      best = label;
      best_count = it->second;
    }
  }
  return best;
}

const char* to_string(ScriptedBehavior b) {
  switch (b) {
    case ScriptedBehavior::oracle_denoiser: return "oracle_denoiser";
    case ScriptedBehavior::greedy_largest: return "greedy_largest";
    case ScriptedBehavior::central_only: return "central_only";
    case ScriptedBehavior::random_choice: return "random_choice";
    case ScriptedBehavior::size_sensitive: return "size_sensitive";
  }
  return "unknown";
}

std::optional<ScriptedBehavior> parse_scripted_behavior(std::string_view text) {
  for (auto b : {ScriptedBehavior::oracle_denoiser, ScriptedBehavior::greedy_largest, ScriptedBehavior::central_only,
                 ScriptedBehavior::random_choice, ScriptedBehavior::size_sensitive}) {
    if (text == to_string(b)) return b;
  }
  return std::nullopt;
}

std::size_t ScriptedPolicy::choose(const Instance& inst, std::span<const Subgraph> candidates,
                                   std::size_t trial) const {
  const std::size_t n = candidates.size();
  auto size_of = [&](std::size_t i) { return subgraph_size(candidates[i], opts_.metric); };
  switch (opts_.behavior) {
    case ScriptedBehavior::central_only:
      return 0;
    case ScriptedBehavior::greedy_largest: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (size_of(i) > size_of(best)) best = i;
      }
      return best;
    }
    case ScriptedBehavior::random_choice: {
      Rng rng(mix_seed(opts_.seed, text_hash(inst.id) ^ (trial * 0x100000001b3ull)));
      return static_cast<std::size_t>(rng.below(n));
    }
    case ScriptedBehavior::oracle_denoiser: {
      const auto& gold = inst.task.gold_label;
      if (!gold) return 0;
      // The gold label group is the clean subgraph.
      for (std::size_t i = 1; i < n; ++i) {
        bool all_gold = !candidates[i].neighbors.empty();
        for (NodeId v : candidates[i].neighbors) {
          auto it = inst.texts.find(v);
          auto cue = it == inst.texts.end() ? std::nullopt : topic_cue(it->second);
          if (!cue || normalize_label(*cue) != normalize_label(*gold)) all_gold = false;
        }
        if (all_gold) return i;
      }
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < n; ++i) {
        auto ans = histogram_answer(candidates[i], inst);
        if (ans && normalize_label(*ans) == normalize_label(*gold) && (!best || size_of(i) < size_of(*best))) best = i;
      }
      return best.value_or(0);
    }
    case ScriptedBehavior::size_sensitive: {
      // Coverage has diminishing returns in size: log(size) / log(context).
      const double log_ctx = std::log(static_cast<double>(subgraph_size(inst.context, opts_.metric)));
      auto coverage = [&](std::size_t i) {
        if (log_ctx <= 0.0) return 1.0;
        return std::log(static_cast<double>(std::max<std::size_t>(size_of(i), 1))) / log_ctx;
      };
      std::size_t best = 0;
      double best_score = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double score = coverage(i) + opts_.kappa * opts_.lambda * size_rank(candidates, i, opts_.metric).r_s;
        const bool better = score > best_score || (score == best_score && size_of(i) < size_of(best));
        if (better) {
          best = i;
          best_score = score;
        }
      }
      return best;
    }
  }
  return 0;
}

std::string ScriptedPolicy::respond(const PolicyInput& input) {
  Instance inst{input.task_id, input.task, input.context, input.texts};
  SsrTrace trace;
  trace.candidates = scripted_candidates(inst);
  const std::size_t chosen = choose(inst, trace.candidates, input.trial);
  trace.chosen_index = chosen;
  trace.repeated_subgraph = trace.candidates[chosen];
  trace.answer = histogram_answer(trace.candidates[chosen], inst).value_or(inst.task.options.front());
  trace.chosen_reason = std::string("selected by the ") + to_string(opts_.behavior) + " rule";
  trace.reasoning = "the most frequent topic among the selected nodes is " + *trace.answer;
  return format_trace(trace);
}

EvalResult evaluate(std::span<const Instance> instances, Policy& policy, const EvalConfig& cfg,
                    const TemplateSet& templates) {
  validate(cfg.reward);
  for (const auto& inst : instances) {
    if (!inst.task.gold_label) throw Error(ErrorKind::missing_gold, "evaluation needs a gold label: " + inst.id);
  }
  auto rows = ordered_parallel_map<EvalRow>(instances.size(), cfg.concurrency, [&](std::size_t i) {
    const Instance& inst = instances[i];
    EvalRow row;
    row.id = inst.id;
    row.context_nodes = inst.context.node_count();
    row.context_edges = inst.context.edges.size();
    row.breakdown.stage = cfg.reward.stage;
    PromptConfig pc{cfg.sample_count, template_for(inst.task.kind)};
    const std::string prompt = render_task_prompt(inst.context, inst.texts, inst.task, pc, templates).text;
    std::string completion;
    try {
      completion = policy.respond(PolicyInput{prompt, inst.task, inst.context, inst.texts, inst.id, 0, cfg.temperature});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::transport) throw;
      row.error = e.what();
      return row;
    }
    SsrTrace trace = parse_trace(completion, cfg.sample_count).trace;
    VerifyOutcome v = verify(inst.context, inst.texts, trace, inst.task, {cfg.sample_count, nullptr});
    row.breakdown = reward_r2(v, trace.candidates, trace.chosen_index, cfg.reward);
    if (trace.chosen_index && *trace.chosen_index < trace.candidates.size()) {
      const Subgraph& g = trace.candidates[*trace.chosen_index];
      row.selected_nodes = g.node_count();
      row.selected_edges = g.edges.size();
    }
    return row;
  });

  EvalResult result;
  EvalReport& r = result.report;
  r.n = rows.size();
  double correct = 0, success = 0, real = 0, consist = 0, sel_nodes = 0, sel_edges = 0, ctx_nodes = 0, ctx_edges = 0;
  for (const auto& row : rows) {
    const auto& b = row.breakdown;
    correct += b.status_ans;
    success += b.r1 == 1.0;
    real += b.status_real;
    consist += b.status_consist;
    r.mean_r1 += b.r1;
    r.mean_r2 += b.r2;
    ctx_nodes += static_cast<double>(row.context_nodes);
    ctx_edges += static_cast<double>(row.context_edges);
    if (row.selected_nodes) {
      ++r.selected_count;
      sel_nodes += static_cast<double>(*row.selected_nodes);
      sel_edges += static_cast<double>(*row.selected_edges);
    }
    if (row.error) ++r.failures;
  }
  if (r.n > 0) {
    const double n = static_cast<double>(r.n);
    r.accuracy = correct / n;
    r.success_rate = success / n;
    r.real_rate = real / n;
    r.consist_rate = consist / n;
    r.mean_r1 /= n;
    r.mean_r2 /= n;
    r.avg_context_size = ctx_nodes / n;
    r.avg_context_edges = ctx_edges / n;
    r.failure_rate = static_cast<double>(r.failures) / n;
  }
  if (r.selected_count > 0) {
    r.avg_selected_size = sel_nodes / static_cast<double>(r.selected_count);
    r.avg_selected_edges = sel_edges / static_cast<double>(r.selected_count);
  }
  result.rows = std::move(rows);
  return result;
}

std::vector<SweepRow> lambda_sweep(std::span<const Instance> instances, std::span<const double> lambdas,
                                   const EvalConfig& cfg, double kappa) {
  std::vector<SweepRow> out;
  for (double lambda : lambdas) {
    EvalConfig c = cfg;
    c.reward.stage = Stage::stage2_denoising;
    c.reward.lambda = lambda;
    ScriptedPolicy policy({ScriptedBehavior::size_sensitive, 0, lambda, kappa, cfg.reward.size_metric});
    EvalReport r = evaluate(instances, policy, c).report;
    out.push_back({lambda, r.accuracy, r.avg_selected_size, r.n});
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "lambda,accuracy,avg_selected_size,n\n";
  for (const auto& r : rows) {
    out += fmt(r.lambda) + "," + fmt(r.accuracy) + "," + fmt(r.avg_selected_size) + "," + std::to_string(r.n) + "\n";
  }
  return out;
}

std::string report_table(const EvalReport& r) {
  std::string out;
  auto line = [&](const char* name, const std::string& value) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-20s %s\n", name, value.c_str());
    out += buf;
  };
  line("n", std::to_string(r.n));
  line("accuracy", fmt(r.accuracy));
  line("success_rate", fmt(r.success_rate));
  line("mean_r1", fmt(r.mean_r1));
  line("mean_r2", fmt(r.mean_r2));
  line("avg_selected_size", fmt(r.avg_selected_size));
  line("avg_context_size", fmt(r.avg_context_size));
  line("avg_selected_edges", fmt(r.avg_selected_edges));
  line("avg_context_edges", fmt(r.avg_context_edges));
  line("real_rate", fmt(r.real_rate));
  line("consist_rate", fmt(r.consist_rate));
  line("failures", std::to_string(r.failures));
  return out;
}

}  // namespace ssr
