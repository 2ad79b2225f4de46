// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssr/chat.hpp"
#include "ssr/prompt.hpp"
#include "ssr/reward.hpp"

namespace ssr {

/// Planted-noise task: the central node text carries the noise label, the
/// clean neighbors carry the gold label and the noisy neighbors carry the
/// noise label. Only the clean group recovers the gold answer.
struct PlantedTask {
  Instance instance;
  Subgraph clean_subgraph;  // central plus the clean neighbors
  std::string noise_label;
};

struct PlantedSuite {
  TextGraph graph;
  std::vector<PlantedTask> tasks;

  std::vector<Instance> instances() const;
};

/// Node texts end with a "[topic: <label>]" cue; fillers carry none.
/// The first task always has two clean and two noisy neighbors.
/// Throws Error(invalid_argument) for n_tasks == 0.
PlantedSuite make_planted_noise_suite(std::size_t n_tasks, std::uint64_t seed);

/// "[topic: X]" cue embedded in a node text, if any.
std::optional<std::string> topic_cue(std::string_view text);

/// Candidate group a scripted policy samples: central only, one group per
/// option label present among the neighbors (in option order), all direct
/// neighbors, then the full context. Duplicates are dropped.
std::vector<Subgraph> scripted_candidates(const Instance& inst);

/// Most frequent topic cue over the subgraph; ties go to the earlier option.
std::optional<std::string> histogram_answer(const Subgraph& g, const Instance& inst);

enum class ScriptedBehavior { oracle_denoiser, greedy_largest, central_only, random_choice, size_sensitive };

const char* to_string(ScriptedBehavior b);
std::optional<ScriptedBehavior> parse_scripted_behavior(std::string_view text);

/// Deterministic stand-in for a trained model. It emits a full
/// Sample-Select-Reason completion, so scoring goes through the real
/// parse / verify / reward path.
class ScriptedPolicy final : public Policy {
 public:
  struct Options {
    ScriptedBehavior behavior = ScriptedBehavior::oracle_denoiser;
    std::uint64_t seed = 0;
    double lambda = 0.1;  // size_sensitive only
    double kappa = 8.0;   // strength of the size preference per unit of lambda
    SizeMetric metric = SizeMetric::node_count;
  };

  explicit ScriptedPolicy(Options opts) : opts_(opts) {}
  std::string respond(const PolicyInput& input) override;

  /// Index into scripted_candidates(inst) that this policy selects.
  std::size_t choose(const Instance& inst, std::span<const Subgraph> candidates, std::size_t trial) const;

 private:
  Options opts_;
};

struct EvalConfig {
  RewardConfig reward;
  std::size_t sample_count = 5;
  double temperature = 0.0;
  std::size_t concurrency = 1;
};

struct EvalReport {
  std::size_t n = 0;
  double accuracy = 0.0;      // status_ans alone
  double success_rate = 0.0;  // real, consistent and correct
  double mean_r1 = 0.0;
  double mean_r2 = 0.0;
  double avg_selected_size = 0.0;  // nodes, over tasks with a valid chosen candidate
  double avg_context_size = 0.0;
  double avg_selected_edges = 0.0;
  double avg_context_edges = 0.0;
  std::size_t selected_count = 0;
  double real_rate = 0.0;
  double consist_rate = 0.0;
  std::size_t failures = 0;  // transport failures, counted as incorrect
  double failure_rate = 0.0;
};

struct EvalRow {
  std::string id;
  RewardBreakdown breakdown;
  std::optional<std::size_t> selected_nodes;
  std::optional<std::size_t> selected_edges;
  std::size_t context_nodes = 0;
  std::size_t context_edges = 0;
  std::optional<std::string> error;
};

struct EvalResult {
  EvalReport report;
  std::vector<EvalRow> rows;
};

/// Every instance needs a gold label.
EvalResult evaluate(std::span<const Instance> instances, Policy& policy, const EvalConfig& cfg = {},
                    const TemplateSet& templates = TemplateSet::builtin());

struct SweepRow {
  double lambda = 0.0;
  double accuracy = 0.0;
  double avg_selected_size = 0.0;
  std::size_t n = 0;
};

/// Evaluates a size-sensitive scripted policy at each lambda. The reward
/// config uses stage 2 with the same lambda.
std::vector<SweepRow> lambda_sweep(std::span<const Instance> instances, std::span<const double> lambdas,
                                   const EvalConfig& cfg = {}, double kappa = 8.0);

/// "lambda,accuracy,avg_selected_size,n" header plus one line per row.
std::string sweep_csv(std::span<const SweepRow> rows);

/// Fixed-width text table of a report.
std::string report_table(const EvalReport& report);

}  // namespace ssr
