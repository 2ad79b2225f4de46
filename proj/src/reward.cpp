// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include "ssr/reward.hpp"

#include <algorithm>
#include <cmath>

#include "ssr/error.hpp"

namespace ssr {

const char* to_string(Stage stage) {
  return stage == Stage::stage1_authenticity ? "stage1_authenticity" : "stage2_denoising";
}

std::optional<Stage> parse_stage(std::string_view text) {
  if (text == "stage1_authenticity" || text == "stage1" || text == "1") return Stage::stage1_authenticity;
  if (text == "stage2_denoising" || text == "stage2" || text == "2") return Stage::stage2_denoising;
  return std::nullopt;
}

const char* to_string(SizeMetric metric) {
  return metric == SizeMetric::node_count ? "node_count" : "node_plus_edge_count";
}

std::optional<SizeMetric> parse_size_metric(std::string_view text) {
  if (text == "node_count") return SizeMetric::node_count;
  if (text == "node_plus_edge_count") return SizeMetric::node_plus_edge_count;
  return std::nullopt;
}

void validate(const RewardConfig& cfg) {
  if (!std::isfinite(cfg.lambda) || cfg.lambda < 0.0) {
    throw Error(ErrorKind::invalid_argument, "lambda must be a finite non-negative number");
  }
}

double reward_r1(bool real, bool consist, bool ans) {
  if (!real) return 0.0;
  if (!consist) return 0.05;
  return ans ? 1.0 : 0.1;
}

double reward_r1(const VerifyOutcome& outcome) {
  if (!outcome.status_ans) throw Error(ErrorKind::missing_gold, "reward needs a gold label");
  return reward_r1(outcome.status_real, outcome.status_consist, *outcome.status_ans);
}

std::size_t subgraph_size(const Subgraph& g, SizeMetric metric) {
  std::size_t n = g.node_count();
  if (metric == SizeMetric::node_plus_edge_count) n += g.edges.size();
  return n;
}

SizeRank size_rank(std::span<const Subgraph> candidates, std::size_t chosen_index, SizeMetric metric) {
  if (chosen_index >= candidates.size()) {
    throw Error(ErrorKind::invalid_argument, "size_rank: chosen index " + std::to_string(chosen_index) +
                                                 " out of range for " + std::to_string(candidates.size()) +
                                                 " candidates");
  }
  if (candidates.size() == 1) return {};
  const std::size_t chosen = subgraph_size(candidates[chosen_index], metric);
  SizeRank out;
  for (const auto& c : candidates) {
    if (subgraph_size(c, metric) > chosen) ++out.rho;
  }
  out.r_s = static_cast<double>(out.rho) / static_cast<double>(candidates.size() - 1);
  return out;
}

RewardBreakdown reward_r2(const VerifyOutcome& outcome, std::span<const Subgraph> candidates,
                          std::optional<std::size_t> chosen_index, const RewardConfig& cfg) {
  validate(cfg);
  RewardBreakdown b;
  b.r1 = reward_r1(outcome);
  b.status_real = outcome.status_real;
  b.status_consist = outcome.status_consist;
  b.status_ans = *outcome.status_ans;
  b.stage = cfg.stage;
  b.r2 = b.r1;
  if (cfg.stage == Stage::stage2_denoising && b.r1 == 1.0) {
    if (!chosen_index) throw Error(ErrorKind::invalid_argument, "reward_r2: full success without a chosen index");
    SizeRank rank = size_rank(candidates, *chosen_index, cfg.size_metric);
    b.rho = rank.rho;
    b.r_s = rank.r_s;
    b.r2 = 1.0 + cfg.lambda * rank.r_s;
  }
  return b;
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.empty()) throw Error(ErrorKind::invalid_argument, "group_advantages needs at least one reward");
  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= n;
  std::vector<double> out(rewards.size(), 0.0);
  const bool constant = std::all_of(rewards.begin(), rewards.end(), [&](double r) { return r == rewards[0]; });
  if (constant) return out;
  const double scale = std::max(std::sqrt(var), kAdvantageEpsilon);
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / scale;
  return out;
}

double grpo_objective(std::span<const double> ratios, std::span<const double> advantages,
                      std::span<const double> kl, double epsilon, double beta) {
  if (ratios.size() != advantages.size() || ratios.size() != kl.size()) {
    throw Error(ErrorKind::invalid_argument, "grpo_objective: ratios, advantages and kl differ in length");
  }
  if (ratios.empty()) throw Error(ErrorKind::invalid_argument, "grpo_objective: empty group");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::invalid_argument, "grpo_objective: epsilon must be in (0, 1)");
  if (!(beta >= 0.0)) throw Error(ErrorKind::invalid_argument, "grpo_objective: beta must be >= 0");
  double sum = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double clipped = std::clamp(ratios[i], 1.0 - epsilon, 1.0 + epsilon);
    sum += std::min(ratios[i] * advantages[i], clipped * advantages[i]) - beta * kl[i];
  }
  return -sum / static_cast<double>(ratios.size());
}

}  // namespace ssr
