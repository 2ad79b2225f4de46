// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ssr/graph.hpp"
#include "ssr/verify.hpp"

namespace ssr {

enum class Stage { stage1_authenticity, stage2_denoising };
enum class SizeMetric { node_count, node_plus_edge_count };

const char* to_string(Stage stage);
/// Accepts the full names and the short forms "stage1" / "stage2" / "1" / "2".
std::optional<Stage> parse_stage(std::string_view text);
const char* to_string(SizeMetric metric);
std::optional<SizeMetric> parse_size_metric(std::string_view text);

struct RewardConfig {
  double lambda = 0.1;
  Stage stage = Stage::stage1_authenticity;
  SizeMetric size_metric = SizeMetric::node_count;
};

/// Throws Error(invalid_argument) for a negative or non-finite lambda.
void validate(const RewardConfig& cfg);

struct RewardBreakdown {
  bool status_real = false;
  bool status_consist = false;
  bool status_ans = false;
  double r1 = 0.0;
  std::optional<std::size_t> rho;
  std::optional<double> r_s;
  double r2 = 0.0;
  Stage stage = Stage::stage1_authenticity;

  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

double reward_r1(bool real, bool consist, bool ans);
/// Throws Error(missing_gold) when status_ans is absent.
double reward_r1(const VerifyOutcome& outcome);

std::size_t subgraph_size(const Subgraph& g, SizeMetric metric);

struct SizeRank {
  std::size_t rho = 0;
  double r_s = 0.0;
};

/// rho counts candidates strictly larger than the chosen one; r_s scales it
/// by |S| - 1. A single candidate ranks as rho = 0, r_s = 0.
SizeRank size_rank(std::span<const Subgraph> candidates, std::size_t chosen_index, SizeMetric metric);

RewardBreakdown reward_r2(const VerifyOutcome& outcome, std::span<const Subgraph> candidates,
                          std::optional<std::size_t> chosen_index, const RewardConfig& cfg);

/// Stabilizer for the group standard deviation.
inline constexpr double kAdvantageEpsilon = 1e-8;

/// (r - mean) / max(population stdev, kAdvantageEpsilon); exactly zero for
/// constant groups.
std::vector<double> group_advantages(std::span<const double> rewards);

/// -(1/G) * sum(min(ratio*A, clip(ratio, 1-eps, 1+eps)*A) - beta*kl).
double grpo_objective(std::span<const double> ratios, std::span<const double> advantages,
                      std::span<const double> kl, double epsilon, double beta);

}  // namespace ssr
