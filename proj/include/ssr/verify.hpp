// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>

#include "ssr/chat.hpp"
#include "ssr/graph.hpp"
#include "ssr/prompt.hpp"
#include "ssr/trace.hpp"

namespace ssr {

enum class StructuralFlag { missing_central_only_candidate, wrong_candidate_count, duplicate_candidates };

const char* to_string(StructuralFlag flag);
std::optional<StructuralFlag> parse_structural_flag(std::string_view text);

struct VerifyOutcome {
  bool status_real = false;
  bool status_consist = false;
  std::optional<bool> status_ans;  // absent when the task has no gold label
  std::set<StructuralFlag> structural_flags;
  std::optional<double> energy;
  std::optional<double> mean_distance;

  friend bool operator==(const VerifyOutcome&, const VerifyOutcome&) = default;
};

/// Guard for zero distances inside the energy sum.
inline constexpr double kDistanceFloor = 1e-3;
/// Retention threshold on mean pairwise distance.
inline constexpr double kDiversityThreshold = 0.3;

/// Pairwise subgraph distance in [0, 1]. Implementations are symmetric and
/// safe to call concurrently.
class DistanceProvider {
 public:
  virtual ~DistanceProvider() = default;
  virtual const char* kind() const = 0;
  virtual double distance(const Subgraph& a, const Subgraph& b, const NodeTexts& texts) = 0;
};

/// 1 - |items(a) ∩ items(b)| / |items(a) ∪ items(b)| where items are the node
/// ids plus the edges, each tagged so nodes and edges never collide.
double jaccard_distance(const Subgraph& a, const Subgraph& b);

class JaccardDistance final : public DistanceProvider {
 public:
  const char* kind() const override { return "jaccard_structural"; }
  double distance(const Subgraph& a, const Subgraph& b, const NodeTexts&) override {
    return jaccard_distance(a, b);
  }
};

/// Digest of the unordered pair {a, b}; identical for (a, b) and (b, a).
std::string pair_digest(const Subgraph& a, const Subgraph& b, const NodeTexts& texts);

/// Append-only JSONL store of {"digest","distance","provider","timestamp"}.
/// Later records for the same digest override earlier ones on load. Reads
/// take a shared lock; writes are serialized.
class DistanceCache {
 public:
  DistanceCache() = default;
  explicit DistanceCache(std::filesystem::path file);

  std::optional<double> lookup(const std::string& digest) const;
  void store(const std::string& digest, double distance, std::string_view provider);
  std::size_t size() const;

 private:
  std::filesystem::path file_;
  mutable std::mutex mu_;
  std::map<std::string, double> entries_;
};

/// Asks a chat model for the distance using the diversity-judge prompt.
/// Pairs are digested and rendered in a canonical order, so the answer is
/// symmetric. Throws Error(provider) when the judge is unreachable or its
/// reply carries no score and the pair is not cached.
class JudgeDistance final : public DistanceProvider {
 public:
  JudgeDistance(ChatClient& judge, DistanceCache* cache = nullptr,
                const TemplateSet& templates = TemplateSet::builtin());
  const char* kind() const override { return "llm_judge"; }
  double distance(const Subgraph& a, const Subgraph& b, const NodeTexts& texts) override;

 private:
  ChatClient& judge_;
  DistanceCache* cache_;
  const TemplateSet& templates_;
};

bool check_authenticity(const Subgraph& context, const SsrTrace& trace);
bool check_consistency(const SsrTrace& trace);
/// Throws Error(missing_gold) when the task has no gold label.
bool check_answer(const std::optional<std::string>& answer, const TaskInstance& task);

struct GroupEnergy {
  double energy = 0.0;
  double mean_distance = 0.0;
};

/// Needs at least two candidates. Each unordered pair is measured once.
GroupEnergy group_energy(std::span<const Subgraph> candidates, const NodeTexts& texts, DistanceProvider& d);

std::set<StructuralFlag> structural_flags(const Subgraph& context, const SsrTrace& trace,
                                          std::size_t expected_k);

struct VerifyOptions {
  std::size_t expected_k = 5;
  DistanceProvider* distance = nullptr;  // null skips energy
};

/// All checks at once. Energy is computed only for authentic groups of two
/// or more candidates when a provider is given.
VerifyOutcome verify(const Subgraph& context, const NodeTexts& texts, const SsrTrace& trace,
                     const TaskInstance& task, const VerifyOptions& options = {});

}  // namespace ssr
