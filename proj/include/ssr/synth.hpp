// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ssr/chat.hpp"
#include "ssr/prompt.hpp"
#include "ssr/trace.hpp"
#include "ssr/verify.hpp"

namespace ssr {

enum class RejectionReason { authenticity, diversity, consistency, answer_check, teacher_error };

const char* to_string(RejectionReason reason);
std::optional<RejectionReason> parse_rejection_reason(std::string_view text);

/// Per-filter verdicts in cascade order. A filter that never ran because an
/// earlier one rejected the record stays absent.
struct FilterVerdicts {
  std::optional<bool> authenticity;
  std::optional<bool> diversity;
  std::optional<bool> consistency;
  std::optional<bool> answer;

  friend bool operator==(const FilterVerdicts&, const FilterVerdicts&) = default;
};

struct SynthRecord {
  std::string id;
  TaskInstance task;
  std::string prompt;
  std::string completion;
  SsrTrace trace;
  std::vector<Defect> defects;
  FilterVerdicts verdicts;
  std::set<StructuralFlag> structural_flags;
  std::optional<double> energy;
  std::optional<double> mean_distance;
  bool retained = false;
  std::optional<RejectionReason> rejection_reason;
  std::optional<std::string> error;  // transport message for teacher_error
};

struct SynthConfig {
  std::size_t sample_count = 5;
  double diversity_threshold = kDiversityThreshold;
  double temperature = 0.6;
  std::size_t concurrency = 4;
  TemplateKind template_kind = TemplateKind::node_classification;  // overridden per task kind
};

/// Renders, queries, parses and filters each instance. Filters run in the
/// order authenticity, diversity, consistency, answer and stop at the first
/// failure. Output order follows input order. `sink`, when given, receives
/// each record in order as soon as it and all earlier ones are done.
std::vector<SynthRecord> synthesize_sft(std::span<const Instance> instances, Policy& teacher,
                                        DistanceProvider& judge, const SynthConfig& cfg = {},
                                        const TemplateSet& templates = TemplateSet::builtin(),
                                        const std::function<void(const SynthRecord&)>& sink = {});

/// Re-runs the four filters from the record alone: the context is recovered
/// from the graph block embedded in the prompt.
bool reverify_record(const SynthRecord& record, DistanceProvider& judge,
                     double diversity_threshold = kDiversityThreshold);

enum class DifficultyTier { easy, medium, hard };

inline constexpr std::array<DifficultyTier, 3> kAllTiers = {DifficultyTier::easy, DifficultyTier::medium,
                                                            DifficultyTier::hard};

const char* to_string(DifficultyTier tier);
std::optional<DifficultyTier> parse_tier(std::string_view text);

/// Bands for five trials: 4-5 easy, 2-3 medium, 0-1 hard. Other trial
/// counts scale the band edges: easy iff 5c >= 4t, medium iff 5c >= 2t.
DifficultyTier tier_for(std::size_t correct, std::size_t trials);

struct DifficultyAssessment {
  DifficultyTier tier = DifficultyTier::hard;
  std::size_t correct_count = 0;
  std::size_t trials = 0;
};

struct AssessConfig {
  std::size_t trials = 5;
  std::size_t sample_count = 5;
  double temperature = 1.0;
};

/// A trial counts as correct when its R1 is 1.0.
DifficultyAssessment assess_difficulty(const Instance& instance, Policy& policy, const AssessConfig& cfg = {},
                                       const TemplateSet& templates = TemplateSet::builtin());

struct RlSelection {
  std::vector<std::size_t> indices;          // into the pool, grouped easy, medium, hard
  std::array<std::size_t, 3> requested{};    // ratio split of the target
  std::array<std::size_t, 3> selected{};     // after redistribution
  std::array<std::size_t, 3> available{};
  std::size_t redistributed = 0;             // units moved away from exhausted tiers
};

/// Splits `amount` by integer weights with round-half-to-even, then fixes the
/// sum by largest remainder (ties go to the earlier tier).
std::array<std::size_t, 3> split_by_ratio(std::size_t amount, std::array<std::size_t, 3> weights);

/// Samples without replacement to hit target * ratio per tier. Shortfall of
/// an exhausted tier is split over the tiers that still have supply, in
/// proportion to their weights, until the target is met. Throws
/// Error(invalid_argument) when the pool is smaller than the target.
RlSelection build_rl_dataset(std::span<const DifficultyTier> pool, std::size_t target,
                             std::array<std::size_t, 3> ratio = {2, 2, 1}, std::uint64_t seed = 0);

/// Deterministic generator shared by every seeded component.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next();
  /// Uniform in [0, bound) without modulo bias.
  std::uint64_t below(std::uint64_t bound);
  double unit();  // [0, 1)

 private:
  std::uint64_t state_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace ssr
