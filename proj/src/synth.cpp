// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include "ssr/synth.hpp"

#include <algorithm>
#include <numeric>

#include "ssr/error.hpp"
#include "ssr/reward.hpp"

namespace ssr {

const char* to_string(RejectionReason reason) {
  switch (reason) {
    case RejectionReason::authenticity: return "authenticity";
    case RejectionReason::diversity: return "diversity";
    case RejectionReason::consistency: return "consistency";
    case RejectionReason::answer_check: return "answer_check";
    case RejectionReason::teacher_error: return "teacher_error";
  }
  return "unknown";
}

std::optional<RejectionReason> parse_rejection_reason(std::string_view text) {
  for (auto r : {RejectionReason::authenticity, RejectionReason::diversity, RejectionReason::consistency,
                 RejectionReason::answer_check, RejectionReason::teacher_error}) {
    if (text == to_string(r)) return r;
  }
  return std::nullopt;
}

namespace {

// Runs the cascade on an already parsed completion. Shared by synthesis and
// post-hoc re-verification so both apply identical rules.
void run_filters(SynthRecord& rec, const Subgraph& context, const NodeTexts& texts, DistanceProvider& judge,
                 double threshold) {
  rec.verdicts.authenticity = check_authenticity(context, rec.trace);
  if (!*rec.verdicts.authenticity) {
    rec.rejection_reason = RejectionReason::authenticity;
    return;
  }
  if (rec.trace.candidates.size() >= 2) {
    GroupEnergy e = group_energy(rec.trace.candidates, texts, judge);
    rec.energy = e.energy;
    rec.mean_distance = e.mean_distance;
    rec.verdicts.diversity = e.mean_distance >= threshold;
  } else {
    rec.verdicts.diversity = false;  // a single candidate has no diversity to measure
  }
  if (!*rec.verdicts.diversity) {
    rec.rejection_reason = RejectionReason::diversity;
    return;
  }
  rec.verdicts.consistency = check_consistency(rec.trace);
  if (!*rec.verdicts.consistency) {
    rec.rejection_reason = RejectionReason::consistency;
    return;
  }
  rec.verdicts.answer = check_answer(rec.trace.answer, rec.task);
  if (!*rec.verdicts.answer) {
    rec.rejection_reason = RejectionReason::answer_check;
    return;
  }
  rec.retained = true;
}

SynthRecord synthesize_one(const Instance& inst, Policy& teacher, DistanceProvider& judge, const SynthConfig& cfg,
                           const TemplateSet& templates) {
  SynthRecord rec;
  rec.id = inst.id;
  rec.task = inst.task;
  PromptConfig pc{cfg.sample_count, template_for(inst.task.kind)};
  rec.prompt = render_task_prompt(inst.context, inst.texts, inst.task, pc, templates).text;
  try {
    rec.completion = teacher.respond(PolicyInput{rec.prompt, inst.task, inst.context, inst.texts, inst.id, 0,
                                                 cfg.temperature});
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::transport) throw;
    rec.rejection_reason = RejectionReason::teacher_error;
    rec.error = e.what();
    return rec;
  }
  ParseReport report = parse_trace(rec.completion, cfg.sample_count);
  rec.trace = std::move(report.trace);
  rec.defects = std::move(report.defects);
  rec.structural_flags = structural_flags(inst.context, rec.trace, cfg.sample_count);
  run_filters(rec, inst.context, inst.texts, judge, cfg.diversity_threshold);
  return rec;
}

// The graph block spans from the central-ids line through the closing line
// of the connection list.
std::string_view extract_graph_block(std::string_view prompt) {
  const std::size_t begin = prompt.find("- Central node ID(s):");
  if (begin == std::string_view::npos) return {};
  const std::size_t conn = prompt.find("- Connection relationships:", begin);
  if (conn == std::string_view::npos) return {};
  std::size_t eol = prompt.find('\n', conn);
  std::string_view first = prompt.substr(conn, eol == std::string_view::npos ? std::string_view::npos : eol - conn);
  if (first.find(']') != std::string_view::npos || eol == std::string_view::npos) {
    return prompt.substr(begin, conn + first.size() - begin);
  }
  std::size_t close = prompt.find("\n]", eol);
  if (close == std::string_view::npos) return {};
  return prompt.substr(begin, close + 2 - begin);
}

}  // namespace

std::vector<SynthRecord> synthesize_sft(std::span<const Instance> instances, Policy& teacher,
                                        DistanceProvider& judge, const SynthConfig& cfg,
                                        const TemplateSet& templates,
                                        const std::function<void(const SynthRecord&)>& sink) {
  for (const auto& inst : instances) {
    if (!inst.task.gold_label) throw Error(ErrorKind::missing_gold, "synthesis needs a gold label: " + inst.id);
  }
  std::vector<SynthRecord> out;
  out.reserve(instances.size());
  // Batches bound memory of in-flight work while keeping the output ordered.
  const std::size_t batch = std::max<std::size_t>(cfg.concurrency, 1) * 4;
  for (std::size_t start = 0; start < instances.size(); start += batch) {
    const std::size_t len = std::min(batch, instances.size() - start);
    auto records = ordered_parallel_map<SynthRecord>(len, cfg.concurrency, [&](std::size_t i) {
      return synthesize_one(instances[start + i], teacher, judge, cfg, templates);
    });
    for (auto& r : records) {
      if (sink) sink(r);
      out.push_back(std::move(r));
    }
  }
  return out;
}

bool reverify_record(const SynthRecord& record, DistanceProvider& judge, double diversity_threshold) {
  std::string_view block = extract_graph_block(record.prompt);
  if (block.empty()) return false;
  GraphBlock g = parse_graph_block(block);
  SynthRecord check;
  check.task = record.task;
  check.trace = parse_trace(record.completion, record.trace.candidates.size()).trace;
  if (!(check.trace == record.trace)) return false;
  run_filters(check, g.subgraph, g.texts, judge, diversity_threshold);
  return check.retained == record.retained && check.verdicts == record.verdicts;
}

const char* to_string(DifficultyTier tier) {
  switch (tier) {
    case DifficultyTier::easy: return "easy";
    case DifficultyTier::medium: return "medium";
    case DifficultyTier::hard: return "hard";
  }
  return "unknown";
}

std::optional<DifficultyTier> parse_tier(std::string_view text) {
  for (auto t : kAllTiers) {
    if (text == to_string(t)) return t;
  }
  return std::nullopt;
}

DifficultyTier tier_for(std::size_t correct, std::size_t trials) {
  if (trials == 0) throw Error(ErrorKind::invalid_argument, "tier_for: trials must be >= 1");
  if (correct > trials) throw Error(ErrorKind::invalid_argument, "tier_for: more correct trials than trials");
  if (5 * correct >= 4 * trials) return DifficultyTier::easy;
  if (5 * correct >= 2 * trials) return DifficultyTier::medium;
  return DifficultyTier::hard;
}

DifficultyAssessment assess_difficulty(const Instance& inst, Policy& policy, const AssessConfig& cfg,
                                       const TemplateSet& templates) {
  if (cfg.trials < 1) throw Error(ErrorKind::invalid_argument, "assess_difficulty: trials must be >= 1");
  if (!inst.task.gold_label) throw Error(ErrorKind::missing_gold, "difficulty needs a gold label: " + inst.id);
  PromptConfig pc{cfg.sample_count, template_for(inst.task.kind)};
  const std::string prompt = render_task_prompt(inst.context, inst.texts, inst.task, pc, templates).text;
  DifficultyAssessment out;
  out.trials = cfg.trials;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    std::string completion =
        policy.respond(PolicyInput{prompt, inst.task, inst.context, inst.texts, inst.id, t, cfg.temperature});
    SsrTrace trace = parse_trace(completion, cfg.sample_count).trace;
    VerifyOutcome v = verify(inst.context, inst.texts, trace, inst.task, {cfg.sample_count, nullptr});
    if (reward_r1(v) == 1.0) ++out.correct_count;
  }
  out.tier = tier_for(out.correct_count, out.trials);
  return out;
}

namespace {

std::uint64_t round_half_even(std::uint64_t num, std::uint64_t den) {
  const std::uint64_t q = num / den;
  const std::uint64_t r = num % den;
  if (2 * r > den) return q + 1;
  if (2 * r < den) return q;
  return (q % 2 == 0) ? q : q + 1;
}

}  // namespace

std::array<std::size_t, 3> split_by_ratio(std::size_t amount, std::array<std::size_t, 3> weights) {
  const std::uint64_t total = std::accumulate(weights.begin(), weights.end(), std::uint64_t{0});
  std::array<std::size_t, 3> out{};
  if (total == 0 || amount == 0) return out;
  std::size_t sum = 0;
  for (std::size_t t = 0; t < 3; ++t) {
    out[t] = round_half_even(std::uint64_t{amount} * weights[t], total);
    sum += out[t];
  }
  // residual_t * total = exact share minus the rounded share, kept integral.
  auto residual = [&](std::size_t t) {
    return static_cast<std::int64_t>(std::uint64_t{amount} * weights[t]) -
           static_cast<std::int64_t>(out[t] * total);
  };
  while (sum < amount) {
    std::size_t best = 3;
    for (std::size_t t = 0; t < 3; ++t) {
      if (weights[t] == 0) continue;
      if (best == 3 || residual(t) > residual(best)) best = t;
    }
    ++out[best];
    ++sum;
  }
  while (sum > amount) {
    std::size_t best = 3;
    for (std::size_t t = 0; t < 3; ++t) {
      if (out[t] == 0) continue;
      if (best == 3 || residual(t) < residual(best)) best = t;
    }
    --out[best];
    --sum;
  }
  return out;
}

Rng::Rng(std::uint64_t seed) : state_(seed) {}

std::uint64_t Rng::next() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorKind::invalid_argument, "Rng::below: zero bound");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  Rng r(seed ^ (salt * 0x9e3779b97f4a7c15ull));
  return r.next();
}

RlSelection build_rl_dataset(std::span<const DifficultyTier> pool, std::size_t target,
                             std::array<std::size_t, 3> ratio, std::uint64_t seed) {
  if (pool.empty()) throw Error(ErrorKind::invalid_argument, "build_rl_dataset: empty pool");
  if (target == 0) throw Error(ErrorKind::invalid_argument, "build_rl_dataset: target must be positive");
  if (pool.size() < target) {
    throw Error(ErrorKind::invalid_argument, "build_rl_dataset: pool of " + std::to_string(pool.size()) +
                                                 " is smaller than target " + std::to_string(target));
  }
  if (ratio[0] + ratio[1] + ratio[2] == 0) throw Error(ErrorKind::invalid_argument, "build_rl_dataset: zero ratio");

  std::array<std::vector<std::size_t>, 3> members;
  for (std::size_t i = 0; i < pool.size(); ++i) members[static_cast<std::size_t>(pool[i])].push_back(i);

  RlSelection out;
  for (std::size_t t = 0; t < 3; ++t) out.available[t] = members[t].size();
  out.requested = split_by_ratio(target, ratio);

  std::array<std::size_t, 3> alloc = out.requested;
  while (true) {
    std::size_t shortfall = 0;
    std::array<std::size_t, 3> weights{};
    for (std::size_t t = 0; t < 3; ++t) {
      if (alloc[t] > out.available[t]) {
        shortfall += alloc[t] - out.available[t];
        alloc[t] = out.available[t];
      }
    }
    if (shortfall == 0) break;
    out.redistributed += shortfall;
    for (std::size_t t = 0; t < 3; ++t) weights[t] = alloc[t] < out.available[t] ? ratio[t] : 0;
    if (weights[0] + weights[1] + weights[2] == 0) {
      // Tiers with zero ratio still hold supply; fall back to equal weights.
      for (std::size_t t = 0; t < 3; ++t) weights[t] = alloc[t] < out.available[t] ? 1 : 0;
    }
    auto extra = split_by_ratio(shortfall, weights);
    for (std::size_t t = 0; t < 3; ++t) alloc[t] += extra[t];
  }
  out.selected = alloc;

  for (std::size_t t = 0; t < 3; ++t) {
    auto& m = members[t];
    Rng rng(mix_seed(seed, t + 1));
    // Partial Fisher-Yates: the first alloc[t] slots become the sample.
    for (std::size_t i = 0; i < alloc[t]; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.below(m.size() - i));
      std::swap(m[i], m[j]);
      out.indices.push_back(m[i]);
    }
  }
  return out;
}

}  // namespace ssr
