// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include "ssr/verify.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "ssr/codec.hpp"
#include "ssr/error.hpp"

namespace ssr {

const char* to_string(StructuralFlag flag) {
  switch (flag) {
    case StructuralFlag::missing_central_only_candidate: return "missing_central_only_candidate";
    case StructuralFlag::wrong_candidate_count: return "wrong_candidate_count";
    case StructuralFlag::duplicate_candidates: return "duplicate_candidates";
  }
  return "unknown";
}

std::optional<StructuralFlag> parse_structural_flag(std::string_view text) {
  for (auto f : {StructuralFlag::missing_central_only_candidate, StructuralFlag::wrong_candidate_count,
                 StructuralFlag::duplicate_candidates}) {
    if (text == to_string(f)) return f;
  }
  return std::nullopt;
}

namespace {

// Items of a subgraph for the Jaccard index: nodes as (id, id) with a node
// tag and edges as (a, b) with an edge tag.
std::set<std::tuple<int, std::uint64_t, std::uint64_t>> jaccard_items(const Subgraph& g) {
  std::set<std::tuple<int, std::uint64_t, std::uint64_t>> items;
  for (NodeId n : g.nodes()) items.emplace(0, n.value, n.value);
  for (const Edge& e : g.edges) items.emplace(1, e.a.value, e.b.value);
  return items;
}

std::string subgraph_digest_source(const Subgraph& g, const NodeTexts& texts) {
  // The graph block carries ids, texts and edges; it is the judge's whole view.
  std::string out;
  for (NodeId c : g.central) out += to_string(c) + ",";
  out += "|";
  for (NodeId n : g.nodes()) {
    out += to_string(n) + ":";
    auto it = texts.find(n);
    if (it != texts.end()) out += content_digest(it->second);
    out += ";";
  }
  out += "|";
  for (const Edge& e : g.edges) out += to_string(e.a) + "-" + to_string(e.b) + ";";
  return out;
}

}  // namespace

double jaccard_distance(const Subgraph& a, const Subgraph& b) {
  auto ia = jaccard_items(a);
  auto ib = jaccard_items(b);
  std::size_t common = 0;
  for (const auto& item : ia) common += ib.count(item);
  const std::size_t uni = ia.size() + ib.size() - common;
  if (uni == 0) return 0.0;
  return 1.0 - static_cast<double>(common) / static_cast<double>(uni);
}

std::string pair_digest(const Subgraph& a, const Subgraph& b, const NodeTexts& texts) {
  std::string da = content_digest(subgraph_digest_source(a, texts));
  std::string db = content_digest(subgraph_digest_source(b, texts));
  if (db < da) std::swap(da, db);
  return content_digest(da + "+" + db);
}

DistanceCache::DistanceCache(std::filesystem::path file) : file_(std::move(file)) {
  std::ifstream in(file_);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      Json j = Json::parse(line);
      double d = j.at("distance").get<double>();
      if (d >= 0.0 && d <= 1.0) entries_[j.at("digest").get<std::string>()] = d;
    } catch (const Json::exception&) {
      // A torn final line from an interrupted run is tolerated; anything
      // earlier means the file is not a cache.
      if (in.peek() != std::char_traits<char>::eof()) {
        throw Error(ErrorKind::malformed_document,
                    file_.string() + ":" + std::to_string(lineno) + ": bad distance cache record");
      }
    }
  }
}

std::optional<double> DistanceCache::lookup(const std::string& digest) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(digest);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void DistanceCache::store(const std::string& digest, double distance, std::string_view provider) {
  std::lock_guard lock(mu_);
  entries_[digest] = distance;
  if (file_.empty()) return;
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  Json rec = {{"digest", digest}, {"distance", distance}, {"provider", provider}, {"timestamp", now}};
  std::ofstream out(file_, std::ios::app);
  if (!out) throw Error(ErrorKind::io, "cannot append to distance cache " + file_.string());
  out << canonical(rec) << '\n';
}

std::size_t DistanceCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

JudgeDistance::JudgeDistance(ChatClient& judge, DistanceCache* cache, const TemplateSet& templates)
    : judge_(judge), cache_(cache), templates_(templates) {}

double JudgeDistance::distance(const Subgraph& a, const Subgraph& b, const NodeTexts& texts) {
  const std::string digest = pair_digest(a, b, texts);
  if (cache_) {
    if (auto hit = cache_->lookup(digest)) return *hit;
  }
  // Canonical order so (a, b) and (b, a) send the same prompt.
  const bool swap = content_digest(subgraph_digest_source(b, texts)) <
                    content_digest(subgraph_digest_source(a, texts));
  RenderedPrompt prompt = swap ? render_diversity_prompt(b, a, texts, templates_)
                               : render_diversity_prompt(a, b, texts, templates_);
  std::string reply;
  try {
    reply = judge_.complete(ChatRequest{prompt.text, 0.0, 0});
  } catch (const Error& e) {
    throw Error(ErrorKind::provider, std::string("distance judge failed: ") + e.what());
  }
  auto score = parse_distance_score(reply);
  if (!score) throw Error(ErrorKind::provider, "distance judge reply has no score");
  if (cache_) cache_->store(digest, score->value, kind());
  return score->value;
}

bool check_authenticity(const Subgraph& context, const SsrTrace& trace) {
  if (trace.candidates.empty()) return false;
  if (!trace.malformed_candidates.empty()) return false;
  return std::all_of(trace.candidates.begin(), trace.candidates.end(), [&](const Subgraph& c) {
    return is_well_formed(c) && is_subgraph_of(c, context);
  });
}

bool check_consistency(const SsrTrace& trace) {
  if (!trace.chosen_index || *trace.chosen_index >= trace.candidates.size()) return false;
  if (trace.repeated_malformed) return false;
  return !trace.repeated_subgraph || *trace.repeated_subgraph == trace.candidates[*trace.chosen_index];
}

bool check_answer(const std::optional<std::string>& answer, const TaskInstance& task) {
  if (!task.gold_label) throw Error(ErrorKind::missing_gold, "task has no gold label");
  if (!answer) return false;
  return normalize_label(*answer) == normalize_label(*task.gold_label);
}

GroupEnergy group_energy(std::span<const Subgraph> candidates, const NodeTexts& texts, DistanceProvider& d) {
  const std::size_t n = candidates.size();
  if (n < 2) throw Error(ErrorKind::invalid_argument, "group_energy needs at least two candidates");
  double inverse_sum = 0.0;
  double distance_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = d.distance(candidates[i], candidates[j], texts);
      if (!(dij >= 0.0 && dij <= 1.0)) {
        throw Error(ErrorKind::provider, std::string(d.kind()) + " returned a distance outside [0, 1]");
      }
      inverse_sum += 2.0 / std::max(dij, kDistanceFloor);  // both ordered pairs
      distance_sum += dij;
    }
  }
  const double ordered = static_cast<double>(n * (n - 1));
  return {-inverse_sum / ordered, distance_sum / (ordered / 2.0)};
}

std::set<StructuralFlag> structural_flags(const Subgraph& context, const SsrTrace& trace,
                                          std::size_t expected_k) {
  std::set<StructuralFlag> flags;
  if (trace.candidates.size() != expected_k) flags.insert(StructuralFlag::wrong_candidate_count);
  const auto central = context.central_set();
  const bool has_central_only = std::any_of(trace.candidates.begin(), trace.candidates.end(), [&](const Subgraph& c) {
    return c.neighbors.empty() && c.edges.empty() && c.central_set() == central;
  });
  if (!has_central_only) flags.insert(StructuralFlag::missing_central_only_candidate);
  for (std::size_t i = 0; i < trace.candidates.size(); ++i) {
    for (std::size_t j = i + 1; j < trace.candidates.size(); ++j) {
      if (trace.candidates[i] == trace.candidates[j]) flags.insert(StructuralFlag::duplicate_candidates);
    }
  }
  return flags;
}

VerifyOutcome verify(const Subgraph& context, const NodeTexts& texts, const SsrTrace& trace,
                     const TaskInstance& task, const VerifyOptions& options) {
  VerifyOutcome out;
  out.status_real = check_authenticity(context, trace);
  out.status_consist = check_consistency(trace);
  if (task.gold_label) out.status_ans = check_answer(trace.answer, task);
  out.structural_flags = structural_flags(context, trace, options.expected_k);
  if (options.distance && out.status_real && trace.candidates.size() >= 2) {
    GroupEnergy e = group_energy(trace.candidates, texts, *options.distance);
    out.energy = e.energy;
    out.mean_distance = e.mean_distance;
  }
  return out;
}

}  // namespace ssr
