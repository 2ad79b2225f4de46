// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssr/graph.hpp"

namespace ssr {

/// Structured view of one Sample-Select-Reason completion.
struct SsrTrace {
  std::vector<Subgraph> candidates;  // position i <-> "Subgraph_i"
  std::optional<std::size_t> chosen_index;
  std::optional<Subgraph> repeated_subgraph;
  std::optional<std::string> answer;
  std::optional<std::string> reasoning;
  std::optional<std::string> chosen_reason;
  // Candidate positions whose block carried a structural defect (bad id,
  // bad edge item, duplicate item, missing field). Such candidates are never
  // treated as authentic.
  std::vector<std::size_t> malformed_candidates;
  bool repeated_malformed = false;

  friend bool operator==(const SsrTrace&, const SsrTrace&) = default;
};

enum class DefectKind {
  missing_candidates,
  missing_choice,
  missing_answer,
  missing_field,
  bad_node_id,
  bad_edge,
  self_loop,
  duplicate_item,
  central_overlap,
  duplicate_field,
  duplicate_block,
  surplus_candidates,
  index_mismatch,
  bad_choice_value,
  unterminated_list,
  unexpected_text,
};

inline constexpr DefectKind kAllDefectKinds[] = {
    DefectKind::missing_candidates, DefectKind::missing_choice,    DefectKind::missing_answer,
    DefectKind::missing_field,      DefectKind::bad_node_id,       DefectKind::bad_edge,
    DefectKind::self_loop,          DefectKind::duplicate_item,    DefectKind::central_overlap,
    DefectKind::duplicate_field,    DefectKind::duplicate_block,   DefectKind::surplus_candidates,
    DefectKind::index_mismatch,     DefectKind::bad_choice_value,  DefectKind::unterminated_list,
    DefectKind::unexpected_text,
};

const char* to_string(DefectKind kind);
std::optional<DefectKind> parse_defect_kind(std::string_view text);

struct Defect {
  DefectKind kind;
  std::size_t offset = 0;  // byte span into the completion
  std::size_t length = 0;
  std::string message;

  friend bool operator==(const Defect&, const Defect&) = default;
};

struct ParseReport {
  SsrTrace trace;
  std::vector<Defect> defects;

  bool clean() const { return defects.empty(); }
};

/// Parses a completion in the SSR output layout. Total: never throws on any
/// input; every problem becomes a Defect and absent fields stay absent.
///
/// Accepted variations: markdown bold / heading / list markers around labels,
/// case-insensitive labels with spaces or underscores, trailing '.', ',' or
/// ';' after values, ids written as "node11" or "11", and a "<think>...</think>"
/// preamble (everything up to the last "</think>" is skipped).
ParseReport parse_trace(std::string_view completion, std::size_t expected_k);

/// Renders a trace back into the canonical output layout. parse_trace on the
/// result reproduces the trace for well-formed inputs.
std::string format_trace(const SsrTrace& trace);

struct DistanceScore {
  double value = 0.0;
  bool clamped = false;
};

/// Last real number in the completion, clamped into [0, 1] (flagged).
std::optional<DistanceScore> parse_distance_score(std::string_view completion);

/// Parses the "- Central node ID(s) / Node texts / Connection relationships"
/// block produced by the prompt renderer. Neighbors are the listed node-text
/// ids and edge endpoints minus the central set. Throws Error(malformed_document).
struct GraphBlock {
  Subgraph subgraph;
  NodeTexts texts;
};
GraphBlock parse_graph_block(std::string_view block);

}  // namespace ssr
