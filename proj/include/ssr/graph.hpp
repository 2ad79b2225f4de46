// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ssr {

/// Node identifier. Rendered as "node<k>" in prompts and traces.
struct NodeId {
  std::uint64_t value = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

std::string to_string(NodeId id);

/// Strict inverse of to_string: accepts only "node<k>" with canonical digits.
std::optional<NodeId> parse_node_id(std::string_view text);

/// Tolerant form used for model output: "node<k>" or bare "<k>". Leading
/// zeros are rejected so that every accepted token names exactly one id.
std::optional<NodeId> parse_node_token(std::string_view text);

/// Undirected edge stored with a < b.
struct Edge {
  NodeId a;
  NodeId b;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Throws Error(invalid_argument) on a self-loop.
Edge make_edge(NodeId x, NodeId y);

using NodeTexts = std::map<NodeId, std::string>;

enum class TaskKind { node_classification, link_classification };

const char* to_string(TaskKind kind);
std::optional<TaskKind> parse_task_kind(std::string_view text);

struct TaskInstance {
  TaskKind kind = TaskKind::node_classification;
  std::vector<NodeId> central;
  std::vector<std::string> options;
  std::string description;
  std::optional<std::string> gold_label;

  friend bool operator==(const TaskInstance&, const TaskInstance&) = default;
};

/// Strips surrounding whitespace and angle brackets, then ASCII case-folds.
std::string normalize_label(std::string_view label);

/// Checks the task-local invariants (central arity, option uniqueness, gold
/// membership). Throws Error(validation).
void validate_task(const TaskInstance& task);

struct Subgraph {
  std::vector<NodeId> central;
  std::set<NodeId> neighbors;
  std::set<Edge> edges;

  std::set<NodeId> central_set() const { return {central.begin(), central.end()}; }
  std::set<NodeId> nodes() const;
  std::size_t node_count() const { return nodes().size(); }

  /// Set equality on central, neighbors and edges.
  friend bool operator==(const Subgraph& lhs, const Subgraph& rhs);
};

/// central non-empty and duplicate-free, central ∩ neighbors = ∅, and every
/// edge endpoint inside the subgraph's own node set.
bool is_well_formed(const Subgraph& g);

/// Immutable text-attributed graph. Construct through build() or the loaders.
class TextGraph {
 public:
  /// Validates endpoints and self-loops; collapses duplicate and reversed
  /// pairs. Throws Error(validation) naming the offending edge index.
  static TextGraph build(NodeTexts nodes, std::span<const std::pair<NodeId, NodeId>> edges);

  const NodeTexts& nodes() const { return nodes_; }
  const std::set<Edge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  bool contains(NodeId id) const { return nodes_.count(id) != 0; }
  bool has_edge(NodeId x, NodeId y) const;
  const std::string& text(NodeId id) const;
  /// Sorted adjacency of `id`; empty for unknown ids.
  std::span<const NodeId> adjacent(NodeId id) const;

 private:
  NodeTexts nodes_;
  std::set<Edge> edges_;
  std::map<NodeId, std::vector<NodeId>> adjacency_;
};

struct GraphDocument {
  TextGraph graph;
  std::vector<TaskInstance> tasks;
};

/// Parses a TAG-JSON document (nodes, edges, optional tasks).
GraphDocument load_document(std::string_view bytes);
TextGraph load_graph(std::string_view bytes);

/// Emits TAG-JSON with nodes sorted by id and edges as sorted pairs.
std::string serialize(const TextGraph& graph, std::span<const TaskInstance> tasks = {});

inline constexpr unsigned kDefaultHops = 2;
inline constexpr std::size_t kDefaultMaxNodes = 64;

/// Breadth-first closure of `central` up to `hops`, truncated to `max_nodes`
/// by (distance, id). Central nodes are always kept. All graph edges among
/// retained nodes are included.
Subgraph ego_subgraph(const TextGraph& graph, std::span<const NodeId> central,
                      unsigned hops = kDefaultHops, std::size_t max_nodes = kDefaultMaxNodes);

bool is_subgraph_of(const Subgraph& candidate, const Subgraph& context);

/// Texts of every node in `g`. Throws Error(validation) for unknown nodes.
NodeTexts texts_for(const TextGraph& graph, const Subgraph& g);

/// A task bundled with its context subgraph and the texts the prompt needs.
/// This is the unit every pipeline stage consumes.
struct Instance {
  std::string id;
  TaskInstance task;
  Subgraph context;
  NodeTexts texts;
};

/// Validates the task against the graph and extracts its ego context.
Instance make_instance(const TextGraph& graph, const TaskInstance& task, std::string id,
                       unsigned hops = kDefaultHops, std::size_t max_nodes = kDefaultMaxNodes);

/// Checks task validity, context well-formedness, central agreement and text
/// coverage. Throws Error(validation).
void validate_instance(const Instance& inst);

}  // namespace ssr
