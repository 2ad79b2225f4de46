// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include "ssr/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>

#include "ssr/codec.hpp"
#include "ssr/error.hpp"

namespace ssr {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::malformed_document: return "malformed_document";
    case ErrorKind::validation: return "validation";
    case ErrorKind::missing_gold: return "missing_gold";
    case ErrorKind::transport: return "transport";
    case ErrorKind::provider: return "provider";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

std::string to_string(NodeId id) { return "node" + std::to_string(id.value); }

static std::optional<NodeId> parse_digits(std::string_view digits) {
  if (digits.empty()) return std::nullopt;
  if (digits.size() > 1 && digits.front() == '0') return std::nullopt;
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return NodeId{value};
}

std::optional<NodeId> parse_node_id(std::string_view text) {
  if (!text.starts_with("node")) return std::nullopt;
  return parse_digits(text.substr(4));
}

std::optional<NodeId> parse_node_token(std::string_view text) {
  if (text.starts_with("node")) return parse_digits(text.substr(4));
  return parse_digits(text);
}

Edge make_edge(NodeId x, NodeId y) {
  if (x == y) throw Error(ErrorKind::invalid_argument, "self-loop on " + to_string(x));
  return x < y ? Edge{x, y} : Edge{y, x};
}

const char* to_string(TaskKind kind) {
  return kind == TaskKind::node_classification ? "node_classification" : "link_classification";
}

std::optional<TaskKind> parse_task_kind(std::string_view text) {
  if (text == "node_classification") return TaskKind::node_classification;
  if (text == "link_classification") return TaskKind::link_classification;
  return std::nullopt;
}

std::string normalize_label(std::string_view label) {
  auto is_strip = [](char c) {
    return c == '<' || c == '>' || std::isspace(static_cast<unsigned char>(c));
  };
  while (!label.empty() && is_strip(label.front())) label.remove_prefix(1);
  while (!label.empty() && is_strip(label.back())) label.remove_suffix(1);
  std::string out(label);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void validate_task(const TaskInstance& task) {
  const std::size_t arity = task.kind == TaskKind::node_classification ? 1 : 2;
  if (task.central.size() != arity) {
    throw Error(ErrorKind::validation, std::string(to_string(task.kind)) + " task needs " +
                                           std::to_string(arity) + " central node(s), got " +
                                           std::to_string(task.central.size()));
  }
  if (arity == 2 && task.central[0] == task.central[1]) {
    throw Error(ErrorKind::validation, "link task central nodes must differ");
  }
  if (task.options.empty()) throw Error(ErrorKind::validation, "task has no options");
  std::set<std::string> seen;
  for (const auto& option : task.options) {
    auto key = normalize_label(option);
    if (key.empty()) throw Error(ErrorKind::validation, "empty option label");
    if (!seen.insert(key).second) {
      throw Error(ErrorKind::validation, "duplicate option after normalization: " + option);
    }
  }
  if (task.gold_label && !seen.count(normalize_label(*task.gold_label))) {
    throw Error(ErrorKind::validation, "gold label is not an option: " + *task.gold_label);
  }
}

std::set<NodeId> Subgraph::nodes() const {
  std::set<NodeId> out(central.begin(), central.end());
  out.insert(neighbors.begin(), neighbors.end());
  return out;
}

bool operator==(const Subgraph& lhs, const Subgraph& rhs) {
  return lhs.central_set() == rhs.central_set() && lhs.neighbors == rhs.neighbors &&
         lhs.edges == rhs.edges;
}

bool is_well_formed(const Subgraph& g) {
  if (g.central.empty()) return false;
  auto central = g.central_set();
  if (central.size() != g.central.size()) return false;
  for (NodeId n : g.neighbors) {
    if (central.count(n)) return false;
  }
  auto nodes = g.nodes();
  for (const Edge& e : g.edges) {
    if (!(e.a < e.b)) return false;
    if (!nodes.count(e.a) || !nodes.count(e.b)) return false;
  }
  return true;
}

TextGraph TextGraph::build(NodeTexts nodes, std::span<const std::pair<NodeId, NodeId>> edges) {
  TextGraph g;
  g.nodes_ = std::move(nodes);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [x, y] = edges[i];
    const std::string where = "edges[" + std::to_string(i) + "]";
    if (x == y) throw Error(ErrorKind::validation, where + ": self-loop on " + to_string(x));
    for (NodeId end : {x, y}) {
      if (!g.nodes_.count(end)) {
        throw Error(ErrorKind::validation, where + ": unknown endpoint " + to_string(end));
      }
    }
    g.edges_.insert(make_edge(x, y));
  }
  for (const auto& [id, text] : g.nodes_) g.adjacency_[id];
  for (const Edge& e : g.edges_) {
    g.adjacency_[e.a].push_back(e.b);
    g.adjacency_[e.b].push_back(e.a);
  }
  // Edges are visited in sorted order, but the second endpoint lists are not.
  for (auto& [id, adj] : g.adjacency_) std::sort(adj.begin(), adj.end());
  return g;
}

bool TextGraph::has_edge(NodeId x, NodeId y) const {
  if (x == y) return false;
  return edges_.count(make_edge(x, y)) != 0;
}

const std::string& TextGraph::text(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(ErrorKind::validation, "unknown node " + to_string(id));
  return it->second;
}

std::span<const NodeId> TextGraph::adjacent(NodeId id) const {
  auto it = adjacency_.find(id);
  if (it == adjacency_.end()) return {};
  return it->second;
}

namespace {

const Json& require(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorKind::malformed_document, where + ": missing \"" + key + "\"");
  }
  return *it;
}

NodeId node_from_json(const Json& v, const std::string& where) {
  if (v.is_number_unsigned()) return NodeId{v.get<std::uint64_t>()};
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return NodeId{static_cast<std::uint64_t>(v.get<std::int64_t>())};
  }
  throw Error(ErrorKind::malformed_document, where + ": node id must be a non-negative integer");
}

}  // namespace

GraphDocument load_document(std::string_view bytes) {
  Json doc;
  try {
    doc = Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::malformed_document, std::string("TAG-JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::malformed_document, "TAG-JSON: top level must be an object");

  const Json& jnodes = require(doc, "nodes", "TAG-JSON");
  if (!jnodes.is_array()) throw Error(ErrorKind::malformed_document, "nodes: must be an array");
  NodeTexts nodes;
  for (std::size_t i = 0; i < jnodes.size(); ++i) {
    const std::string where = "nodes[" + std::to_string(i) + "]";
    const Json& n = jnodes[i];
    if (!n.is_object()) throw Error(ErrorKind::malformed_document, where + ": must be an object");
    NodeId id = node_from_json(require(n, "id", where), where);
    const Json& text = require(n, "text", where);
    if (!text.is_string()) throw Error(ErrorKind::malformed_document, where + ": text must be a string");
    if (!nodes.emplace(id, text.get<std::string>()).second) {
      throw Error(ErrorKind::validation, where + ": duplicate node id " + std::to_string(id.value));
    }
  }

  std::vector<std::pair<NodeId, NodeId>> pairs;
  if (auto it = doc.find("edges"); it != doc.end()) {
    if (!it->is_array()) throw Error(ErrorKind::malformed_document, "edges: must be an array");
    pairs.reserve(it->size());
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "edges[" + std::to_string(i) + "]";
      const Json& e = (*it)[i];
      if (!e.is_array() || e.size() != 2) {
        throw Error(ErrorKind::malformed_document, where + ": must be a [int, int] pair");
      }
      pairs.emplace_back(node_from_json(e[0], where), node_from_json(e[1], where));
    }
  }

  GraphDocument out{TextGraph::build(std::move(nodes), pairs), {}};

  if (auto it = doc.find("tasks"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorKind::malformed_document, "tasks: must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = "tasks[" + std::to_string(i) + "]";
      TaskInstance task;
      try {
        task = task_from_json((*it)[i]);
        validate_task(task);
      } catch (const Error& e) {
        throw Error(e.kind(), where + ": " + e.what());
      }
      for (NodeId c : task.central) {
        if (!out.graph.contains(c)) {
          throw Error(ErrorKind::validation, where + ": unknown central node " + to_string(c));
        }
      }
      out.tasks.push_back(std::move(task));
    }
  }
  return out;
}

TextGraph load_graph(std::string_view bytes) { return load_document(bytes).graph; }

std::string serialize(const TextGraph& graph, std::span<const TaskInstance> tasks) {
  Json nodes = Json::array();
  for (const auto& [id, text] : graph.nodes()) nodes.push_back({{"id", id.value}, {"text", text}});
  Json edges = Json::array();
  for (const Edge& e : graph.edges()) edges.push_back({e.a.value, e.b.value});
  Json doc = {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  if (!tasks.empty()) {
    Json jt = Json::array();
    for (const auto& t : tasks) jt.push_back(to_json(t));
    doc["tasks"] = std::move(jt);
  }
  return doc.dump();
}

Subgraph ego_subgraph(const TextGraph& graph, std::span<const NodeId> central, unsigned hops,
                      std::size_t max_nodes) {
  if (central.empty()) throw Error(ErrorKind::invalid_argument, "ego_subgraph: empty central set");
  if (hops < 1) throw Error(ErrorKind::invalid_argument, "ego_subgraph: hops must be >= 1");
  if (max_nodes < 1) throw Error(ErrorKind::invalid_argument, "ego_subgraph: max_nodes must be >= 1");

  std::map<NodeId, unsigned> dist;
  std::deque<NodeId> queue;
  Subgraph out;
  for (NodeId c : central) {
    if (!graph.contains(c)) {
      throw Error(ErrorKind::validation, "ego_subgraph: unknown central node " + to_string(c));
    }
    if (dist.emplace(c, 0).second) {
      queue.push_back(c);
      out.central.push_back(c);
    }
  }
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    const unsigned du = dist[u];
    if (du == hops) continue;
    for (NodeId v : graph.adjacent(u)) {
      if (dist.emplace(v, du + 1).second) queue.push_back(v);
    }
  }

  std::vector<std::pair<unsigned, NodeId>> ranked;
  ranked.reserve(dist.size());
  for (const auto& [id, d] : dist) {
    if (d > 0) ranked.emplace_back(d, id);
  }
  std::sort(ranked.begin(), ranked.end());
  const std::size_t room = max_nodes > out.central.size() ? max_nodes - out.central.size() : 0;
  if (ranked.size() > room) ranked.resize(room);
  for (const auto& [d, id] : ranked) out.neighbors.insert(id);

  auto kept = out.nodes();
  for (NodeId u : kept) {
    for (NodeId v : graph.adjacent(u)) {
      if (u < v && kept.count(v)) out.edges.insert(Edge{u, v});
    }
  }
  return out;
}

bool is_subgraph_of(const Subgraph& candidate, const Subgraph& context) {
  if (candidate.central_set() != context.central_set()) return false;
  auto ctx_nodes = context.nodes();
  for (NodeId n : candidate.nodes()) {
    if (!ctx_nodes.count(n)) return false;
  }
  return std::includes(context.edges.begin(), context.edges.end(), candidate.edges.begin(),
                       candidate.edges.end());
}

NodeTexts texts_for(const TextGraph& graph, const Subgraph& g) {
  NodeTexts out;
  for (NodeId n : g.nodes()) out.emplace(n, graph.text(n));
  return out;
}

Instance make_instance(const TextGraph& graph, const TaskInstance& task, std::string id, unsigned hops,
                       std::size_t max_nodes) {
  validate_task(task);
  Instance inst{std::move(id), task, ego_subgraph(graph, task.central, hops, max_nodes), {}};
  inst.texts = texts_for(graph, inst.context);
  return inst;
}

void validate_instance(const Instance& inst) {
  validate_task(inst.task);
  if (!is_well_formed(inst.context)) throw Error(ErrorKind::validation, "context: subgraph is not well formed");
  if (inst.context.central_set() != std::set<NodeId>(inst.task.central.begin(), inst.task.central.end())) {
    throw Error(ErrorKind::validation, "context: central nodes differ from the task's");
  }
  for (NodeId n : inst.context.nodes()) {
    if (!inst.texts.count(n)) throw Error(ErrorKind::validation, "texts: missing text for " + to_string(n));
  }
}

}  // namespace ssr
