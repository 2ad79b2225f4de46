// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ssr/codec.hpp"
#include "ssr/graph.hpp"

namespace ssr::test {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(SSR_FIXTURE_DIR) / name;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Cora case-study node 11 with its 25-edge ego context, gold "Neural Networks".
inline Instance case_instance() {
  return instance_from_json(parse_json(read_fixture("case_instance.json"), "fixture"));
}

inline NodeId n(std::uint64_t v) { return NodeId{v}; }

inline Subgraph sub(std::vector<std::uint64_t> central, std::vector<std::uint64_t> neighbors,
                    std::vector<std::pair<std::uint64_t, std::uint64_t>> edges) {
  Subgraph g;
  for (auto c : central) g.central.push_back(n(c));
  for (auto v : neighbors) g.neighbors.insert(n(v));
  for (auto [a, b] : edges) g.edges.insert(make_edge(n(a), n(b)));
  return g;
}

}  // namespace ssr::test
