// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ssr/graph.hpp"

namespace ssr {

enum class TemplateKind { node_classification, link_classification, diversity_judge };

const char* to_string(TemplateKind kind);
std::optional<TemplateKind> parse_template_kind(std::string_view text);
TemplateKind template_for(TaskKind kind);

struct PromptConfig {
  std::size_t sample_count = 5;  // k, candidates the model must sample
  TemplateKind template_kind = TemplateKind::node_classification;
};

struct PromptSection {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;
};

struct RenderedPrompt {
  std::string text;
  std::vector<PromptSection> manifest;  // tiles `text` in order

  const PromptSection* section(std::string_view name) const;
  std::string_view section_text(std::string_view name) const;
};

// Template asset layout:
//   @@template <kind> <version>
//   @@section <name>
//   ...text with {{placeholders}}...
//   @@section <name>
//   ...
// Lines starting with "@@" are directives and never reach the output.
struct PromptTemplate {
  TemplateKind kind = TemplateKind::node_classification;
  int version = 0;
  std::vector<std::pair<std::string, std::string>> sections;
};

/// Throws Error(malformed_document) on bad directives or unknown placeholders.
PromptTemplate parse_template(std::string_view source);

class TemplateSet {
 public:
  static const TemplateSet& builtin();
  /// Loads "<kind>.txt" files from `dir`; kinds without a file keep the
  /// built-in template.
  static TemplateSet from_directory(const std::filesystem::path& dir);

  const PromptTemplate& get(TemplateKind kind) const;

 private:
  std::vector<PromptTemplate> templates_;
};

/// The ready-made analyst instruction used when a task has no description.
extern const std::string_view kDefaultTaskDescription;

/// "- Central node ID(s) / - Node texts / - Connection relationships" block,
/// entries sorted by id and edges as "<nodea, nodeb>" with a < b. Newlines in
/// node texts are flattened to spaces so each entry stays on one line.
std::string render_graph_block(const Subgraph& g, const NodeTexts& texts);

RenderedPrompt render_task_prompt(const Subgraph& g, const NodeTexts& texts, const TaskInstance& task,
                                  const PromptConfig& cfg,
                                  const TemplateSet& templates = TemplateSet::builtin());

RenderedPrompt render_diversity_prompt(const Subgraph& g1, const Subgraph& g2, const NodeTexts& texts,
                                       const TemplateSet& templates = TemplateSet::builtin());

/// Stable 64-bit FNV-1a digest rendered as 16 lowercase hex digits.
std::string content_digest(std::string_view bytes);

}  // namespace ssr
