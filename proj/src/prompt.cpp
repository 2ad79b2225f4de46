// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include "ssr/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "ssr/error.hpp"
#include "ssr_builtin_templates.inc"

namespace ssr {

const std::string_view kDefaultTaskDescription =
    "You are a graph analysis expert. Given a complete subgraph structure, which includes the "
    "description of the central node(s), its neighboring nodes, and their connection "
    "relationships, please follow the following steps to operate the analysis:";

const char* to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::node_classification: return "node_classification";
    case TemplateKind::link_classification: return "link_classification";
    case TemplateKind::diversity_judge: return "diversity_judge";
  }
  return "unknown";
}

std::optional<TemplateKind> parse_template_kind(std::string_view text) {
  for (auto k : {TemplateKind::node_classification, TemplateKind::link_classification,
                 TemplateKind::diversity_judge}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

TemplateKind template_for(TaskKind kind) {
  return kind == TaskKind::node_classification ? TemplateKind::node_classification
                                               : TemplateKind::link_classification;
}

const PromptSection* RenderedPrompt::section(std::string_view name) const {
  for (const auto& s : manifest) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string_view RenderedPrompt::section_text(std::string_view name) const {
  const PromptSection* s = section(name);
  if (!s) return {};
  return std::string_view(text).substr(s->offset, s->length);
}

namespace {

std::vector<std::string> allowed_placeholders(TemplateKind kind) {
  if (kind == TemplateKind::diversity_judge) return {"graph_block_1", "graph_block_2"};
  return {"task_description", "graph_block", "sample_count", "options"};
}

std::vector<std::string> required_sections(TemplateKind kind) {
  if (kind == TemplateKind::diversity_judge) return {"graph_block_1", "graph_block_2"};
  return {"graph_block", "options"};
}

template <typename Fn>
void for_each_placeholder(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string_view::npos) {
    std::size_t close = text.find("}}", pos + 2);
    if (close == std::string_view::npos) {
      throw Error(ErrorKind::malformed_document, "template: unterminated placeholder");
    }
    fn(text.substr(pos + 2, close - pos - 2));
    pos = close + 2;
  }
}

std::string substitute(std::string_view text, const std::map<std::string, std::string, std::less<>>& values) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = text.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(text.substr(pos));
      return out;
    }
    std::size_t close = text.find("}}", open + 2);
    out.append(text.substr(pos, open - pos));
    auto it = values.find(text.substr(open + 2, close - open - 2));
    if (it == values.end()) {
      throw Error(ErrorKind::invalid_argument,
                  "template: no value for placeholder " + std::string(text.substr(open, close + 2 - open)));
    }
    out += it->second;
    pos = close + 2;
  }
}

RenderedPrompt render(const PromptTemplate& tpl, const std::map<std::string, std::string, std::less<>>& values) {
  RenderedPrompt out;
  for (const auto& [name, body] : tpl.sections) {
    std::string chunk = substitute(body, values);
    out.manifest.push_back({name, out.text.size(), chunk.size()});
    out.text += chunk;
  }
  return out;
}

// Each line break (\n, \r or \r\n) becomes one space.
std::string flatten(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    out.push_back(c == '\n' || c == '\r' ? ' ' : c);
  }
  return out;
}

}  // namespace

PromptTemplate parse_template(std::string_view source) {
  PromptTemplate tpl;
  bool have_header = false;
  std::istringstream in{std::string(source)};
  std::string line;
  std::string* current = nullptr;
  while (std::getline(in, line)) {
    if (line.starts_with("@@")) {
      std::istringstream directive(line.substr(2));
      std::string word;
      directive >> word;
      if (word == "template") {
        std::string kind;
        directive >> kind >> tpl.version;
        auto k = parse_template_kind(kind);
        if (!k || have_header) throw Error(ErrorKind::malformed_document, "template: bad @@template line");
        tpl.kind = *k;
        have_header = true;
      } else if (word == "section") {
        std::string name;
        directive >> name;
        if (name.empty()) throw Error(ErrorKind::malformed_document, "template: unnamed section");
        for (const auto& s : tpl.sections) {
          if (s.first == name) throw Error(ErrorKind::malformed_document, "template: duplicate section " + name);
        }
        tpl.sections.emplace_back(name, std::string());
        current = &tpl.sections.back().second;
      } else {
        throw Error(ErrorKind::malformed_document, "template: unknown directive @@" + word);
      }
      continue;
    }
    if (!current) {
      if (line.empty()) continue;
      throw Error(ErrorKind::malformed_document, "template: text before the first @@section");
    }
    current->append(line);
    current->push_back('\n');
  }
  if (!have_header) throw Error(ErrorKind::malformed_document, "template: missing @@template header");

  auto allowed = allowed_placeholders(tpl.kind);
  for (const auto& [name, body] : tpl.sections) {
    for_each_placeholder(body, [&](std::string_view ph) {
      if (std::find(allowed.begin(), allowed.end(), ph) == allowed.end()) {
        throw Error(ErrorKind::malformed_document, "template: unknown placeholder {{" + std::string(ph) + "}}");
      }
    });
  }
  for (const auto& req : required_sections(tpl.kind)) {
    bool found = std::any_of(tpl.sections.begin(), tpl.sections.end(),
                             [&](const auto& s) { return s.first == req; });
    if (!found) throw Error(ErrorKind::malformed_document, "template: missing section " + req);
  }
  return tpl;
}

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet set = [] {
    TemplateSet s;
    s.templates_.push_back(parse_template(builtin::kNodeClassificationTemplate));
    s.templates_.push_back(parse_template(builtin::kLinkClassificationTemplate));
    s.templates_.push_back(parse_template(builtin::kDiversityJudgeTemplate));
    return s;
  }();
  return set;
}

TemplateSet TemplateSet::from_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::io, "template directory not found: " + dir.string());
  }
  TemplateSet s = builtin();
  for (auto& tpl : s.templates_) {
    auto path = dir / (std::string(to_string(tpl.kind)) + ".txt");
    if (!std::filesystem::exists(path)) continue;
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    PromptTemplate loaded = parse_template(buf.str());
    if (loaded.kind != tpl.kind) {
      throw Error(ErrorKind::malformed_document, path.string() + ": template kind does not match file name");
    }
    tpl = std::move(loaded);
  }
  return s;
}

const PromptTemplate& TemplateSet::get(TemplateKind kind) const {
  for (const auto& t : templates_) {
    if (t.kind == kind) return t;
  }
  throw Error(ErrorKind::invalid_argument, std::string("no template for ") + to_string(kind));
}

std::string render_graph_block(const Subgraph& g, const NodeTexts& texts) {
  if (!is_well_formed(g)) throw Error(ErrorKind::invalid_argument, "render: subgraph is not well formed");
  std::string out = "- Central node ID(s): ";
  for (std::size_t i = 0; i < g.central.size(); ++i) {
    if (i) out += ", ";
    out += to_string(g.central[i]);
  }
  out += "\n- Node texts (central node(s) and neighboring nodes): [\n";
  for (NodeId n : g.nodes()) {
    auto it = texts.find(n);
    if (it == texts.end()) throw Error(ErrorKind::validation, "render: missing node text for " + to_string(n));
    out += "  " + to_string(n) + ": " + flatten(it->second) + "\n";
  }
  out += "]\n- Connection relationships: ";
  if (g.edges.empty()) {
    out += "[]";
    return out;
  }
  out += "[\n  ";
  bool first = true;
  for (const Edge& e : g.edges) {
    if (!first) out += ", ";
    first = false;
    out += "<" + to_string(e.a) + ", " + to_string(e.b) + ">";
  }
  out += "\n]";
  return out;
}

RenderedPrompt render_task_prompt(const Subgraph& g, const NodeTexts& texts, const TaskInstance& task,
                                  const PromptConfig& cfg, const TemplateSet& templates) {
  if (cfg.sample_count < 2) throw Error(ErrorKind::invalid_argument, "render: sample_count must be >= 2");
  if (cfg.template_kind != template_for(task.kind)) {
    throw Error(ErrorKind::invalid_argument, std::string("render: template ") + to_string(cfg.template_kind) +
                                                 " does not fit a " + to_string(task.kind) + " task");
  }
  std::string options;
  for (std::size_t i = 0; i < task.options.size(); ++i) {
    const auto& opt = task.options[i];
    if (opt.find_first_of("<>") != std::string::npos) {
      throw Error(ErrorKind::invalid_argument, "render: option contains '<' or '>': " + opt);
    }
    if (i) options += ", ";
    options += "<" + opt + ">";
  }
  std::map<std::string, std::string, std::less<>> values{
      {"task_description", task.description.empty() ? std::string(kDefaultTaskDescription) : task.description},
      {"graph_block", render_graph_block(g, texts)},
      {"sample_count", std::to_string(cfg.sample_count)},
      {"options", std::move(options)},
  };
  return render(templates.get(cfg.template_kind), values);
}

RenderedPrompt render_diversity_prompt(const Subgraph& g1, const Subgraph& g2, const NodeTexts& texts,
                                       const TemplateSet& templates) {
  if (g1.central_set() != g2.central_set()) {
    throw Error(ErrorKind::invalid_argument, "render: diversity pair has mismatched central sets");
  }
  std::map<std::string, std::string, std::less<>> values{
      {"graph_block_1", render_graph_block(g1, texts)},
      {"graph_block_2", render_graph_block(g2, texts)},
  };
  return render(templates.get(TemplateKind::diversity_judge), values);
}

std::string content_digest(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace ssr
