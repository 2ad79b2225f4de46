// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include "ssr/trace.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "ssr/error.hpp"

namespace ssr {

const char* to_string(DefectKind kind) {
  switch (kind) {
    case DefectKind::missing_candidates: return "missing_candidates";
    case DefectKind::missing_choice: return "missing_choice";
    case DefectKind::missing_answer: return "missing_answer";
    case DefectKind::missing_field: return "missing_field";
    case DefectKind::bad_node_id: return "bad_node_id";
    case DefectKind::bad_edge: return "bad_edge";
    case DefectKind::self_loop: return "self_loop";
    case DefectKind::duplicate_item: return "duplicate_item";
    case DefectKind::central_overlap: return "central_overlap";
    case DefectKind::duplicate_field: return "duplicate_field";
    case DefectKind::duplicate_block: return "duplicate_block";
    case DefectKind::surplus_candidates: return "surplus_candidates";
    case DefectKind::index_mismatch: return "index_mismatch";
    case DefectKind::bad_choice_value: return "bad_choice_value";
    case DefectKind::unterminated_list: return "unterminated_list";
    case DefectKind::unexpected_text: return "unexpected_text";
  }
  return "unknown";
}

std::optional<DefectKind> parse_defect_kind(std::string_view text) {
  for (DefectKind k : kAllDefectKinds) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

namespace {

struct Line {
  std::size_t offset;
  std::string_view text;
};

std::vector<Line> split_lines(std::string_view s) {
  std::vector<Line> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find('\n', start);
    if (end == std::string_view::npos) end = s.size();
    std::string_view text = s.substr(start, end - start);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    out.push_back({start, text});
    if (end == s.size()) break;
    start = end + 1;
  }
  return out;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string_view strip_leading_markup(std::string_view s) {
  while (!s.empty() && (is_space(s.front()) || s.front() == '#' || s.front() == '*' ||
                        s.front() == '-' || s.front() == '>' || s.front() == '_' ||
                        s.front() == '`')) {
    s.remove_prefix(1);
  }
  return s;
}

std::string_view strip_trailing_markup(std::string_view s) {
  while (!s.empty() && (is_space(s.back()) || s.back() == '*' || s.back() == '_' || s.back() == '`')) {
    s.remove_suffix(1);
  }
  return s;
}

std::string_view strip_trailing_punct(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.back() == '.' || s.back() == ',' || s.back() == ';')) {
    s.remove_suffix(1);
    s = trim(s);
  }
  return s;
}

std::string label_key(std::string_view s) {
  std::string key;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) key.push_back(static_cast<char>(std::tolower(u)));
  }
  return key;
}

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

enum class Field {
  central,
  neighbors,
  connections,
  node_texts,
  choice,
  choice_reason,
  answer,
  reasoning,
};

std::optional<Field> field_from_key(const std::string& key) {
  if (key == "centralnodeid" || key == "centralnodeids") return Field::central;
  if (key == "neighboringnodeid" || key == "neighboringnodeids" || key == "neighbouringnodeid" ||
      key == "neighbouringnodeids") {
    return Field::neighbors;
  }
  if (key == "connectionrelationship" || key == "connectionrelationships") return Field::connections;
  if (key.starts_with("nodetexts")) return Field::node_texts;
  if (key == "chosensubgraph") return Field::choice;
  if (key == "chosensubgraphreason") return Field::choice_reason;
  if (key == "answer") return Field::answer;
  if (key == "briefreasoning") return Field::reasoning;
  return std::nullopt;
}

struct Classified {
  enum Kind { blank, candidate_header, choice_header, field_line, other } kind = other;
  std::optional<std::size_t> header_index;  // parsed "Subgraph_<i>" index
  Field field = Field::answer;
  std::string_view value;
  std::size_t value_offset = 0;  // relative to the line start
};

Classified classify(std::string_view line) {
  Classified c;
  std::string_view body = strip_leading_markup(line);
  if (trim(body).empty()) {
    c.kind = trim(line).empty() ? Classified::blank : Classified::other;
    return c;
  }

  // Header: the label alone on its line, optional trailing ':'.
  std::string_view head = strip_trailing_markup(body);
  if (!head.empty() && head.back() == ':') head = strip_trailing_markup(head.substr(0, head.size() - 1));
  if (iequals_prefix(head, "subgraph")) {
    std::string_view rest = head.substr(8);
    if (!rest.empty() && (rest.front() == '_' || rest.front() == ' ')) rest.remove_prefix(1);
    if (!rest.empty() && std::all_of(rest.begin(), rest.end(),
                                     [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      c.kind = Classified::candidate_header;
      std::size_t idx = 0;
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), idx);
      if (ec == std::errc() && ptr == rest.data() + rest.size()) c.header_index = idx;
      return c;
    }
  }
  if (head.find(':') == std::string_view::npos && label_key(head) == "chosensubgraphreasoning") {
    c.kind = Classified::choice_header;
    return c;
  }

  std::size_t colon = body.find(':');
  if (colon != std::string_view::npos && colon <= 80) {
    std::string_view label = strip_trailing_markup(body.substr(0, colon));
    if (auto f = field_from_key(label_key(label))) {
      std::string_view value = body.substr(colon + 1);
      while (!value.empty() && (is_space(value.front()) || value.front() == '*' || value.front() == '_')) {
        value.remove_prefix(1);
      }
      value = strip_trailing_markup(value);
      c.kind = Classified::field_line;
      c.field = *f;
      c.value = value;
      c.value_offset = static_cast<std::size_t>(value.data() - line.data());
      return c;
    }
  }
  return c;
}

struct Span {
  std::size_t offset;
  std::size_t length;
};

class DefectSink {
 public:
  explicit DefectSink(std::vector<Defect>& out) : out_(out) {}
  void add(DefectKind kind, Span span, std::string message) {
    out_.push_back(Defect{kind, span.offset, span.length, std::move(message)});
  }

 private:
  std::vector<Defect>& out_;
};

bool is_empty_marker(std::string_view v) {
  v = trim(v);
  if (v.empty() || v == "[]") return true;
  return label_key(v) == "none" && v.size() == 4;
}

// Returns false if any item was rejected.
bool parse_id_list(std::string_view value, Span span, DefectSink& sink, std::vector<NodeId>& out) {
  value = strip_trailing_punct(value);
  if (!value.empty() && value.front() == '[' && value.back() == ']') {
    value = trim(value.substr(1, value.size() - 2));
  }
  if (is_empty_marker(value)) return true;
  bool ok = true;
  std::set<NodeId> seen;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t comma = value.find(',', pos);
    if (comma == std::string_view::npos) comma = value.size();
    std::string_view item = trim(value.substr(pos, comma - pos));
    auto id = parse_node_token(item);
    if (!id) {
      sink.add(DefectKind::bad_node_id, span, "unparseable node id '" + std::string(item) + "'");
      ok = false;
    } else if (!seen.insert(*id).second) {
      sink.add(DefectKind::duplicate_item, span, "node " + to_string(*id) + " listed twice");
      ok = false;
    } else {
      out.push_back(*id);
    }
    if (comma == value.size()) break;
    pos = comma + 1;
  }
  return ok;
}

bool parse_edge_list(std::string_view value, Span span, DefectSink& sink, std::set<Edge>& out) {
  value = trim(value);
  while (!value.empty() && (value.back() == '.' || value.back() == ';' || value.back() == ',')) {
    value.remove_suffix(1);
    value = trim(value);
  }
  if (!value.empty() && value.front() == '[' && value.back() == ']') {
    value = trim(value.substr(1, value.size() - 2));
  }
  if (is_empty_marker(value)) return true;
  std::size_t pos = 0;
  while (true) {
    while (pos < value.size() && (is_space(value[pos]) || value[pos] == ',')) ++pos;
    if (pos >= value.size()) return true;
    if (value[pos] != '<') {
      sink.add(DefectKind::bad_edge, span, "expected '<' in connection list");
      return false;
    }
    std::size_t close = value.find('>', pos);
    if (close == std::string_view::npos) {
      sink.add(DefectKind::bad_edge, span, "unterminated '<' in connection list");
      return false;
    }
    std::string_view inner = value.substr(pos + 1, close - pos - 1);
    std::size_t comma = inner.find(',');
    if (comma == std::string_view::npos || inner.find(',', comma + 1) != std::string_view::npos) {
      sink.add(DefectKind::bad_edge, span, "edge '<" + std::string(inner) + ">' is not a pair");
      return false;
    }
    auto x = parse_node_token(trim(inner.substr(0, comma)));
    auto y = parse_node_token(trim(inner.substr(comma + 1)));
    if (!x || !y) {
      sink.add(DefectKind::bad_edge, span, "edge '<" + std::string(inner) + ">' has a bad endpoint");
      return false;
    }
    if (*x == *y) {
      sink.add(DefectKind::self_loop, span, "self-loop on " + to_string(*x));
      return false;
    }
    if (!out.insert(make_edge(*x, *y)).second) {
      sink.add(DefectKind::duplicate_item, span, "edge '<" + std::string(inner) + ">' listed twice");
      return false;
    }
    pos = close + 1;
  }
}

struct StructureFields {
  std::optional<std::vector<NodeId>> central;
  std::optional<std::set<NodeId>> neighbors;
  std::optional<std::set<Edge>> edges;
  bool malformed = false;
  Span span{0, 0};

  bool any() const { return central || neighbors || edges; }
};

// Gathers a bracketed value that may continue over following lines. `i` is
// advanced past any consumed continuation lines.
struct ListValue {
  std::string text;
  bool terminated = true;
  Span span;
};

ListValue gather_list(const std::vector<Line>& lines, std::size_t& i, const Classified& c) {
  ListValue out;
  const Line& line = lines[i];
  out.span = {line.offset, line.text.size()};
  std::string_view v = trim(c.value);
  if (v.empty() || v.front() != '[' || v.find(']') != std::string_view::npos) {
    out.text = std::string(c.value);
    return out;
  }
  out.text = std::string(v);
  std::size_t j = i + 1;
  for (; j < lines.size(); ++j) {
    auto k = classify(lines[j].text).kind;
    if (k == Classified::candidate_header || k == Classified::choice_header || k == Classified::field_line) {
      break;
    }
    std::string_view t = trim(lines[j].text);
    out.text.push_back(' ');
    out.text.append(t);
    out.span.length = lines[j].offset + lines[j].text.size() - line.offset;
    if (t.find(']') != std::string_view::npos) {
      i = j;
      return out;
    }
  }
  out.terminated = false;
  i = j - 1;
  return out;
}

void absorb_structure_field(StructureFields& f, const Classified& c, const ListValue& lv,
                            DefectSink& sink) {
  if (!lv.terminated) {
    sink.add(DefectKind::unterminated_list, lv.span, "list value missing closing ']'");
    f.malformed = true;
  }
  auto dup = [&](const char* name) {
    sink.add(DefectKind::duplicate_field, lv.span, std::string("duplicate ") + name + " field");
  };
  switch (c.field) {
    case Field::central: {
      if (f.central) return dup("Central_node_ID");
      std::vector<NodeId> ids;
      if (!parse_id_list(lv.text, lv.span, sink, ids)) f.malformed = true;
      f.central = std::move(ids);
      break;
    }
    case Field::neighbors: {
      if (f.neighbors) return dup("Neighboring_node_ID");
      std::vector<NodeId> ids;
      if (!parse_id_list(lv.text, lv.span, sink, ids)) f.malformed = true;
      f.neighbors = std::set<NodeId>(ids.begin(), ids.end());
      break;
    }
    case Field::connections: {
      if (f.edges) return dup("Connection_relationship");
      std::set<Edge> edges;
      if (!parse_edge_list(lv.text, lv.span, sink, edges)) f.malformed = true;
      f.edges = std::move(edges);
      break;
    }
    default:
      break;
  }
}

// Builds a subgraph from whatever was parsed; missing pieces stay empty and
// mark the block malformed.
Subgraph finish_structure(StructureFields& f, DefectSink& sink, const char* where) {
  Subgraph g;
  const char* names[] = {"Central_node_ID", "Neighboring_node_ID", "Connection_relationship"};
  bool present[] = {f.central.has_value(), f.neighbors.has_value(), f.edges.has_value()};
  for (int k = 0; k < 3; ++k) {
    if (!present[k]) {
      sink.add(DefectKind::missing_field, f.span, std::string(where) + " lacks " + names[k]);
      f.malformed = true;
    }
  }
  if (f.central) g.central = *f.central;
  if (f.neighbors) g.neighbors = *f.neighbors;
  if (f.edges) g.edges = *f.edges;
  for (NodeId c : g.central) {
    if (g.neighbors.count(c)) {
      sink.add(DefectKind::central_overlap, f.span,
               std::string(where) + " lists central " + to_string(c) + " as a neighbor");
      f.malformed = true;
    }
  }
  if (f.central && f.central->empty()) {
    sink.add(DefectKind::missing_field, f.span, std::string(where) + " has an empty central list");
    f.malformed = true;
  }
  return g;
}

std::optional<std::size_t> parse_choice_value(std::string_view v) {
  v = strip_trailing_punct(v);
  while (!v.empty() && (v.front() == '*' || v.front() == '<')) v.remove_prefix(1);
  while (!v.empty() && (v.back() == '*' || v.back() == '>')) v.remove_suffix(1);
  v = trim(v);
  if (iequals_prefix(v, "subgraph")) {
    v.remove_prefix(8);
    if (!v.empty() && (v.front() == '_' || v.front() == ' ')) v.remove_prefix(1);
  }
  if (v.empty()) return std::nullopt;
  std::size_t idx = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), idx);
  if (ec != std::errc() || ptr != v.data() + v.size()) return std::nullopt;
  return idx;
}

std::string_view strip_answer(std::string_view v) {
  v = trim(v);
  while (!v.empty() && (v.back() == '.' || v.back() == ';')) v.remove_suffix(1);
  return trim(v);
}

}  // namespace

ParseReport parse_trace(std::string_view completion, std::size_t expected_k) {
  ParseReport report;
  SsrTrace& trace = report.trace;
  DefectSink sink(report.defects);

  std::size_t start = 0;
  if (auto think = completion.rfind("</think>"); think != std::string_view::npos) {
    start = think + 8;
  }
  auto all_lines = split_lines(completion);
  std::vector<Line> lines;
  for (const Line& l : all_lines) {
    if (l.offset + l.text.size() < start) continue;
    if (l.offset < start) {
      lines.push_back({start, l.text.substr(start - l.offset)});
    } else {
      lines.push_back(l);
    }
  }

  enum class State { preamble, candidate, surplus, choice } state = State::preamble;
  StructureFields block;
  StructureFields repeated;
  bool choice_seen = false;
  bool choice_value_seen = false;
  std::string* continuation = nullptr;

  auto close_candidate = [&]() {
    if (state != State::candidate) return;
    Subgraph g = finish_structure(block, sink, ("Subgraph_" + std::to_string(trace.candidates.size())).c_str());
    if (block.malformed) trace.malformed_candidates.push_back(trace.candidates.size());
    trace.candidates.push_back(std::move(g));
    block = StructureFields{};
  };
  auto enter_choice = [&](Span span) {
    close_candidate();
    if (state != State::choice) {
      if (choice_seen) sink.add(DefectKind::duplicate_block, span, "second Chosen_subgraph_reasoning block");
      choice_seen = true;
      if (!repeated.any()) repeated.span = span;
    }
    state = State::choice;
  };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Line& line = lines[i];
    const Span line_span{line.offset, line.text.size()};
    Classified c = classify(line.text);

    if (c.kind == Classified::blank) {
      if (continuation) continuation->push_back('\n');
      continue;
    }
    if (c.kind == Classified::other) {
      if (continuation) {
        continuation->push_back('\n');
        continuation->append(trim(line.text));
      } else if (state == State::candidate || state == State::choice) {
        sink.add(DefectKind::unexpected_text, line_span, "text outside any field");
      }
      continue;
    }
    continuation = nullptr;

    if (c.kind == Classified::candidate_header) {
      close_candidate();
      if (state == State::choice) {
        sink.add(DefectKind::unexpected_text, line_span, "candidate block after the choice block");
      }
      if (trace.candidates.size() >= expected_k) {
        sink.add(DefectKind::surplus_candidates, line_span,
                 "candidate block beyond expected " + std::to_string(expected_k));
        state = State::surplus;
        continue;
      }
      if (!c.header_index || *c.header_index != trace.candidates.size()) {
        sink.add(DefectKind::index_mismatch, line_span,
                 "block label does not match position " + std::to_string(trace.candidates.size()));
      }
      state = State::candidate;
      block = StructureFields{};
      block.span = line_span;
      continue;
    }
    if (c.kind == Classified::choice_header) {
      enter_choice(line_span);
      continue;
    }

    // Field line.
    if (state == State::preamble) continue;
    switch (c.field) {
      case Field::central:
      case Field::neighbors:
      case Field::connections: {
        ListValue lv = gather_list(lines, i, c);
        if (state == State::surplus) break;
        if (state == State::candidate) {
          absorb_structure_field(block, c, lv, sink);
        } else {
          absorb_structure_field(repeated, c, lv, sink);
        }
        break;
      }
      case Field::node_texts:
        if (state != State::surplus) sink.add(DefectKind::unexpected_text, line_span, "node text list in output");
        break;
      case Field::choice: {
        enter_choice(line_span);
        if (choice_value_seen) {
          sink.add(DefectKind::duplicate_field, line_span, "duplicate Chosen_subgraph field");
          break;
        }
        choice_value_seen = true;
        if (auto idx = parse_choice_value(c.value)) {
          trace.chosen_index = idx;
        } else {
          sink.add(DefectKind::bad_choice_value, line_span,
                   "Chosen_subgraph value '" + std::string(c.value) + "' is not an index");
        }
        break;
      }
      case Field::choice_reason:
      case Field::answer:
      case Field::reasoning: {
        if (state == State::surplus) break;
        enter_choice(line_span);
        std::optional<std::string>& slot = c.field == Field::answer      ? trace.answer
                                           : c.field == Field::reasoning ? trace.reasoning
                                                                         : trace.chosen_reason;
        if (slot) {
          sink.add(DefectKind::duplicate_field, line_span, "duplicate field");
          break;
        }
        if (c.field == Field::answer) {
          slot = std::string(strip_answer(c.value));
        } else {
          slot = std::string(trim(c.value));
          continuation = &*slot;
        }
        break;
      }
    }
  }
  close_candidate();

  for (std::optional<std::string>* s : {&trace.reasoning, &trace.chosen_reason}) {
    if (*s) **s = std::string(trim(**s));
  }
  if (repeated.any()) {
    trace.repeated_subgraph = finish_structure(repeated, sink, "Chosen_subgraph_reasoning");
    trace.repeated_malformed = repeated.malformed;
  }

  const Span end{completion.size(), 0};
  if (trace.candidates.empty()) sink.add(DefectKind::missing_candidates, end, "no Subgraph_i blocks");
  if (!trace.chosen_index && !choice_value_seen) {
    sink.add(DefectKind::missing_choice, end, "no Chosen_subgraph line");
  }
  if (!trace.answer) sink.add(DefectKind::missing_answer, end, "no Answer line");
  return report;
}

namespace {

std::string id_list(const std::vector<NodeId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back(',');
    out += to_string(ids[i]);
  }
  return out;
}

void append_structure(std::string& out, const Subgraph& g) {
  out += "  Central_node_ID: " + id_list(g.central) + "\n";
  out += "  Neighboring_node_ID: " + id_list({g.neighbors.begin(), g.neighbors.end()}) + "\n";
  out += "  Connection_relationship: ";
  bool first = true;
  for (const Edge& e : g.edges) {
    if (!first) out.push_back(',');
    first = false;
    out += "<" + to_string(e.a) + ", " + to_string(e.b) + ">";
  }
  out += "\n";
}

}  // namespace

std::string format_trace(const SsrTrace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.candidates.size(); ++i) {
    out += "**Subgraph_" + std::to_string(i) + "**\n";
    append_structure(out, trace.candidates[i]);
    out += "\n";
  }
  const bool has_choice = trace.chosen_index || trace.chosen_reason || trace.repeated_subgraph ||
                          trace.answer || trace.reasoning;
  if (!has_choice) return out;
  out += "**Chosen_subgraph_reasoning**\n";
  if (trace.chosen_index) out += "  **Chosen_subgraph:** " + std::to_string(*trace.chosen_index) + "\n";
  if (trace.chosen_reason) out += "  Chosen_subgraph_reason: " + *trace.chosen_reason + "\n";
  if (trace.repeated_subgraph) append_structure(out, *trace.repeated_subgraph);
  if (trace.answer) out += "  **Answer:** " + *trace.answer + "\n";
  if (trace.reasoning) out += "  **Brief_reasoning:** " + *trace.reasoning + "\n";
  return out;
}

std::optional<DistanceScore> parse_distance_score(std::string_view s) {
  auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; };
  std::optional<double> last;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t begin = i;
    bool sign = (s[i] == '-' || s[i] == '+');
    std::size_t j = sign ? i + 1 : i;
    bool starts_number = j < s.size() && (digit(s[j]) || (s[j] == '.' && j + 1 < s.size() && digit(s[j + 1])));
    bool boundary = begin == 0 || (!word(s[begin - 1]) && s[begin - 1] != '.');
    if (!starts_number || !boundary) {
      ++i;
      continue;
    }
    while (j < s.size() && digit(s[j])) ++j;
    if (j < s.size() && s[j] == '.') {
      ++j;
      while (j < s.size() && digit(s[j])) ++j;
    }
    if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < s.size() && (s[k] == '-' || s[k] == '+')) ++k;
      if (k < s.size() && digit(s[k])) {
        while (k < s.size() && digit(s[k])) ++k;
        j = k;
      }
    }
    if (j < s.size() && word(s[j])) {
      // Part of an identifier such as "3rd" or "0x1".
      i = j;
      continue;
    }
    std::string_view tok = s.substr(begin + (s[begin] == '+' ? 1 : 0), j - begin - (s[begin] == '+' ? 1 : 0));
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec == std::errc() && ptr != tok.data()) last = v;
    i = j;
  }
  if (!last) return std::nullopt;
  DistanceScore out{*last, false};
  if (out.value < 0.0) {
    out.value = 0.0;
    out.clamped = true;
  } else if (out.value > 1.0) {
    out.value = 1.0;
    out.clamped = true;
  }
  return out;
}

GraphBlock parse_graph_block(std::string_view text) {
  GraphBlock out;
  auto lines = split_lines(text);
  std::optional<std::vector<NodeId>> central;
  std::set<NodeId> listed;
  std::set<Edge> edges;
  bool saw_edges = false;
  std::vector<Defect> defects;
  DefectSink sink(defects);

  auto fail = [](const std::string& msg) { throw Error(ErrorKind::malformed_document, "graph block: " + msg); };

  for (std::size_t i = 0; i < lines.size(); ++i) {
    Classified c = classify(lines[i].text);
    if (c.kind != Classified::field_line) continue;
    switch (c.field) {
      case Field::central: {
        std::vector<NodeId> ids;
        if (!parse_id_list(c.value, {lines[i].offset, lines[i].text.size()}, sink, ids)) fail("bad central list");
        central = std::move(ids);
        break;
      }
      case Field::node_texts: {
        std::string_view v = trim(c.value);
        if (v == "[]") break;
        if (v != "[") fail("node text list must open with '['");
        std::size_t j = i + 1;
        for (; j < lines.size(); ++j) {
          std::string_view entry = trim(lines[j].text);
          if (entry == "]") break;
          std::size_t colon = entry.find(':');
          if (colon == std::string_view::npos) fail("node text entry without ':'");
          auto id = parse_node_token(trim(entry.substr(0, colon)));
          if (!id) fail("bad node id in node texts");
          std::string_view body = entry.substr(colon + 1);
          if (!body.empty() && body.front() == ' ') body.remove_prefix(1);
          out.texts[*id] = std::string(body);
          listed.insert(*id);
        }
        if (j == lines.size()) fail("unterminated node text list");
        i = j;
        break;
      }
      case Field::connections: {
        ListValue lv = gather_list(lines, i, c);
        if (!lv.terminated) fail("unterminated connection list");
        if (!parse_edge_list(lv.text, lv.span, sink, edges)) fail("bad connection list");
        saw_edges = true;
        break;
      }
      default:
        break;
    }
  }
  if (!central || central->empty()) fail("missing central node ids");
  if (!saw_edges) fail("missing connection relationships");
  out.subgraph.central = *central;
  std::set<NodeId> cset(central->begin(), central->end());
  for (NodeId n : listed) {
    if (!cset.count(n)) out.subgraph.neighbors.insert(n);
  }
  for (const Edge& e : edges) {
    for (NodeId n : {e.a, e.b}) {
      if (!cset.count(n)) out.subgraph.neighbors.insert(n);
    }
  }
  out.subgraph.edges = std::move(edges);
  return out;
}

}  // namespace ssr
