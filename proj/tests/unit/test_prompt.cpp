// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ssr/error.hpp"
#include "ssr/prompt.hpp"
#include "ssr/trace.hpp"
#include "support.hpp"

using namespace ssr;
using ssr::test::n;
using ssr::test::sub;

namespace {

RenderedPrompt render_case(std::size_t k = 5) {
  auto inst = test::case_instance();
  return render_task_prompt(inst.context, inst.texts, inst.task, {k, TemplateKind::node_classification});
}

std::size_t count(std::string_view hay, std::string_view needle) {
  std::size_t c = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) ++c;
  return c;
}

}  // namespace

TEST_SUITE("prompt") {
  TEST_CASE("options section lists the Cora labels in angle brackets") {
    auto p = render_case();
    CHECK(p.section_text("options").find(
              "<Theory>, <Probabilistic Methods>, <Genetic Algorithms>, <Reinforcement Learning>, <Case-Based>, "
              "<Neural Networks>, <Rule Learning>") != std::string_view::npos);
  }

  TEST_CASE("manifest tiles the text in order") {
    auto p = render_case();
    std::size_t at = 0;
    for (const auto& s : p.manifest) {
      CHECK(s.offset == at);
      at += s.length;
    }
    CHECK(at == p.text.size());
    REQUIRE(p.section("graph_block") != nullptr);
    CHECK(p.section("nonexistent") == nullptr);
  }

  TEST_CASE("rendering is deterministic and tracks sample_count only where it appears") {
    auto a = render_case(5);
    auto b = render_case(5);
    CHECK(a.text == b.text);
    auto c = render_case(3);
    CHECK(c.section_text("sampling").find("**3**") != std::string_view::npos);
    CHECK(a.section_text("sampling").find("**5**") != std::string_view::npos);
    for (const auto& s : a.manifest) {
      if (s.name == "sampling") continue;
      CHECK(a.section_text(s.name) == c.section_text(s.name));
    }
  }

  TEST_CASE("graph block layout") {
    auto inst = test::case_instance();
    auto block = render_graph_block(inst.context, inst.texts);
    CHECK(block.rfind("- Central node ID(s): node11\n", 0) == 0);
    CHECK(block.find("  node9: EM algorithm for mixtures of factor analyzers") != std::string::npos);
    CHECK(block.find("<node0, node8>, <node1, node12>") != std::string::npos);
    CHECK(count(block, "<node") == 25);
    auto parsed = parse_graph_block(block);
    CHECK(parsed.subgraph == inst.context);
    CHECK(parsed.texts == inst.texts);
  }

  TEST_CASE("isolated central renders an empty connection list") {
    auto block = render_graph_block(sub({4}, {}, {}), {{n(4), "alone"}});
    CHECK(block.find("- Connection relationships: []") != std::string::npos);
  }

  TEST_CASE("multi-line node texts stay on one line") {
    auto block = render_graph_block(sub({4}, {}, {}), {{n(4), "first\nsecond\r\nthird"}});
    CHECK(block.find("  node4: first second third\n") != std::string::npos);
  }

  TEST_CASE("render preconditions") {
    auto inst = test::case_instance();
    CHECK_THROWS_AS(render_task_prompt(inst.context, inst.texts, inst.task, {1, TemplateKind::node_classification}),
                    Error);
    CHECK_THROWS_AS(render_task_prompt(inst.context, inst.texts, inst.task, {5, TemplateKind::link_classification}),
                    Error);
    auto texts = inst.texts;
    texts.erase(n(9));
    CHECK_THROWS_AS(render_task_prompt(inst.context, texts, inst.task, {5, TemplateKind::node_classification}),
                    Error);
    auto task = inst.task;
    task.options.push_back("bad<option>");
    CHECK_THROWS_AS(render_task_prompt(inst.context, inst.texts, task, {5, TemplateKind::node_classification}), Error);
  }

  TEST_CASE("diversity prompt") {
    auto inst = test::case_instance();
    auto g = sub({11}, {13, 17}, {{11, 13}, {11, 17}});
    auto same = render_diversity_prompt(g, g, inst.texts);
    auto body = [](std::string_view section) { return section.substr(section.find("- Central")); };
    CHECK(body(same.section_text("graph_block_1")) == body(same.section_text("graph_block_2")));
    auto central = sub({11}, {}, {});
    auto mixed = render_diversity_prompt(central, inst.context, inst.texts);
    CHECK(mixed.section_text("graph_block_1").find("- Connection relationships: []") != std::string_view::npos);
    CHECK(mixed.section_text("graph_block_2").find("<node9, node11>") != std::string_view::npos);
    CHECK_THROWS_AS(render_diversity_prompt(central, sub({13}, {}, {}), inst.texts), Error);
  }

  TEST_CASE("template parsing rejects bad assets") {
    CHECK_THROWS_AS(parse_template("@@section graph_block\n{{graph_block}}\n"), Error);
    CHECK_THROWS_AS(parse_template("@@template node_classification 1\n@@section graph_block\n{{graph_block}}\n"
                                   "@@section options\n{{options}} {{unknown}}\n"),
                    Error);
    CHECK_THROWS_AS(parse_template("@@template node_classification 1\n@@section graph_block\n{{graph_block}}\n"
                                   "@@section graph_block\n{{options}}\n"),
                    Error);
    CHECK_THROWS_AS(parse_template("@@template node_classification 1\n@@section graph_block\n{{graph_block}}\n"), Error);
    auto ok = parse_template("@@template node_classification 2\n@@section graph_block\n{{graph_block}}\n"
                             "@@section options\n{{options}}\n");
    CHECK(ok.version == 2);
    CHECK(ok.sections.size() == 2);
  }

  TEST_CASE("template directory overrides one kind") {
    auto dir = std::filesystem::temp_directory_path() / "ssr_prompt_test_templates";
    std::filesystem::create_directories(dir);
    {
      std::ofstream out(dir / "node_classification.txt");
      out << "@@template node_classification 7\n@@section graph_block\nG:{{graph_block}}\n"
             "@@section options\nO:{{options}}\n";
    }
    auto set = TemplateSet::from_directory(dir);
    CHECK(set.get(TemplateKind::node_classification).version == 7);
    CHECK(set.get(TemplateKind::diversity_judge).sections ==
          TemplateSet::builtin().get(TemplateKind::diversity_judge).sections);
    auto inst = test::case_instance();
    auto p = render_task_prompt(inst.context, inst.texts, inst.task, {5, TemplateKind::node_classification}, set);
    CHECK(p.text.rfind("G:- Central node ID(s): node11", 0) == 0);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("builtin templates cover every kind") {
    for (auto kind : {TemplateKind::node_classification, TemplateKind::link_classification,
                      TemplateKind::diversity_judge}) {
      CHECK(TemplateSet::builtin().get(kind).kind == kind);
      CHECK(parse_template_kind(to_string(kind)) == kind);
    }
  }

  TEST_CASE("content digest is FNV-1a 64") {
    CHECK(content_digest("") == "cbf29ce484222325");
    CHECK(content_digest("a") == "af63dc4c8601ec8c");
  }
}
