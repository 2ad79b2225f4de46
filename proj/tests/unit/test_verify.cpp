// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ssr/chat.hpp"
#include "ssr/error.hpp"
#include "ssr/trace.hpp"
#include "ssr/verify.hpp"
#include "support.hpp"

using namespace ssr;
using ssr::test::n;
using ssr::test::read_fixture;
using ssr::test::sub;

namespace {

// Distance provider returning a fixed value and counting calls.
class FixedDistance final : public DistanceProvider {
 public:
  explicit FixedDistance(double d) : d_(d) {}
  const char* kind() const override { return "fixed"; }
  double distance(const Subgraph&, const Subgraph&, const NodeTexts&) override {
    ++calls;
    return d_;
  }
  int calls = 0;

 private:
  double d_;
};

SsrTrace trace_of(const char* fixture) { return parse_trace(read_fixture(fixture), 5).trace; }

}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("authenticity") {
    auto inst = test::case_instance();
    auto t = trace_of("case_full_ssr.txt");
    CHECK(check_authenticity(inst.context, t));
    t.candidates[1] = sub({11}, {18}, {{11, 18}});
    CHECK_FALSE(check_authenticity(inst.context, t));
    CHECK_FALSE(check_authenticity(inst.context, SsrTrace{}));
    auto m = trace_of("case_full_ssr.txt");
    m.malformed_candidates = {3};
    CHECK_FALSE(check_authenticity(inst.context, m));
  }

  TEST_CASE("authenticity only loses support when the context shrinks") {
    auto inst = test::case_instance();
    auto t = trace_of("case_full_ssr.txt");
    REQUIRE(check_authenticity(inst.context, t));
    bool seen_false = false;
    for (const Edge& e : inst.context.edges) {
      auto smaller = inst.context;
      smaller.edges.erase(e);
      if (!check_authenticity(smaller, t)) seen_false = true;
    }
    CHECK(seen_false);
    auto fabricated = trace_of("fabricated_edge.txt");
    REQUIRE_FALSE(check_authenticity(inst.context, fabricated));
    for (const Edge& e : inst.context.edges) {
      auto smaller = inst.context;
      smaller.edges.erase(e);
      CHECK_FALSE(check_authenticity(smaller, fabricated));
    }
  }

  TEST_CASE("consistency") {
    auto t = trace_of("case_full_ssr.txt");
    CHECK(check_consistency(t));
    auto out_of_range = t;
    out_of_range.chosen_index = 7;
    CHECK_FALSE(check_consistency(out_of_range));
    auto extra = t;
    extra.repeated_subgraph->neighbors.insert(n(9));
    CHECK_FALSE(check_consistency(extra));
    auto none = t;
    none.chosen_index.reset();
    CHECK_FALSE(check_consistency(none));
    CHECK_FALSE(check_consistency(trace_of("inconsistent_choice.txt")));
  }

  TEST_CASE("answer check normalizes brackets and case") {
    auto task = test::case_instance().task;
    CHECK(check_answer(std::string("Neural Networks"), task));
    CHECK(check_answer(std::string("<neural networks>"), task));
    CHECK_FALSE(check_answer(std::nullopt, task));
    CHECK_FALSE(check_answer(std::string("Probabilistic Methods"), task));
    task.gold_label.reset();
    CHECK_THROWS_AS(check_answer(std::string("x"), task), Error);
  }

  TEST_CASE("group energy by substitution") {
    NodeTexts none;
    std::vector<Subgraph> two{sub({1}, {}, {}), sub({1}, {2}, {{1, 2}})};
    FixedDistance half(0.5);
    auto e2 = group_energy(two, none, half);
    CHECK(e2.energy == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(e2.mean_distance == doctest::Approx(0.5));
    CHECK(half.calls == 1);

    std::vector<Subgraph> three{two[0], two[1], sub({1}, {3}, {{1, 3}})};
    FixedDistance one(1.0);
    auto e3 = group_energy(three, none, one);
    CHECK(e3.energy == doctest::Approx(-1.0));
    CHECK(e3.mean_distance == doctest::Approx(1.0));
    CHECK(one.calls == 3);

    JaccardDistance jac;
    std::vector<Subgraph> same{two[0], two[0]};
    CHECK(group_energy(same, none, jac).energy == doctest::Approx(-1000.0));
    CHECK_THROWS_AS(group_energy(std::span(two.data(), 1), none, jac), Error);
    FixedDistance bad(1.5);
    CHECK_THROWS_AS(group_energy(two, none, bad), Error);
  }

  TEST_CASE("jaccard distance") {
    auto g = sub({11}, {13, 17}, {{11, 13}, {11, 17}});
    CHECK(jaccard_distance(g, g) == 0.0);
    CHECK(jaccard_distance(sub({11}, {}, {}), g) == doctest::Approx(0.8));
    CHECK(jaccard_distance(g, sub({11}, {}, {})) == jaccard_distance(sub({11}, {}, {}), g));
    // Sharing only the central node: 1 shared item out of 1 + 2 + 3.
    auto a = sub({1}, {2}, {{1, 2}});
    auto b = sub({1}, {3, 4}, {{1, 3}, {3, 4}, {1, 4}});
    CHECK(jaccard_distance(a, b) == doctest::Approx(1.0 - 1.0 / (1 + 2 + 5)));
  }

  TEST_CASE("pair digest ignores order") {
    auto inst = test::case_instance();
    auto a = sub({11}, {13}, {{11, 13}});
    auto b = sub({11}, {9}, {{9, 11}});
    CHECK(pair_digest(a, b, inst.texts) == pair_digest(b, a, inst.texts));
    CHECK(pair_digest(a, b, inst.texts) != pair_digest(a, a, inst.texts));
  }

  TEST_CASE("judge distance uses the cache and is symmetric") {
    auto inst = test::case_instance();
    auto a = sub({11}, {13}, {{11, 13}});
    auto b = sub({11}, {9}, {{9, 11}});
    auto prompt = render_diversity_prompt(a, b, inst.texts).text;
    auto reversed = render_diversity_prompt(b, a, inst.texts).text;
    ScriptedChatClient judge;
    judge.add(prompt, {"The distance score is 0.7"});
    judge.add(reversed, {"The distance score is 0.7"});

    auto file = std::filesystem::temp_directory_path() / "ssr_verify_cache.jsonl";
    std::filesystem::remove(file);
    {
      DistanceCache cache(file);
      JudgeDistance d(judge, &cache);
      CHECK(d.distance(a, b, inst.texts) == doctest::Approx(0.7));
      CHECK(d.distance(b, a, inst.texts) == doctest::Approx(0.7));
      CHECK(cache.size() == 1);
    }
    // A fresh judge with no script still answers from the persisted cache.
    ScriptedChatClient silent;
    DistanceCache reloaded(file);
    JudgeDistance d2(silent, &reloaded);
    CHECK(d2.distance(b, a, inst.texts) == doctest::Approx(0.7));
    JudgeDistance uncached(silent);
    CHECK_THROWS_AS(uncached.distance(a, b, inst.texts), Error);
    std::filesystem::remove(file);
  }

  TEST_CASE("cache tolerates a torn last line only") {
    auto file = std::filesystem::temp_directory_path() / "ssr_verify_torn.jsonl";
    {
      std::ofstream out(file);
      out << R"({"digest":"aa","distance":0.25,"provider":"x","timestamp":1})" << "\n" << R"({"digest":"bb","dis)";
    }
    DistanceCache ok(file);
    CHECK(ok.lookup("aa") == 0.25);
    CHECK_FALSE(ok.lookup("bb").has_value());
    {
      std::ofstream out(file);
      out << "garbage\n" << R"({"digest":"aa","distance":0.25,"provider":"x","timestamp":1})" << "\n";
    }
    CHECK_THROWS_AS(DistanceCache{file}, Error);
    std::filesystem::remove(file);
  }

  TEST_CASE("structural flags") {
    auto inst = test::case_instance();
    auto t = trace_of("case_full_ssr.txt");
    CHECK(structural_flags(inst.context, t, 5).empty());
    CHECK(structural_flags(inst.context, t, 4).count(StructuralFlag::wrong_candidate_count));
    auto no_central = t;
    no_central.candidates.erase(no_central.candidates.begin());
    CHECK(structural_flags(inst.context, no_central, 4).count(StructuralFlag::missing_central_only_candidate));
    auto dup = t;
    dup.candidates[1] = dup.candidates[2];
    CHECK(structural_flags(inst.context, dup, 5).count(StructuralFlag::duplicate_candidates));
  }

  TEST_CASE("verify bundles the checks") {
    auto inst = test::case_instance();
    JaccardDistance jac;
    auto out = verify(inst.context, inst.texts, trace_of("case_full_ssr.txt"), inst.task, {5, &jac});
    CHECK(out.status_real);
    CHECK(out.status_consist);
    CHECK(out.status_ans == true);
    REQUIRE(out.energy.has_value());
    CHECK(*out.mean_distance > kDiversityThreshold);
    auto no_gold = inst.task;
    no_gold.gold_label.reset();
    auto bare = verify(inst.context, inst.texts, trace_of("case_full_ssr.txt"), no_gold);
    CHECK_FALSE(bare.status_ans.has_value());
    CHECK_FALSE(bare.energy.has_value());
  }
}
