// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include <doctest.h>

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "ssr/ssr.h"

using Json = nlohmann::json;

namespace {

std::string fixture(const char* name) {
  std::ifstream in(std::string(SSR_FIXTURE_DIR) + "/" + name, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Takes ownership of a library string.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  ssr_string_free(s);
  return out;
}

void collect(const char* line, void* user) { static_cast<std::vector<std::string>*>(user)->push_back(line); }

const char* kDoc = R"({"nodes":[{"id":0,"text":"zero"},{"id":1,"text":"one"},{"id":2,"text":"two"},
  {"id":3,"text":"three"}],"edges":[[0,1],[1,2],[2,3]],
  "tasks":[{"kind":"node_classification","central":[1],"options":["A","B"],"gold_label":"A"}]})";

}  // namespace

TEST_SUITE("c_api") {
  TEST_CASE("status names and version") {
    CHECK(std::string(ssr_status_name(SSR_OK)) == "ok");
    CHECK(std::string(ssr_status_name(SSR_ERR_MISSING_GOLD)) == "missing_gold");
    CHECK(std::string(ssr_version()).size() > 0);
    CHECK(ssr_last_error() != nullptr);
  }

  TEST_CASE("reward primitives") {
    double r = -1;
    CHECK(ssr_reward_r1(1, 1, 1, &r) == SSR_OK);
    CHECK(r == 1.0);
    CHECK(ssr_reward_r1(1, 0, 1, &r) == SSR_OK);
    CHECK(r == 0.05);
    CHECK(ssr_reward_r1(1, 1, 1, nullptr) == SSR_ERR_INVALID_ARGUMENT);
    double rewards[] = {1.0, 0.0}, adv[2];
    CHECK(ssr_group_advantages(rewards, 2, adv) == SSR_OK);
    CHECK(adv[0] == doctest::Approx(1.0));
    double ratio[] = {2.0}, a1[] = {1.0}, kl[] = {0.0}, obj = 0;
    CHECK(ssr_grpo_objective(ratio, a1, kl, 1, 0.2, 0.0, &obj) == SSR_OK);
    CHECK(obj == -1.2);
    CHECK(ssr_grpo_objective(ratio, a1, kl, 1, 2.0, 0.0, &obj) != SSR_OK);
  }

  TEST_CASE("graph handle lifecycle") {
    ssr_graph* g = nullptr;
    REQUIRE(ssr_graph_load(kDoc, std::strlen(kDoc), &g) == SSR_OK);
    CHECK(ssr_graph_node_count(g) == 4);
    CHECK(ssr_graph_edge_count(g) == 3);
    CHECK(ssr_graph_task_count(g) == 1);
    uint64_t central[] = {1};
    char* out = nullptr;
    REQUIRE(ssr_graph_extract(g, central, 1, 1, 64, &out) == SSR_OK);
    auto ext = Json::parse(take(out));
    CHECK(ext["context"]["neighbors"].size() == 2);
    std::vector<std::string> lines;
    CHECK(ssr_graph_instances(g, 2, 64, collect, &lines) == SSR_OK);
    REQUIRE(lines.size() == 1);
    CHECK(Json::parse(lines[0])["id"] == "task-0");
    char* ser = nullptr;
    REQUIRE(ssr_graph_serialize(g, &ser) == SSR_OK);
    ssr_graph* again = nullptr;
    std::string text = take(ser);
    CHECK(ssr_graph_load(text.data(), text.size(), &again) == SSR_OK);
    CHECK(ssr_graph_edge_count(again) == 3);
    ssr_graph_free(again);
    ssr_graph_free(g);
    ssr_graph_free(nullptr);
  }

  TEST_CASE("failures set the status, the message and a null output") {
    ssr_graph* g = reinterpret_cast<ssr_graph*>(0x1);
    const char* bad = "{\"nodes\":";
    CHECK(ssr_graph_load(bad, std::strlen(bad), &g) == SSR_ERR_MALFORMED);
    CHECK(g == nullptr);
    CHECK(std::string(ssr_last_error()).size() > 0);
    const char* loop = R"({"nodes":[{"id":0,"text":"a"}],"edges":[[0,0]]})";
    CHECK(ssr_graph_load(loop, std::strlen(loop), &g) == SSR_ERR_VALIDATION);
    CHECK(ssr_graph_load(nullptr, 0, &g) == SSR_ERR_INVALID_ARGUMENT);
    char* out = reinterpret_cast<char*>(0x1);
    CHECK(ssr_score("not json", &out) == SSR_ERR_MALFORMED);
    CHECK(out == nullptr);
  }

  TEST_CASE("parse and score through JSON") {
    std::string completion = fixture("case_full_ssr.txt");
    char* out = nullptr;
    REQUIRE(ssr_parse_trace(completion.data(), completion.size(), 5, &out) == SSR_OK);
    auto parsed = Json::parse(take(out));
    CHECK(parsed["trace"]["chosen_index"] == 2);
    CHECK(parsed["defects"].empty());

    Json req = {{"instance", Json::parse(fixture("case_instance.json"))},
                {"completions", {completion, fixture("smallest_choice_correct.txt")}},
                {"stage", "stage2"},
                {"lambda", 0.1}};
    REQUIRE(ssr_score(req.dump().c_str(), &out) == SSR_OK);
    auto scored = Json::parse(take(out));
    CHECK(scored["results"][1]["breakdown"]["r2"].get<double>() == doctest::Approx(1.1));

    req["instance"]["task"].erase("gold_label");
    CHECK(ssr_score(req.dump().c_str(), &out) == SSR_ERR_MISSING_GOLD);

    int found = 0, clamped = 0;
    double value = 0;
    const char* judge = "distance score: 0.4";
    CHECK(ssr_parse_distance_score(judge, std::strlen(judge), &found, &value, &clamped) == SSR_OK);
    CHECK(found == 1);
    CHECK(value == doctest::Approx(0.4));
  }

  TEST_CASE("planted suite and evaluation") {
    std::vector<std::string> lines;
    REQUIRE(ssr_planted_suite(12, 7, collect, &lines) == SSR_OK);
    REQUIRE(lines.size() == 12);
    std::string jsonl;
    for (auto& l : lines) jsonl += l + "\n";
    char* out = nullptr;
    REQUIRE(ssr_eval(jsonl.c_str(), R"({"policy":{"kind":"scripted_policy","behavior":"oracle_denoiser"}})", &out) == SSR_OK);
    auto report = Json::parse(take(out));
    CHECK(report["report"]["accuracy"] == 1.0);
    CHECK(ssr_eval(jsonl.c_str(), R"({"policy":{"kind":"scripted_policy","behavior":"nope"}})", &out) != SSR_OK);
  }

  TEST_CASE("server lifecycle") {
    ssr_server* s = nullptr;
    REQUIRE(ssr_server_create("127.0.0.1", 0, 2, &s) == SSR_OK);
    int port = 0;
    REQUIRE(ssr_server_bind(s, &port) == SSR_OK);
    CHECK(port > 0);
    std::thread t([s] { ssr_server_serve(s); });
    httplib::Client cli("127.0.0.1", port);
    auto res = cli.Get("/v1/health");
    REQUIRE(res);
    CHECK(res->status == 200);
    ssr_server_stop(s);
    t.join();
    ssr_server_free(s);
  }

  TEST_CASE("stopping before serving does not hang") {
    ssr_server* s = nullptr;
    REQUIRE(ssr_server_create("127.0.0.1", 0, 1, &s) == SSR_OK);
    int port = 0;
    REQUIRE(ssr_server_bind(s, &port) == SSR_OK);
    ssr_server_stop(s);
    CHECK(ssr_server_serve(s) == SSR_OK);
    ssr_server_free(s);
  }
}
