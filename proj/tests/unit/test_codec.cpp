// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include <doctest.h>

#include "ssr/codec.hpp"
#include "ssr/error.hpp"
#include "ssr/synth.hpp"
#include "ssr/trace.hpp"
#include "support.hpp"

using namespace ssr;
using ssr::test::read_fixture;

TEST_SUITE("codec") {
  TEST_CASE("canonical JSON sorts keys and drops whitespace") {
    Json j = Json::parse(R"({ "b": 1, "a": [true, null, 0.1] })");
    CHECK(canonical(j) == R"({"a":[true,null,0.1],"b":1})");
  }

  TEST_CASE("canonical JSON replaces invalid UTF-8") {
    Json j = std::string("ok\xff");
    CHECK(canonical(j) == "\"ok\xef\xbf\xbd\"");
  }

  TEST_CASE("parse errors map to malformed_document") {
    try {
      parse_json("{", "body");
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::malformed_document);
      CHECK(std::string(e.what()).find("body") != std::string::npos);
    }
  }

  TEST_CASE("instance round-trip") {
    auto inst = test::case_instance();
    auto j = to_json(inst);
    auto back = instance_from_json(j);
    CHECK(back.id == inst.id);
    CHECK(back.task == inst.task);
    CHECK(back.context == inst.context);
    CHECK(back.texts == inst.texts);
    CHECK(canonical(to_json(back)) == canonical(j));
  }

  TEST_CASE("instances are validated on decode") {
    auto j = to_json(test::case_instance());
    j["texts"].erase("9");
    CHECK_THROWS_AS(instance_from_json(j), Error);
    auto k = to_json(test::case_instance());
    k["context"]["central"] = Json::array({13});
    CHECK_THROWS_AS(instance_from_json(k), Error);
  }

  TEST_CASE("trace round-trip keeps absent fields as null") {
    auto report = parse_trace(read_fixture("case_full_ssr.txt"), 5);
    auto j = to_json(report.trace);
    CHECK(trace_from_json(j) == report.trace);
    auto empty = to_json(SsrTrace{});
    CHECK(empty["answer"].is_null());
    CHECK(empty["chosen_index"].is_null());
    CHECK(trace_from_json(empty) == SsrTrace{});
  }

  TEST_CASE("reward breakdown round-trip") {
    RewardBreakdown b;
    b.status_real = b.status_consist = b.status_ans = true;
    b.r1 = 1.0;
    b.rho = 2;
    b.r_s = 0.5;
    b.r2 = 1.05;
    b.stage = Stage::stage2_denoising;
    CHECK(breakdown_from_json(to_json(b)) == b);
    auto j = to_json(b);
    j["stage"] = "stage9";
    CHECK_THROWS_AS(breakdown_from_json(j), Error);
  }

  TEST_CASE("synth record round-trip") {
    auto inst = test::case_instance();
    SynthRecord r;
    r.id = inst.id;
    r.task = inst.task;
    r.prompt = "p";
    r.completion = read_fixture("case_authenticity_only.txt");
    auto report = parse_trace(r.completion, 5);
    r.trace = report.trace;
    r.defects = report.defects;
    r.verdicts.authenticity = true;
    r.verdicts.diversity = true;
    r.verdicts.consistency = true;
    r.verdicts.answer = false;
    r.mean_distance = 0.5;
    r.energy = -4.0;
    r.rejection_reason = RejectionReason::answer_check;
    auto j = to_json(r);
    CHECK(j["schema"] == "ssr.synth_record/v1");
    auto back = synth_record_from_json(j);
    CHECK(canonical(to_json(back)) == canonical(j));
    CHECK(back.verdicts == r.verdicts);
    CHECK(back.rejection_reason == RejectionReason::answer_check);
  }

  TEST_CASE("texts use decimal string keys") {
    NodeTexts t{{NodeId{3}, "c"}, {NodeId{10}, "j"}};
    auto j = texts_to_json(t);
    CHECK(j.contains("3"));
    CHECK(j.contains("10"));
    CHECK(texts_from_json(j) == t);
    CHECK_THROWS_AS(texts_from_json(Json{{"x", "y"}}), Error);
  }
}
