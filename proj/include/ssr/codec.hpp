// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

// JSON forms of the domain types. Absent optionals serialize as null so each
// object always carries the same keys.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ssr/eval.hpp"
#include "ssr/graph.hpp"
#include "ssr/reward.hpp"
#include "ssr/service.hpp"
#include "ssr/synth.hpp"
#include "ssr/trace.hpp"
#include "ssr/verify.hpp"

namespace ssr {

using Json = nlohmann::json;

/// Sorted keys, no whitespace, shortest round-trip reals, invalid UTF-8
/// replaced by U+FFFD.
std::string canonical(const Json& value);

/// Parses JSON text, mapping syntax errors to Error(malformed_document).
Json parse_json(std::string_view text, std::string_view what);

Json to_json(const Subgraph& g);
Subgraph subgraph_from_json(const Json& j);

Json to_json(const TaskInstance& task);
TaskInstance task_from_json(const Json& j);

Json texts_to_json(const NodeTexts& texts);
NodeTexts texts_from_json(const Json& j);

Json to_json(const Instance& inst);
Instance instance_from_json(const Json& j);

Json to_json(const SsrTrace& trace);
SsrTrace trace_from_json(const Json& j);
Json to_json(const Defect& d);
Json to_json(const ParseReport& report);

Json to_json(const VerifyOutcome& outcome);
Json to_json(const RewardBreakdown& b);
RewardBreakdown breakdown_from_json(const Json& j);

Json to_json(const SynthRecord& record);
SynthRecord synth_record_from_json(const Json& j);

Json to_json(const EvalReport& report);
Json to_json(const EvalRow& row);

Json to_json(const ScoreResponse& response);
Json to_json(const VerifyResponse& response);

}  // namespace ssr
