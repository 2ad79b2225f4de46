// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssr/reward.hpp"
#include "ssr/trace.hpp"

namespace ssr {

inline constexpr std::string_view kScoreRequestSchema = "ssr.score_request/v1";
inline constexpr std::string_view kScoreResponseSchema = "ssr.score_response/v1";
inline constexpr std::string_view kVerifyRequestSchema = "ssr.verify_request/v1";
inline constexpr std::string_view kVerifyResponseSchema = "ssr.verify_response/v1";

const char* version_string();

struct ScoreRequest {
  Instance instance;
  std::vector<std::string> completions;
  RewardConfig reward;
  std::size_t expected_k = 5;
};

struct DefectSummary {
  std::size_t count = 0;
  std::vector<std::string> kinds;  // distinct kinds in first-seen order
};

struct ScoreResponse {
  std::vector<RewardBreakdown> breakdowns;
  std::vector<DefectSummary> defects;
  std::vector<double> advantages;  // from r2 in stage 2, r1 in stage 1
  Stage stage = Stage::stage1_authenticity;
};

/// In-process scoring; the HTTP path calls exactly this.
/// Throws Error(missing_gold) when the task has no gold label and
/// Error(invalid_argument) for an empty completion list.
ScoreResponse score(const ScoreRequest& request);

struct VerifyRequest {
  Instance instance;
  std::string completion;
  std::size_t expected_k = 5;
};

struct VerifyResponse {
  VerifyOutcome outcome;
  ParseReport report;
};

/// Parses and verifies one completion; energy uses the jaccard provider.
VerifyResponse verify_completion(const VerifyRequest& request);

/// Body parsers. Throw Error(malformed_document) or Error(validation) on
/// schema violations.
ScoreRequest parse_score_request(std::string_view body);
VerifyRequest parse_verify_request(std::string_view body);

struct HttpReply {
  int status = 200;
  std::string body;  // canonical JSON
};

/// Full request handling without sockets: 200 with canonical JSON, 400 for
/// schema violations, 422 when the gold label is missing.
HttpReply handle_score(std::string_view body);
HttpReply handle_verify(std::string_view body);

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::size_t threads = 4;
};

/// HTTP/1.1 front end for /v1/score, /v1/verify and /v1/health. Stateless
/// apart from an atomic request counter.
class ScoreServer {
 public:
  explicit ScoreServer(ServerOptions opts);
  ~ScoreServer();
  ScoreServer(const ScoreServer&) = delete;
  ScoreServer& operator=(const ScoreServer&) = delete;

  /// Binds the socket; returns the bound port. Throws Error(io) on failure.
  int bind();
  /// Serves until stop(). bind() must have succeeded.
  void serve();
  void stop();
  int port() const;
  std::size_t requests_served() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ssr
