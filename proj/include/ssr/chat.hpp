// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ssr/graph.hpp"

namespace ssr {

struct ChatRequest {
  std::string prompt;
  double temperature = 0.6;
  std::size_t trial = 0;  // distinguishes independent samples of one prompt
};

/// Text-completion backend. Implementations must be safe to call from
/// several threads at once.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Throws Error(transport) when no completion could be obtained.
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// Deterministic client: prompt digest -> list of completions, indexed by
/// trial modulo the list length. Unknown prompts raise Error(transport).
class ScriptedChatClient final : public ChatClient {
 public:
  void add(std::string_view prompt, std::vector<std::string> completions);
  void add_digest(std::string digest, std::vector<std::string> completions);
  std::size_t size() const;
  std::string complete(const ChatRequest& request) override;

  /// Loads JSONL lines of {"prompt_digest": "...", "completions": [...]}
  /// (or "prompt" in place of the digest).
  static std::unique_ptr<ScriptedChatClient> from_jsonl(std::string_view text);

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::vector<std::string>> script_;
};

/// OpenAI-style chat completion transport:
///   POST <base><path>  {"model", "messages":[{"role":"user","content":prompt}],
///                       "temperature", "n":1}
///   200 -> choices[0].message.content
/// Bearer auth when api_key is non-empty.
struct HttpChatConfig {
  std::string endpoint;  // "http://host:port" or "https://host[:port]", optional path prefix
  std::string path = "/v1/chat/completions";
  std::string api_key;
  std::string model = "teacher";
  std::chrono::milliseconds timeout{60'000};
  int max_attempts = 3;
  std::chrono::milliseconds backoff{500};  // doubled after each failed attempt
};

class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(HttpChatConfig cfg);
  std::string complete(const ChatRequest& request) override;

 private:
  HttpChatConfig cfg_;
  std::string base_;
  std::string prefix_;
};

/// Everything a policy may look at when answering one task.
struct PolicyInput {
  const std::string& prompt;
  const TaskInstance& task;
  const Subgraph& context;
  const NodeTexts& texts;
  std::string task_id;
  std::size_t trial = 0;
  double temperature = 0.6;
};

/// Something that turns a task prompt into a completion: a chat model or a
/// scripted stand-in that sees the structured task directly.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string respond(const PolicyInput& input) = 0;
};

class ChatPolicy final : public Policy {
 public:
  explicit ChatPolicy(ChatClient& client) : client_(client) {}
  std::string respond(const PolicyInput& input) override;

 private:
  ChatClient& client_;
};

/// Runs fn(i) for i in [0, n) with at most `concurrency` calls in flight and
/// returns the results in index order. Exceptions from fn propagate after
/// all workers stop.
template <typename T>
std::vector<T> ordered_parallel_map(std::size_t n, std::size_t concurrency,
                                    const std::function<T(std::size_t)>& fn);

}  // namespace ssr

#include "ssr/detail/parallel.hpp"
