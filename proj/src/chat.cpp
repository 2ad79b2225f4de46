// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include "ssr/chat.hpp"

#include <sstream>
#include <thread>

#include <httplib.h>

#include "ssr/codec.hpp"
#include "ssr/error.hpp"
#include "ssr/prompt.hpp"

namespace ssr {

void ScriptedChatClient::add(std::string_view prompt, std::vector<std::string> completions) {
  add_digest(content_digest(prompt), std::move(completions));
}

void ScriptedChatClient::add_digest(std::string digest, std::vector<std::string> completions) {
  if (completions.empty()) throw Error(ErrorKind::invalid_argument, "scripted entry needs a completion");
  std::lock_guard lock(mu_);
  script_[std::move(digest)] = std::move(completions);
}

std::size_t ScriptedChatClient::size() const {
  std::lock_guard lock(mu_);
  return script_.size();
}

std::string ScriptedChatClient::complete(const ChatRequest& request) {
  const std::string digest = content_digest(request.prompt);
  std::lock_guard lock(mu_);
  auto it = script_.find(digest);
  if (it == script_.end()) {
    throw Error(ErrorKind::transport, "scripted client has no completion for prompt " + digest);
  }
  return it->second[request.trial % it->second.size()];
}

std::unique_ptr<ScriptedChatClient> ScriptedChatClient::from_jsonl(std::string_view text) {
  auto client = std::make_unique<ScriptedChatClient>();
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "script line " + std::to_string(lineno);
    Json j = parse_json(line, where);
    std::string digest;
    if (auto it = j.find("prompt_digest"); it != j.end() && it->is_string()) {
      digest = it->get<std::string>();
    } else if (auto p = j.find("prompt"); p != j.end() && p->is_string()) {
      digest = content_digest(p->get<std::string>());
    } else {
      throw Error(ErrorKind::malformed_document, where + ": needs \"prompt_digest\" or \"prompt\"");
    }
    std::vector<std::string> completions;
    if (auto c = j.find("completions"); c != j.end() && c->is_array()) {
      for (const auto& v : *c) {
        if (!v.is_string()) throw Error(ErrorKind::malformed_document, where + ": completions must be strings");
        completions.push_back(v.get<std::string>());
      }
    } else if (auto c1 = j.find("completion"); c1 != j.end() && c1->is_string()) {
      completions.push_back(c1->get<std::string>());
    } else {
      throw Error(ErrorKind::malformed_document, where + ": needs \"completions\"");
    }
    client->add_digest(std::move(digest), std::move(completions));
  }
  return client;
}

HttpChatClient::HttpChatClient(HttpChatConfig cfg) : cfg_(std::move(cfg)) {
  const std::string& e = cfg_.endpoint;
  auto scheme_end = e.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::invalid_argument, "endpoint must start with http:// or https://: " + e);
  }
  const std::string scheme = e.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorKind::invalid_argument, "unsupported endpoint scheme: " + scheme);
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw Error(ErrorKind::invalid_argument, "this build has no TLS support: " + e);
#endif
  auto path_start = e.find('/', scheme_end + 3);
  base_ = e.substr(0, path_start);
  if (path_start != std::string::npos) {
    prefix_ = e.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }
  if (cfg_.max_attempts < 1) cfg_.max_attempts = 1;
}

std::string HttpChatClient::complete(const ChatRequest& request) {
  Json body = {{"model", cfg_.model},
               {"messages", Json::array({{{"role", "user"}, {"content", request.prompt}}})},
               {"temperature", request.temperature},
               {"n", 1}};
  const std::string payload = canonical(body);

  httplib::Client client(base_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  std::string last_error;
  auto delay = cfg_.backoff;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    auto res = client.Post(prefix_ + cfg_.path, headers, payload, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
    } else if (res->status == 200) {
      try {
        Json reply = Json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const Json::exception& e) {
        // A 200 with an unusable body will not improve on retry.
        throw Error(ErrorKind::transport, std::string("chat reply has no choices[0].message.content: ") + e.what());
      }
    } else {
      last_error = "HTTP " + std::to_string(res->status);
      // Client errors other than rate limiting are not transient.
      if (res->status >= 400 && res->status < 500 && res->status != 408 && res->status != 429) break;
    }
    if (attempt < cfg_.max_attempts) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }
  throw Error(ErrorKind::transport, "chat endpoint " + base_ + ": " + last_error);
}

std::string ChatPolicy::respond(const PolicyInput& input) {
  return client_.complete(ChatRequest{input.prompt, input.temperature, input.trial});
}

}  // namespace ssr
