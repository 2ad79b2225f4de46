// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include "ssr/service.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>

#include "ssr/codec.hpp"
#include "ssr/error.hpp"

#ifndef SSR_VERSION
#define SSR_VERSION "0.0.0-dev"
#endif

namespace ssr {

const char* version_string() { return SSR_VERSION; }

namespace {

constexpr std::size_t kMaxExpectedK = 64;

void check_schema(const Json& body, std::string_view expected) {
  auto it = body.find("schema");
  if (it == body.end()) return;  // optional on requests
  if (!it->is_string() || it->get<std::string>() != expected) {
    throw Error(ErrorKind::validation, "unsupported schema; expected \"" + std::string(expected) + "\"");
  }
}

std::size_t expected_k_from(const Json& body, std::size_t fallback) {
  auto it = body.find("expected_k");
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_number_unsigned() || it->get<std::size_t>() < 1 || it->get<std::size_t>() > kMaxExpectedK) {
    throw Error(ErrorKind::validation, "expected_k must be an integer in [1, 64]");
  }
  return it->get<std::size_t>();
}

// Instance fields may sit at the top level of a request or under "instance".
Instance request_instance(const Json& body) {
  if (auto it = body.find("instance"); it != body.end()) return instance_from_json(*it);
  return instance_from_json(body);
}

Json error_body(std::string_view kind, std::string_view message) {
  return {{"error", {{"kind", kind}, {"message", message}}}};
}

template <typename Fn>
HttpReply guarded(Fn&& fn) {
  try {
    return {200, fn()};
  } catch (const Error& e) {
    const int status = e.kind() == ErrorKind::missing_gold ? 422 : 400;
    return {status, canonical(error_body(to_string(e.kind()), e.what()))};
  } catch (const Json::exception& e) {
    return {400, canonical(error_body("malformed_document", e.what()))};
  }
}

}  // namespace

ScoreRequest parse_score_request(std::string_view text) {
  Json body = parse_json(text, "score request");
  if (!body.is_object()) throw Error(ErrorKind::malformed_document, "score request must be an object");
  check_schema(body, kScoreRequestSchema);
  ScoreRequest req;
  req.instance = request_instance(body);
  auto completions = body.find("completions");
  if (completions == body.end() || !completions->is_array()) {
    throw Error(ErrorKind::malformed_document, "score request needs a \"completions\" array");
  }
  for (const auto& c : *completions) {
    if (!c.is_string()) throw Error(ErrorKind::malformed_document, "completions must be strings");
    req.completions.push_back(c.get<std::string>());
  }
  if (req.completions.empty()) throw Error(ErrorKind::validation, "completions must not be empty");
  if (auto it = body.find("stage"); it != body.end() && !it->is_null()) {
    auto stage = it->is_string() ? parse_stage(it->get<std::string>()) : std::nullopt;
    if (!stage) throw Error(ErrorKind::validation, "unknown stage");
    req.reward.stage = *stage;
  }
  // Overrides may be given at top level or grouped under "overrides".
  const Json* overrides = &body;
  if (auto it = body.find("overrides"); it != body.end() && it->is_object()) overrides = &*it;
  for (const Json* src : std::initializer_list<const Json*>{&body, overrides}) {
    if (auto it = src->find("lambda"); it != src->end() && !it->is_null()) {
      if (!it->is_number()) throw Error(ErrorKind::validation, "lambda must be a number");
      req.reward.lambda = it->get<double>();
    }
    if (auto it = src->find("size_metric"); it != src->end() && !it->is_null()) {
      auto metric = it->is_string() ? parse_size_metric(it->get<std::string>()) : std::nullopt;
      if (!metric) throw Error(ErrorKind::validation, "unknown size_metric");
      req.reward.size_metric = *metric;
    }
    req.expected_k = expected_k_from(*src, req.expected_k);
  }
  try {
    validate(req.reward);
  } catch (const Error& e) {
    throw Error(ErrorKind::validation, e.what());
  }
  return req;
}

VerifyRequest parse_verify_request(std::string_view text) {
  Json body = parse_json(text, "verify request");
  if (!body.is_object()) throw Error(ErrorKind::malformed_document, "verify request must be an object");
  check_schema(body, kVerifyRequestSchema);
  VerifyRequest req;
  req.instance = request_instance(body);
  auto c = body.find("completion");
  if (c == body.end() || !c->is_string()) {
    throw Error(ErrorKind::malformed_document, "verify request needs a \"completion\" string");
  }
  req.completion = c->get<std::string>();
  req.expected_k = expected_k_from(body, req.expected_k);
  return req;
}

ScoreResponse score(const ScoreRequest& request) {
  if (request.completions.empty()) throw Error(ErrorKind::invalid_argument, "completions must not be empty");
  const Instance& inst = request.instance;
  if (!inst.task.gold_label) throw Error(ErrorKind::missing_gold, "task has no gold label");
  ScoreResponse out;
  out.stage = request.reward.stage;
  std::vector<double> rewards;
  for (const auto& completion : request.completions) {
    ParseReport report = parse_trace(completion, request.expected_k);
    VerifyOutcome v = verify(inst.context, inst.texts, report.trace, inst.task, {request.expected_k, nullptr});
    RewardBreakdown b = reward_r2(v, report.trace.candidates, report.trace.chosen_index, request.reward);
    DefectSummary summary;
    summary.count = report.defects.size();
    for (const auto& d : report.defects) {
      std::string kind = to_string(d.kind);
      if (std::find(summary.kinds.begin(), summary.kinds.end(), kind) == summary.kinds.end()) {
        summary.kinds.push_back(std::move(kind));
      }
    }
    rewards.push_back(b.stage == Stage::stage2_denoising ? b.r2 : b.r1);
    out.breakdowns.push_back(b);
    out.defects.push_back(std::move(summary));
  }
  out.advantages = group_advantages(rewards);
  return out;
}

VerifyResponse verify_completion(const VerifyRequest& request) {
  VerifyResponse out;
  out.report = parse_trace(request.completion, request.expected_k);
  JaccardDistance jaccard;
  out.outcome = verify(request.instance.context, request.instance.texts, out.report.trace, request.instance.task,
                       {request.expected_k, &jaccard});
  return out;
}

HttpReply handle_score(std::string_view body) {
  return guarded([&] { return canonical(to_json(score(parse_score_request(body)))); });
}

HttpReply handle_verify(std::string_view body) {
  return guarded([&] { return canonical(to_json(verify_completion(parse_verify_request(body)))); });
}

struct ScoreServer::Impl {
  ServerOptions opts;
  httplib::Server server;
  int port = -1;
  std::atomic<std::size_t> served{0};
  std::atomic<bool> stop_requested{false};
  std::atomic<bool> serving{false};
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

ScoreServer::ScoreServer(ServerOptions opts) : impl_(std::make_unique<Impl>()) {
  impl_->opts = std::move(opts);
  auto& srv = impl_->server;
  Impl* impl = impl_.get();
  const std::size_t threads = std::max<std::size_t>(impl_->opts.threads, 1);
  srv.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  // httplib defaults to SO_REUSEPORT, which would let a second server share
  // the port silently. Only allow fast rebinding after a restart.
  srv.set_tcp_nodelay(true);  // small JSON replies otherwise wait on delayed ACKs
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  auto timed = [impl](HttpReply (*handler)(std::string_view)) {
    return [impl, handler](const httplib::Request& req, httplib::Response& res) {
      const auto t0 = std::chrono::steady_clock::now();
      HttpReply reply = handler(req.body);
      const auto us =
          std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0).count();
      res.status = reply.status;
      // Timing lives in a header so response bodies stay deterministic.
      res.set_header("X-Ssr-Timing-Us", std::to_string(us));
      res.set_content(std::move(reply.body), "application/json");
      ++impl->served;
    };
  };
  srv.Post("/v1/score", timed(&handle_score));
  srv.Post("/v1/verify", timed(&handle_verify));
  srv.Get("/v1/health", [impl](const httplib::Request&, httplib::Response& res) {
    const auto uptime = std::chrono::duration<double>(std::chrono::steady_clock::now() - impl->started).count();
    Json body = {{"status", "ok"}, {"version", version_string()}, {"uptime_s", uptime}};
    res.set_content(canonical(body), "application/json");
    ++impl->served;
  });
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string kind = res.status == 404 ? "not_found" : "http_error";
    res.set_content(canonical(error_body(kind, "HTTP " + std::to_string(res.status))), "application/json");
  });
}

ScoreServer::~ScoreServer() { stop(); }

int ScoreServer::bind() {
  auto& o = impl_->opts;
  const int port = o.port == 0 ? impl_->server.bind_to_any_port(o.host) : impl_->server.bind_to_port(o.host, o.port);
  const bool ok = o.port == 0 ? port > 0 : port;
  if (!ok) throw Error(ErrorKind::io, "cannot bind " + o.host + ":" + std::to_string(o.port));
  impl_->port = o.port == 0 ? port : o.port;
  return impl_->port;
}

void ScoreServer::serve() {
  if (impl_->port < 0) throw Error(ErrorKind::invalid_argument, "serve() called before bind()");
  impl_->serving = true;
  if (!impl_->stop_requested) impl_->server.listen_after_bind();
  impl_->serving = false;
}

void ScoreServer::stop() {
  if (!impl_) return;
  impl_->stop_requested = true;
  // A serve() that already passed its stop check is about to listen; wait
  // for it so the stop cannot be lost.
  while (impl_->serving && !impl_->server.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  if (impl_->server.is_running()) impl_->server.stop();
}

int ScoreServer::port() const { return impl_->port; }

std::size_t ScoreServer::requests_served() const { return impl_->served.load(); }

}  // namespace ssr
