// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The ssrkit Authors

#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "ssr/chat.hpp"
#include "ssr/codec.hpp"
#include "ssr/error.hpp"
#include "ssr/prompt.hpp"

using namespace ssr;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an ssr::Error");
  return ErrorKind::io;
}

// Local chat endpoint whose behavior is chosen per test.
struct FakeEndpoint {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> hits{0};

  explicit FakeEndpoint(std::function<void(const httplib::Request&, httplib::Response&, int)> handler) {
    server.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
      handler(req, res, ++hits);
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeEndpoint() {
    server.stop();
    thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

HttpChatConfig fast(const std::string& url) {
  HttpChatConfig cfg;
  cfg.endpoint = url;
  cfg.timeout = std::chrono::milliseconds(2000);
  cfg.backoff = std::chrono::milliseconds(1);
  return cfg;
}

std::string reply(const std::string& content) {
  return Json{{"choices", Json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump();
}

}  // namespace

TEST_SUITE("chat") {
  TEST_CASE("scripted client cycles completions by trial") {
    ScriptedChatClient c;
    c.add("p", {"a", "b"});
    CHECK(c.complete({"p", 0.6, 0}) == "a");
    CHECK(c.complete({"p", 0.6, 1}) == "b");
    CHECK(c.complete({"p", 0.6, 2}) == "a");
    CHECK(kind_of([&] { c.complete({"q", 0.6, 0}); }) == ErrorKind::transport);
    CHECK_THROWS_AS(c.add("r", {}), Error);
  }

  TEST_CASE("scripted client loads JSONL") {
    auto c = ScriptedChatClient::from_jsonl(
        "{\"prompt\":\"p\",\"completions\":[\"x\"]}\n\n"
        "{\"prompt_digest\":\"" + content_digest("q") + "\",\"completion\":\"y\"}\n");
    CHECK(c->size() == 2);
    CHECK(c->complete({"p"}) == "x");
    CHECK(c->complete({"q"}) == "y");
    CHECK(kind_of([] { ScriptedChatClient::from_jsonl("{\"completions\":[\"x\"]}"); }) ==
          ErrorKind::malformed_document);
    CHECK(kind_of([] { ScriptedChatClient::from_jsonl("not json"); }) == ErrorKind::malformed_document);
  }

  TEST_CASE("http client sends the chat request and reads the first choice") {
    std::string seen_auth, seen_body;
    FakeEndpoint ep([&](const httplib::Request& req, httplib::Response& res, int) {
      seen_auth = req.get_header_value("Authorization");
      seen_body = req.body;
      res.set_content(reply("hello"), "application/json");
    });
    auto cfg = fast(ep.url());
    cfg.api_key = "k123";
    HttpChatClient client(cfg);
    CHECK(client.complete({"the prompt", 0.25, 0}) == "hello");
    CHECK(seen_auth == "Bearer k123");
    auto body = Json::parse(seen_body);
    CHECK(body["messages"][0]["content"] == "the prompt");
    CHECK(body["temperature"] == 0.25);
    CHECK(body["model"] == "teacher");
  }

  TEST_CASE("http client retries server errors") {
    FakeEndpoint ep([](const httplib::Request&, httplib::Response& res, int hit) {
      if (hit < 3) {
        res.status = 503;
        return;
      }
      res.set_content(reply("third time"), "application/json");
    });
    HttpChatClient client(fast(ep.url()));
    CHECK(client.complete({"p"}) == "third time");
    CHECK(ep.hits == 3);
  }

  TEST_CASE("http client gives up on client errors and exhausted retries") {
    FakeEndpoint bad_request([](const httplib::Request&, httplib::Response& res, int) { res.status = 400; });
    HttpChatClient a(fast(bad_request.url()));
    CHECK(kind_of([&] { a.complete({"p"}); }) == ErrorKind::transport);
    CHECK(bad_request.hits == 1);

    FakeEndpoint down([](const httplib::Request&, httplib::Response& res, int) { res.status = 500; });
    HttpChatClient b(fast(down.url()));
    CHECK(kind_of([&] { b.complete({"p"}); }) == ErrorKind::transport);
    CHECK(down.hits == 3);

    FakeEndpoint junk([](const httplib::Request&, httplib::Response& res, int) {
      res.set_content("{}", "application/json");
    });
    HttpChatClient c(fast(junk.url()));
    CHECK(kind_of([&] { c.complete({"p"}); }) == ErrorKind::transport);
  }

  TEST_CASE("unreachable host is a transport error") {
    httplib::Server probe;
    int port = probe.bind_to_any_port("127.0.0.1");
    probe.stop();
    auto cfg = fast("http://127.0.0.1:" + std::to_string(port));
    cfg.max_attempts = 2;
    HttpChatClient client(cfg);
    CHECK(kind_of([&] { client.complete({"p"}); }) == ErrorKind::transport);
  }

  TEST_CASE("endpoint validation") {
    CHECK(kind_of([] { HttpChatClient c(fast("localhost:80")); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([] { HttpChatClient c(fast("ftp://x")); }) == ErrorKind::invalid_argument);
  }

  TEST_CASE("ordered parallel map keeps order and caps concurrency") {
    std::atomic<int> in_flight{0}, peak{0};
    auto out = ordered_parallel_map<std::size_t>(64, 4, [&](std::size_t i) {
      int now = ++in_flight;
      int p = peak.load();
      while (now > p && !peak.compare_exchange_weak(p, now)) {
      }
      std::this_thread::sleep_for(std::chrono::microseconds(200));
      --in_flight;
      return i * i;
    });
    REQUIRE(out.size() == 64);
    for (std::size_t i = 0; i < 64; ++i) CHECK(out[i] == i * i);
    CHECK(peak.load() <= 4);
  }

  TEST_CASE("ordered parallel map propagates exceptions") {
    CHECK_THROWS_AS(ordered_parallel_map<int>(10, 3,
                                              [](std::size_t i) -> int {
                                                if (i == 5) throw Error(ErrorKind::transport, "boom");
                                                return 0;
                                              }),
                    Error);
  }
}
