// Exercises the HTTP clients against in-process servers that implement the
// chat-completion and /embed + /health wire contracts.

#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <string>
#include <thread>

#include "casetl/alignment.hpp"
#include "casetl/llm_client.hpp"
#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "support/ports.hpp"

using namespace casetl;
using json = nlohmann::json;

namespace {

class LocalServer {
 public:
  LocalServer() : server_(std::make_unique<httplib::Server>()) {}
  ~LocalServer() { Stop(); }

  httplib::Server& server() { return *server_; }

  void Start() {
    port_ = server_->bind_to_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }

  void Stop() {
    if (thread_.joinable()) {
      server_->stop();
      thread_.join();
    }
  }

  std::string url(const std::string& path = "") const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
};

LlmRequestConfig FastConfig(const std::string& endpoint) {
  LlmRequestConfig c;
  c.endpoint = endpoint;
  c.model = "llama-3.3-70b-instruct";
  c.temperature = 0.7;
  c.max_retries = 3;
  c.timeout_seconds = 2.0;
  c.initial_backoff_seconds = 0.01;
  c.max_backoff_seconds = 0.02;
  return c;
}

std::string ChatReply(const std::string& text) {
  return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}})}}
      .dump();
}

}  // namespace

TEST_SUITE("http_llm_client") {
  TEST_CASE("healthy backend passes the reply through") {
    LocalServer s;
    json seen;
    std::string auth;
    s.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
      seen = json::parse(req.body);
      auth = req.get_header_value("Authorization");
      res.set_content(ChatReply("fever | -72"), "application/json");
    });
    s.Start();
    LlmRequestConfig config = FastConfig(s.url("/v1/chat/completions"));
    config.api_key = "secret-token";
    HttpLlmClient client(config);
    CHECK(client.Complete({"timeline", "PMC1", "the prompt"}) == "fever | -72");
    CHECK(seen["model"] == "llama-3.3-70b-instruct");
    CHECK(seen["temperature"] == 0.7);
    REQUIRE(seen["messages"].size() == 1);
    CHECK(seen["messages"][0]["role"] == "user");
    CHECK(seen["messages"][0]["content"] == "the prompt");
    CHECK(auth == "Bearer secret-token");
  }

  TEST_CASE("429 twice then 200 succeeds after two retries") {
    LocalServer s;
    std::atomic<int> calls{0};
    s.server().Post("/chat", [&](const httplib::Request&, httplib::Response& res) {
      if (++calls <= 2) {
        res.status = 429;
        res.set_content("{\"error\":\"rate limited\"}", "application/json");
        return;
      }
      res.set_content(ChatReply("1"), "application/json");
    });
    s.Start();
    HttpLlmClient client(FastConfig(s.url("/chat")));
    CHECK(client.Complete({"case_count", "PMC1", "p"}) == "1");
    CHECK(calls == 3);
  }

  TEST_CASE("rate limiting that never clears is reported after max_retries") {
    LocalServer s;
    std::atomic<int> calls{0};
    s.server().Post("/chat", [&](const httplib::Request&, httplib::Response& res) {
      ++calls;
      res.status = 429;
    });
    s.Start();
    HttpLlmClient client(FastConfig(s.url("/chat")));
    try {
      client.Complete({"case_count", "PMC1", "p"});
      FAIL("expected LlmError");
    } catch (const LlmError& e) {
      CHECK(e.cause() == LlmFailureCause::kRateLimited);
      CHECK(e.attempts() == 4);
    }
    CHECK(calls == 4);
  }

  TEST_CASE("backend down is a transport failure after max_retries") {
    HttpLlmClient client(FastConfig("http://127.0.0.1:" + std::to_string(test::ClosedPort()) + "/chat"));
    try {
      client.Complete({"timeline", "PMC1", "p"});
      FAIL("expected LlmError");
    } catch (const LlmError& e) {
      CHECK(e.cause() == LlmFailureCause::kTransport);
      CHECK(e.attempts() == 4);
      CHECK(e.code() == ErrorCode::kLlmFailure);
    }
  }

  TEST_CASE("server errors retry, client errors do not") {
    LocalServer s;
    std::atomic<int> calls{0};
    s.server().Post("/500", [&](const httplib::Request&, httplib::Response& res) {
      res.status = ++calls == 1 ? 503 : 200;
      if (res.status == 200) res.set_content(ChatReply("ok"), "application/json");
    });
    std::atomic<int> bad_calls{0};
    s.server().Post("/400", [&](const httplib::Request&, httplib::Response& res) {
      ++bad_calls;
      res.status = 400;
    });
    s.Start();
    CHECK(HttpLlmClient(FastConfig(s.url("/500"))).Complete({"t", "c", "p"}) == "ok");
    try {
      HttpLlmClient(FastConfig(s.url("/400"))).Complete({"t", "c", "p"});
      FAIL("expected LlmError");
    } catch (const LlmError& e) {
      CHECK(e.cause() == LlmFailureCause::kHttpStatus);
      CHECK(e.http_status() == 400);
    }
    CHECK(bad_calls == 1);
  }

  TEST_CASE("slow backend times out") {
    LocalServer s;
    s.server().Post("/slow", [&](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(600));
      res.set_content(ChatReply("late"), "application/json");
    });
    s.Start();
    LlmRequestConfig config = FastConfig(s.url("/slow"));
    config.timeout_seconds = 0.1;
    config.max_retries = 0;
    try {
      HttpLlmClient(config).Complete({"t", "c", "p"});
      FAIL("expected LlmError");
    } catch (const LlmError& e) {
      CHECK(e.cause() == LlmFailureCause::kTimeout);
    }
  }

  TEST_CASE("alternative response shapes and malformed bodies") {
    LocalServer s;
    s.server().Post("/ollama", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"message":{"role":"assistant","content":"2"}})", "application/json");
    });
    s.server().Post("/generate", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"response":"3"})", "application/json");
    });
    s.server().Post("/legacy", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"choices":[{"text":"4"}]})", "application/json");
    });
    s.server().Post("/html", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("<html>oops</html>", "text/html");
    });
    s.Start();
    CHECK(HttpLlmClient(FastConfig(s.url("/ollama"))).Complete({"t", "c", "p"}) == "2");
    CHECK(HttpLlmClient(FastConfig(s.url("/generate"))).Complete({"t", "c", "p"}) == "3");
    CHECK(HttpLlmClient(FastConfig(s.url("/legacy"))).Complete({"t", "c", "p"}) == "4");
    try {
      HttpLlmClient(FastConfig(s.url("/html"))).Complete({"t", "c", "p"});
      FAIL("expected LlmError");
    } catch (const LlmError& e) {
      CHECK(e.cause() == LlmFailureCause::kBadResponse);
      CHECK_FALSE(e.retriable());
    }
  }

  TEST_CASE("missing endpoint is rejected at construction") {
    CHECK_THROWS_AS(HttpLlmClient(LlmRequestConfig{}), Error);
  }
}

TEST_SUITE("http_embedding_provider") {
  // Deterministic unit vectors: a 3-d direction derived from the text bytes.
  std::vector<double> FakeVector(const std::string& text) {
    double a = 1.0, b = 0.0, c = 0.0;
    for (unsigned char ch : text) {
      b += ch % 7;
      c += ch % 5;
    }
    double n = std::sqrt(a * a + b * b + c * c);
    return {a / n, b / n, c / n};
  }

  void InstallEmbed(httplib::Server& server, std::atomic<int>& calls, std::vector<std::size_t>* sizes) {
    server.Post("/embed", [&calls, sizes](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      json body = json::parse(req.body);
      json vectors = json::array();
      for (const auto& t : body.at("texts")) vectors.push_back(FakeVector(t.get<std::string>()));
      if (sizes) sizes->push_back(body.at("texts").size());
      res.set_content(json{{"vectors", vectors}}.dump(), "application/json");
    });
  }

  TEST_CASE("embed returns vectors in request order, split into batches") {
    LocalServer s;
    std::atomic<int> calls{0};
    std::vector<std::size_t> sizes;
    InstallEmbed(s.server(), calls, &sizes);
    s.Start();
    HttpEmbeddingProvider provider(s.url(), 5.0, /*max_batch=*/2);
    std::vector<std::string> texts = {"fever", "rash", "acne", "fever", "DRESS syndrome"};
    auto vectors = provider.Embed(texts);
    REQUIRE(vectors.size() == texts.size());
    for (std::size_t i = 0; i < texts.size(); ++i) CHECK(vectors[i] == FakeVector(texts[i]));
    CHECK(sizes == std::vector<std::size_t>{2, 2, 1});
  }

  TEST_CASE("health contract") {
    LocalServer s;
    std::atomic<bool> ready{false};
    s.server().Get("/health", [&](const httplib::Request&, httplib::Response& res) {
      res.status = ready ? 200 : 503;
      res.set_content(R"({"model":"fake","dim":3})", "application/json");
    });
    s.Start();
    HttpEmbeddingProvider provider(s.url("/"), 5.0);
    CHECK_THROWS_AS(provider.CheckHealth(), Error);
    ready = true;
    CHECK_NOTHROW(provider.CheckHealth());

    HttpEmbeddingProvider down("http://127.0.0.1:" + std::to_string(test::ClosedPort()), 1.0);
    try {
      down.CheckHealth();
      FAIL("expected Error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kIo);
    }
  }

  TEST_CASE("base url with a path prefix") {
    LocalServer s;
    std::atomic<int> calls{0};
    s.server().Post("/svc/embed", [&](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      json body = json::parse(req.body);
      res.set_content(json{{"vectors", json::array({FakeVector(body["texts"][0])})}}.dump(),
                      "application/json");
    });
    s.Start();
    HttpEmbeddingProvider provider(s.url("/svc/"), 5.0);
    std::vector<std::string> texts = {"fever"};
    CHECK(provider.Embed(texts).size() == 1);
    CHECK(calls == 1);
  }

  TEST_CASE("mismatched responses are errors") {
    LocalServer s;
    s.server().Post("/embed", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"vectors":[[1,0]]})", "application/json");
    });
    s.Start();
    HttpEmbeddingProvider provider(s.url(), 5.0);
    std::vector<std::string> texts = {"a", "b"};
    CHECK_THROWS_AS(provider.Embed(texts), Error);
  }

  TEST_CASE("embedding metric over the wire: batched, cached, identity at zero") {
    LocalServer s;
    std::atomic<int> calls{0};
    std::vector<std::size_t> sizes;
    InstallEmbed(s.server(), calls, &sizes);
    s.Start();
    auto provider = std::make_shared<HttpEmbeddingProvider>(s.url(), 5.0);
    EmbeddingDistanceMetric metric(provider);
    TimelineAnnotation ref{"c", {{"fever", -72}, {"rash", -72}, {"acne", -672}}};
    TimelineAnnotation pred{"c", {{"fever", -70}, {"acne", -600}, {"pruritis", 0}}};
    auto pairs = BestMatch(ref, pred, metric);
    CHECK(calls == 1);
    CHECK(sizes == std::vector<std::size_t>{4});
    CHECK(metric.cache_size() == 4);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0].distance == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(metric.Distance("fever", "fever") < 1e-9);
    CHECK(metric.Distance("fever", "rash") == doctest::Approx(metric.Distance("rash", "fever")));
    CHECK(calls == 1);
  }
}
