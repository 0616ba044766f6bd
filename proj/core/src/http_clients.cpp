// HTTP-backed implementations of the LLM and embedding contracts. This is
// the only translation unit that includes cpp-httplib.

#include <chrono>
#include <cmath>

#include "casetl/alignment.hpp"
#include "casetl/llm_client.hpp"
#include "httplib.h"
#include "json.hpp"

namespace casetl {

using json = nlohmann::json;

namespace {

void SetTimeouts(httplib::Client& client, double seconds) {
  auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
}

LlmError TransportError(httplib::Error error) {
  auto cause = (error == httplib::Error::ConnectionTimeout || error == httplib::Error::Read)
                   ? LlmFailureCause::kTimeout
                   : LlmFailureCause::kTransport;
  return LlmError(cause, httplib::to_string(error));
}

std::string ReplyText(const json& body) {
  if (body.contains("choices") && body["choices"].is_array() && !body["choices"].empty()) {
    const json& choice = body["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      return choice["message"]["content"].get<std::string>();
    }
    if (choice.contains("text") && choice["text"].is_string()) {
      return choice["text"].get<std::string>();
    }
  }
  if (body.contains("message") && body["message"].contains("content") &&
      body["message"]["content"].is_string()) {
    return body["message"]["content"].get<std::string>();
  }
  if (body.contains("response") && body["response"].is_string()) {
    return body["response"].get<std::string>();
  }
  throw LlmError(LlmFailureCause::kBadResponse, "no completion text in response body");
}

}  // namespace

HttpLlmClient::HttpLlmClient(LlmRequestConfig config) : config_(std::move(config)) {
  Validate(config_);
  if (config_.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "LLM endpoint is not configured");
  }
  std::tie(base_url_, path_) = SplitUrl(config_.endpoint);
}

std::string HttpLlmClient::CompleteOnce(const std::string& prompt) {
  httplib::Client client(base_url_);
  SetTimeouts(client, config_.timeout_seconds);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  json request = {
      {"model", config_.model},
      {"temperature", config_.temperature},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  auto result = client.Post(path_, headers, request.dump(), "application/json");
  if (!result) throw TransportError(result.error());
  if (result->status == 429) {
    throw LlmError(LlmFailureCause::kRateLimited, "HTTP 429", 429);
  }
  if (result->status < 200 || result->status >= 300) {
    throw LlmError(LlmFailureCause::kHttpStatus, "HTTP " + std::to_string(result->status),
                   result->status);
  }
  json body = json::parse(result->body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded()) {
    throw LlmError(LlmFailureCause::kBadResponse, "response is not JSON");
  }
  return ReplyText(body);
}

std::string HttpLlmClient::Complete(const LlmRequest& request) {
  BackoffPolicy policy{config_.max_retries,
                       std::chrono::duration<double>(config_.initial_backoff_seconds),
                       std::chrono::duration<double>(config_.max_backoff_seconds)};
  return RetryWithBackoff([&] { return CompleteOnce(request.prompt); }, policy);
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string base_url, double timeout_seconds,
                                             std::size_t max_batch)
    : timeout_seconds_(timeout_seconds), max_batch_(std::max<std::size_t>(1, max_batch)) {
  while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();
  auto [origin, path] = SplitUrl(base_url);
  base_url_ = origin;
  path_prefix_ = path == "/" ? "" : path;
}

void HttpEmbeddingProvider::CheckHealth() {
  httplib::Client client(base_url_);
  SetTimeouts(client, timeout_seconds_);
  auto result = client.Get(path_prefix_ + "/health");
  if (!result) {
    throw Error(ErrorCode::kIo, "embedding service unreachable at " + base_url_ + ": " +
                                    httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw Error(ErrorCode::kIo,
                "embedding service not ready (HTTP " + std::to_string(result->status) + ")");
  }
}

std::vector<std::vector<double>> HttpEmbeddingProvider::Embed(
    std::span<const std::string> texts) {
  std::vector<std::vector<double>> vectors;
  vectors.reserve(texts.size());
  httplib::Client client(base_url_);
  SetTimeouts(client, timeout_seconds_);
  for (std::size_t start = 0; start < texts.size(); start += max_batch_) {
    auto batch = texts.subspan(start, std::min(max_batch_, texts.size() - start));
    json request = {{"texts", json::array()}};
    for (const auto& t : batch) request["texts"].push_back(t);
    auto result = client.Post(path_prefix_ + "/embed", request.dump(), "application/json");
    if (!result) {
      throw Error(ErrorCode::kIo, "embedding request failed: " +
                                      httplib::to_string(result.error()));
    }
    if (result->status != 200) {
      throw Error(ErrorCode::kIo, "embedding request returned HTTP " +
                                      std::to_string(result->status));
    }
    json body = json::parse(result->body, nullptr, false);
    if (body.is_discarded() || !body.contains("vectors") || !body["vectors"].is_array() ||
        body["vectors"].size() != batch.size()) {
      throw Error(ErrorCode::kIo, "embedding response does not match the request batch");
    }
    for (const auto& v : body["vectors"]) {
      try {
        vectors.push_back(v.get<std::vector<double>>());
      } catch (const json::exception&) {
        throw Error(ErrorCode::kIo, "embedding vector is not a list of numbers");
      }
    }
  }
  return vectors;
}

}  // namespace casetl
