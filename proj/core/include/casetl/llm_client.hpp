#pragma once

// Backend contract for chat-completion style LLM calls, plus the HTTP and
// replay implementations.

#include <chrono>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "casetl/error.hpp"

namespace casetl {

struct LlmRequestConfig {
  std::string endpoint;  // full URL, e.g. http://localhost:8000/v1/chat/completions
  std::string model;
  double temperature = 0.7;
  int max_retries = 3;
  double timeout_seconds = 300.0;
  double initial_backoff_seconds = 1.0;
  double max_backoff_seconds = 60.0;
  std::string api_key;  // read from LLM_API_KEY, never from flags or files
};

// 0.6 for DeepSeek-family model names, 0.7 otherwise (Llama included).
double DefaultTemperature(std::string_view model);

// Throws Error{kInvalidArgument} when temperature < 0 or max_retries < 0.
void Validate(const LlmRequestConfig& config);

enum class LlmFailureCause {
  kTimeout,
  kTransport,
  kHttpStatus,
  kRateLimited,
  kBadResponse,
  kNoReply,  // replay backend has no stored reply
};

std::string_view ToString(LlmFailureCause cause);

class LlmError : public Error {
 public:
  LlmError(LlmFailureCause cause, const std::string& message, int http_status = 0,
           int attempts = 1)
      : Error(ErrorCode::kLlmFailure,
              std::string(ToString(cause)) + ": " + message),
        cause_(cause),
        reason_(message),
        http_status_(http_status),
        attempts_(attempts) {}

  LlmFailureCause cause() const noexcept { return cause_; }
  const std::string& reason() const noexcept { return reason_; }
  int http_status() const noexcept { return http_status_; }
  int attempts() const noexcept { return attempts_; }

  // Timeouts, transport errors, 429 and 5xx are worth another attempt.
  bool retriable() const noexcept {
    return cause_ == LlmFailureCause::kTimeout ||
           cause_ == LlmFailureCause::kTransport ||
           cause_ == LlmFailureCause::kRateLimited ||
           (cause_ == LlmFailureCause::kHttpStatus && http_status_ >= 500);
  }

 private:
  LlmFailureCause cause_;
  std::string reason_;
  int http_status_;
  int attempts_;
};

// `task` and `case_id` identify the call for replay backends and audit logs;
// HTTP backends only send `prompt`.
struct LlmRequest {
  std::string task;
  std::string case_id;
  std::string prompt;
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;

  /// Returns the raw completion text. Throws LlmError.
  virtual std::string Complete(const LlmRequest& request) = 0;
};

struct BackoffPolicy {
  int max_retries = 3;
  std::chrono::duration<double> initial_delay{1.0};
  std::chrono::duration<double> max_delay{60.0};
};

/// Calls `attempt` until it succeeds, throws a non-retriable LlmError, or
/// max_retries retries are spent. Delay doubles after every failure, capped
/// at max_delay. The final LlmError reports the number of attempts made.
std::string RetryWithBackoff(
    const std::function<std::string()>& attempt, const BackoffPolicy& policy,
    const std::function<void(std::chrono::duration<double>)>& sleep = {});

// Sends {model, temperature, messages:[{role:"user", content}]} and reads
// choices[0].message.content (OpenAI style), falling back to message.content
// and response (Ollama style).
class HttpLlmClient final : public LlmClient {
 public:
  explicit HttpLlmClient(LlmRequestConfig config);

  std::string Complete(const LlmRequest& request) override;

  const LlmRequestConfig& config() const noexcept { return config_; }

 private:
  std::string CompleteOnce(const std::string& prompt);

  LlmRequestConfig config_;
  std::string base_url_;
  std::string path_;
};

// Replays stored replies from `<root>/<task>/<case_id>.txt`. A missing file
// behaves like an unreachable backend (kNoReply), which is not retried.
class ReplayLlmClient final : public LlmClient {
 public:
  explicit ReplayLlmClient(std::filesystem::path root);

  std::string Complete(const LlmRequest& request) override;

 private:
  std::filesystem::path root_;
};

// Splits "http://host:port/path" into {"http://host:port", "/path"}.
std::pair<std::string, std::string> SplitUrl(std::string_view url);

}  // namespace casetl
