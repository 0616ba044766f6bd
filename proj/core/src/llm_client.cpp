#include "casetl/llm_client.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include "text_util.hpp"

namespace casetl {

double DefaultTemperature(std::string_view model) {
  if (detail::ToLower(model).find("deepseek") != std::string::npos) return 0.6;
  return 0.7;
}

void Validate(const LlmRequestConfig& config) {
  if (!(config.temperature >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  }
  if (config.max_retries < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_retries must be >= 0");
  }
  if (!(config.timeout_seconds > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "timeout_seconds must be > 0");
  }
}

std::string_view ToString(LlmFailureCause cause) {
  switch (cause) {
    case LlmFailureCause::kTimeout: return "timeout";
    case LlmFailureCause::kTransport: return "transport";
    case LlmFailureCause::kHttpStatus: return "http_status";
    case LlmFailureCause::kRateLimited: return "rate_limited";
    case LlmFailureCause::kBadResponse: return "bad_response";
    case LlmFailureCause::kNoReply: return "no_reply";
  }
  return "unknown";
}

std::string RetryWithBackoff(
    const std::function<std::string()>& attempt, const BackoffPolicy& policy,
    const std::function<void(std::chrono::duration<double>)>& sleep) {
  auto delay = policy.initial_delay;
  for (int tries = 1;; ++tries) {
    try {
      return attempt();
    } catch (const LlmError& e) {
      if (!e.retriable() || tries > policy.max_retries) {
        throw LlmError(e.cause(), e.reason(), e.http_status(), tries);
      }
    }
    if (sleep) {
      sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
    delay = std::min(delay * 2, policy.max_delay);
  }
}

ReplayLlmClient::ReplayLlmClient(std::filesystem::path root) : root_(std::move(root)) {}

std::string ReplayLlmClient::Complete(const LlmRequest& request) {
  std::filesystem::path path = root_ / request.task / (request.case_id + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw LlmError(LlmFailureCause::kNoReply, "no stored reply at " + path.string());
  }
  std::ostringstream reply;
  reply << in.rdbuf();
  return reply.str();
}

std::pair<std::string, std::string> SplitUrl(std::string_view url) {
  std::size_t scheme = url.find("://");
  std::size_t host_start = scheme == std::string_view::npos ? 0 : scheme + 3;
  std::size_t slash = url.find('/', host_start);
  if (slash == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, slash)), std::string(url.substr(slash))};
}

}  // namespace casetl
