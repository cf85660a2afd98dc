#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttrl/corpus.hpp"
#include "ttrl/policy.hpp"

namespace ttrl {

inline constexpr const char* kBaseUrlEnv = "TTRL_BASE_URL";
inline constexpr const char* kApiKeyEnv = "TTRL_API_KEY";

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{250};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};

  /// Delay before retry number `retry` (0-based).
  std::chrono::milliseconds backoff(int retry) const;
};

/// A chat-completions-compatible HTTP endpoint. `base_url` includes any path
/// prefix, e.g. "http://localhost:8000/v1".
struct RemoteEndpoint {
  std::string base_url;
  std::string model;
  std::string api_key;
  std::string chat_path = "/chat/completions";
  std::string judge_path = "/judge";
  std::chrono::seconds timeout{60};
  RetryPolicy retry;
};

/// Overrides base_url / api_key from TTRL_BASE_URL / TTRL_API_KEY when set.
RemoteEndpoint apply_environment(RemoteEndpoint endpoint);

struct SamplingParams {
  double temperature = 0.6;
  double top_p = 0.95;
  int max_tokens = 6144;
};

nlohmann::json chat_request_body(const RemoteEndpoint& endpoint, const PromptRecord& prompt,
                                 std::size_t n, const SamplingParams& params);

/// Message contents of `choices[*].message.content`, in response order.
std::vector<std::string> decode_chat_choices(std::string_view body);

/// POSTs a JSON body to base_url + path with bounded exponential-backoff
/// retries on transport failures, 429 and 5xx. Returns the response body.
std::string post_json(const RemoteEndpoint& endpoint, std::string_view path,
                      const nlohmann::json& body);

std::vector<ResponseSample> remote_sample(const RemoteEndpoint& endpoint,
                                          const PromptRecord& prompt, std::size_t k,
                                          const SamplingParams& params);

}  // namespace ttrl
