#include "ttrl/remote.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "ttrl/errors.hpp"

namespace ttrl {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing '/'
};

SplitUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos)
    throw RemoteError("base URL needs a scheme: " + url);
  const auto path = url.find('/', scheme + 3);
  SplitUrl out;
  out.origin = url.substr(0, path);
  out.prefix = path == std::string::npos ? std::string() : url.substr(path);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

bool transient_status(int status) { return status == 429 || status >= 500; }

}  // namespace

std::chrono::milliseconds RetryPolicy::backoff(int retry) const {
  const double ms = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, retry);
  return std::min(max_backoff, std::chrono::milliseconds(static_cast<long long>(ms)));
}

RemoteEndpoint apply_environment(RemoteEndpoint endpoint) {
  if (const char* url = std::getenv(kBaseUrlEnv); url && *url) endpoint.base_url = url;
  if (const char* key = std::getenv(kApiKeyEnv); key && *key) endpoint.api_key = key;
  return endpoint;
}

nlohmann::json chat_request_body(const RemoteEndpoint& endpoint, const PromptRecord& prompt,
                                 std::size_t n, const SamplingParams& params) {
  return nlohmann::json{
      {"model", endpoint.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt.text}}})},
      {"n", n},
      {"temperature", params.temperature},
      {"top_p", params.top_p},
      {"max_tokens", params.max_tokens},
  };
}

std::vector<std::string> decode_chat_choices(std::string_view body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw RemoteError(std::string("response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("choices"))
    throw RemoteError("response lacks field \"choices\"");
  const auto& choices = doc["choices"];
  if (!choices.is_array()) throw RemoteError("field \"choices\" is not an array");

  std::vector<std::string> texts;
  texts.reserve(choices.size());
  for (std::size_t i = 0; i < choices.size(); ++i) {
    const auto& c = choices[i];
    const auto where = "choices[" + std::to_string(i) + "]";
    if (!c.is_object() || !c.contains("message") || !c["message"].is_object())
      throw RemoteError("response lacks field \"" + where + ".message\"");
    const auto& content = c["message"].find("content");
    if (content == c["message"].end())
      throw RemoteError("response lacks field \"" + where + ".message.content\"");
    texts.push_back(content->is_string() ? content->get<std::string>() : std::string());
  }
  return texts;
}

std::string post_json(const RemoteEndpoint& endpoint, std::string_view path,
                      const nlohmann::json& body) {
  const auto url = split_url(endpoint.base_url);
  httplib::Client client(url.origin);
  const auto seconds = static_cast<time_t>(endpoint.timeout.count());
  client.set_connection_timeout(seconds, 0);
  client.set_read_timeout(seconds, 0);
  client.set_write_timeout(seconds, 0);

  httplib::Headers headers;
  if (!endpoint.api_key.empty())
    headers.emplace("Authorization", "Bearer " + endpoint.api_key);

  const std::string target = url.prefix + std::string(path);
  const std::string payload = body.dump();
  const int attempts = std::max(1, endpoint.retry.max_attempts);
  std::string last_error;

  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(endpoint.retry.backoff(attempt - 1));
    auto res = client.Post(target, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    last_error = "HTTP status " + std::to_string(res->status);
    if (!transient_status(res->status))
      throw RemoteError(url.origin + target + ": " + last_error);
  }
  throw RemoteError(url.origin + target + ": " + last_error + " after " +
                    std::to_string(attempts) + " attempts");
}

std::vector<ResponseSample> remote_sample(const RemoteEndpoint& endpoint,
                                          const PromptRecord& prompt, std::size_t k,
                                          const SamplingParams& params) {
  const auto body = post_json(endpoint, endpoint.chat_path,
                              chat_request_body(endpoint, prompt, k, params));
  std::vector<ResponseSample> out;
  for (auto& text : decode_chat_choices(body))
    out.push_back(ResponseSample{"remote", std::move(text), {}, std::nullopt});
  return out;
}

}  // namespace ttrl
