#include <cstdlib>

#include <httplib.h>

#include "persuade/json_util.hpp"
#include "persuade/llm_client.hpp"

namespace persuade {

namespace {

// Splits "scheme://host[:port]/path" into origin and path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("provider url needs a scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw std::invalid_argument("unsupported url scheme: " + scheme);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpProvider::HttpProvider(EndpointConfig config) : config_(std::move(config)) {
  std::tie(origin_, path_) = split_url(config_.url);
  if (config_.api_key.empty())
    if (const char* key = std::getenv(kApiKeyEnv)) config_.api_key = key;
}

std::string HttpProvider::request_body(const LlmRequest& request) {
  ordered_json body;
  body["model"] = request.model_name;
  body["messages"] = ordered_json::array({ordered_json{{"role", "user"}, {"content", request.prompt}}});
  body["temperature"] = request.temperature;
  body["seed"] = request.seed;
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string HttpProvider::complete(const LlmRequest& request) {
  httplib::Client client(origin_);
  const auto timeout = static_cast<time_t>(config_.timeout.count());
  client.set_connection_timeout(timeout, 0);
  client.set_read_timeout(timeout, 0);
  client.set_write_timeout(timeout, 0);

  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  auto res = client.Post(path_, headers, request_body(request), "application/json");
  if (!res) throw TransportError(config_.url + ": " + httplib::to_string(res.error()), true);

  const int status = res->status;
  if (status == 401 || status == 403)
    throw AuthenticationError(config_.url + ": authentication failed (HTTP " + std::to_string(status) + ")", status);
  if (status == 408 || status == 429 || status >= 500)
    throw TransportError(config_.url + ": HTTP " + std::to_string(status), true, status);
  if (status != 200)
    throw TransportError(config_.url + ": HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200), false,
                         status);

  const auto payload = json::parse(res->body, nullptr, false);
  if (payload.is_discarded() || !payload.contains("choices") || !payload["choices"].is_array() ||
      payload["choices"].empty())
    throw TransportError(config_.url + ": response has no choices", false, status);
  const auto& choice = payload["choices"][0];
  if (choice.value("finish_reason", "") == "length")
    throw TruncatedResponseError(config_.url + ": response truncated (finish_reason=length)");
  const auto message = choice.find("message");
  if (message == choice.end() || !message->contains("content") || !(*message)["content"].is_string())
    throw TransportError(config_.url + ": choice has no message content", false, status);
  return (*message)["content"].get<std::string>();
}

}  // namespace persuade
