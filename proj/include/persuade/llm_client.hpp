#pragma once

// Chat-completion transport with a persistent response cache, bounded retries
// and an optional token-bucket rate limit.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace persuade {

inline constexpr double kReplicationTemperature = 0.0;
inline constexpr std::int64_t kReplicationSeed = 42;

struct LlmRequest {
  std::string model_name;
  std::string prompt;
  double temperature = kReplicationTemperature;
  std::int64_t seed = kReplicationSeed;
};

class TransportError : public std::runtime_error {
 public:
  TransportError(const std::string& what, bool transient, int status = 0)
      : std::runtime_error(what), transient_(transient), status_(status) {}
  bool transient() const noexcept { return transient_; }
  int status() const noexcept { return status_; }

 private:
  bool transient_;
  int status_;
};

class AuthenticationError : public TransportError {
 public:
  AuthenticationError(const std::string& what, int status) : TransportError(what, false, status) {}
};

class TruncatedResponseError : public TransportError {
 public:
  explicit TruncatedResponseError(const std::string& what) : TransportError(what, false, 200) {}
};

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual std::string complete(const LlmRequest& request) = 0;
};

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// sha256_hex(model_name + "\n" + prompt)
std::string cache_key(std::string_view model_name, std::string_view prompt);

struct CacheEntry {
  std::string key;
  std::string model_name;
  std::string response_text;
  std::string created_at;
};

// Line-delimited {key, model, response, created_at}. Later lines win on
// duplicate keys. Writes are appended and flushed under a single lock.
class ResponseCache {
 public:
  ResponseCache() = default;  // memory only
  explicit ResponseCache(std::filesystem::path path);

  std::optional<std::string> lookup(std::string_view model_name, std::string_view prompt) const;
  void store(std::string_view model_name, std::string_view prompt, std::string_view response);

  std::size_t size() const;
  std::vector<CacheEntry> entries() const;

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<std::string, CacheEntry, std::less<>> entries_;
  std::ofstream out_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};
};

// Token bucket. A rate of zero disables limiting.
class RateLimiter {
 public:
  RateLimiter(double tokens_per_second, double burst);
  void acquire();

 private:
  using Clock = std::chrono::steady_clock;
  double rate_;
  double burst_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mutex_;
};

enum class CacheMode {
  read_write,  // serve hits, store fresh responses
  refresh,     // skip the lookup, store the fresh response
};

class LlmClient {
 public:
  explicit LlmClient(CompletionProvider& provider, ResponseCache* cache = nullptr, RetryPolicy retry = {},
                     RateLimiter* limiter = nullptr);

  // Cache first, then the provider with exponential backoff on transient
  // transport errors. Authentication and truncation errors are not retried.
  std::string complete(const LlmRequest& request, CacheMode mode = CacheMode::read_write);

  std::size_t provider_calls() const noexcept { return provider_calls_.load(); }
  const RetryPolicy& retry_policy() const noexcept { return retry_; }

 private:
  CompletionProvider& provider_;
  ResponseCache* cache_;
  RetryPolicy retry_;
  RateLimiter* limiter_;
  std::atomic<std::size_t> provider_calls_{0};
};

std::string complete(CompletionProvider& provider, const LlmRequest& request, ResponseCache* cache = nullptr,
                     const RetryPolicy& retry = {});

// OpenAI-compatible chat-completions endpoint.
struct EndpointConfig {
  // Full URL of the completions route, e.g.
  // "https://api.groq.com/openai/v1/chat/completions".
  std::string url;
  // Empty: read PERSUADE_API_KEY from the environment.
  std::string api_key;
  std::chrono::seconds timeout{60};
};

inline constexpr const char* kApiKeyEnv = "PERSUADE_API_KEY";

class HttpProvider : public CompletionProvider {
 public:
  explicit HttpProvider(EndpointConfig config);
  std::string complete(const LlmRequest& request) override;

  // Request body sent for `request`.
  static std::string request_body(const LlmRequest& request);

 private:
  EndpointConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
};

}  // namespace persuade
