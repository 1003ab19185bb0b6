#include <algorithm>
#include <thread>

#include "persuade/llm_client.hpp"

namespace persuade {

RateLimiter::RateLimiter(double tokens_per_second, double burst)
    : rate_(tokens_per_second), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)), last_(Clock::now()) {}

void RateLimiter::acquire() {
  if (rate_ <= 0.0) return;
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = Clock::now();
    tokens_ = std::min(burst_, tokens_ + rate_ * std::chrono::duration<double>(now - last_).count());
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    lock.unlock();
    std::this_thread::sleep_for(wait);
    lock.lock();
  }
}

LlmClient::LlmClient(CompletionProvider& provider, ResponseCache* cache, RetryPolicy retry, RateLimiter* limiter)
    : provider_(provider), cache_(cache), retry_(retry), limiter_(limiter) {
  if (retry_.max_attempts < 1) retry_.max_attempts = 1;
}

std::string LlmClient::complete(const LlmRequest& request, CacheMode mode) {
  if (cache_ && mode == CacheMode::read_write)
    if (auto hit = cache_->lookup(request.model_name, request.prompt)) return *hit;

  auto backoff = retry_.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      if (limiter_) limiter_->acquire();
      ++provider_calls_;
      std::string response = provider_.complete(request);
      if (cache_) cache_->store(request.model_name, request.prompt, response);
      return response;
    } catch (const TransportError& e) {
      if (!e.transient() || attempt >= retry_.max_attempts) {
        if (!e.transient()) throw;
        throw TransportError(std::string(e.what()) + " (after " + std::to_string(attempt) + " attempts)", true,
                             e.status());
      }
    }
    std::this_thread::sleep_for(backoff);
    backoff = std::min(retry_.max_backoff,
                       std::chrono::milliseconds(static_cast<long long>(static_cast<double>(backoff.count()) *
                                                                        retry_.multiplier)));
  }
}

std::string complete(CompletionProvider& provider, const LlmRequest& request, ResponseCache* cache,
                     const RetryPolicy& retry) {
  LlmClient client(provider, cache, retry);
  return client.complete(request);
}

}  // namespace persuade
