#pragma once

// Deterministic in-process stand-in for a chat-completion endpoint.
//
// Output is a pure function of (model_name, prompt, seed). In hash mode the
// ratings and labels are pseudo-random. In oracle mode a comment may carry a
// hidden quality marker, "[[" followed by 0-10 asterisks and "]]"; the
// influential, interesting, interesting-if-true, shareable and attention
// ratings are then monotone in that quality and the zero-shot answer picks the
// higher-quality comment. The marker contains no letters or digits, so the
// tokenizer never sees it.

#include <optional>
#include <string>
#include <string_view>

#include "persuade/llm_client.hpp"

namespace persuade {

enum class MockMode { hash, oracle };

std::string_view to_string(MockMode mode) noexcept;
MockMode mock_mode_from_string(std::string_view text);

std::string mock_complete(const LlmRequest& request, MockMode mode);

// Marker for quality in [0, 1], rounded to tenths.
std::string quality_marker(double quality);
std::optional<double> embedded_quality(std::string_view text);

class MockProvider : public CompletionProvider {
 public:
  explicit MockProvider(MockMode mode) : mode_(mode) {}
  std::string complete(const LlmRequest& request) override { return mock_complete(request, mode_); }

 private:
  MockMode mode_;
};

}  // namespace persuade
