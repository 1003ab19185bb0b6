#pragma once

#include <string>
#include <string_view>

namespace persuade {

// Both templates carry exactly one "{context}" placeholder.
extern const std::string_view kZeroShotTemplate;
extern const std::string_view kRatingTemplate;

inline constexpr std::string_view kContextPlaceholder = "{context}";

// Compact JSON object {"op_text":...,"comment1":...,"comment2":...}, keys in
// that order. Invalid UTF-8 is replaced with U+FFFD.
std::string serialize_context(std::string_view op_text, std::string_view comment1,
                              std::string_view comment2);

// Throws std::invalid_argument if any input is empty.
std::string build_rating_prompt(std::string_view op_text, std::string_view comment1,
                                std::string_view comment2);
std::string build_zeroshot_prompt(std::string_view op_text, std::string_view comment1,
                                  std::string_view comment2);

enum class PromptKind { rating, zeroshot, unknown };
PromptKind classify_prompt(std::string_view prompt) noexcept;

}  // namespace persuade
