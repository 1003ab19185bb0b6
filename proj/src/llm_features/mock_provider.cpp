#include "persuade/mock_provider.hpp"

#include <algorithm>
#include <cmath>

#include "persuade/json_util.hpp"
#include "persuade/prompts.hpp"
#include "persuade/response_parser.hpp"
#include "persuade/rng.hpp"

namespace persuade {

namespace {

constexpr std::string_view kContextLead = "Here is the context and comments: ";

std::uint64_t request_seed(const LlmRequest& request) {
  const std::string digest =
      sha256_hex(request.model_name + "\n" + request.prompt + "\n" + std::to_string(request.seed));
  return std::stoull(digest.substr(0, 16), nullptr, 16);
}

struct Context {
  std::string comment1;
  std::string comment2;
};

std::optional<Context> prompt_context(std::string_view prompt) {
  const auto at = prompt.find(kContextLead);
  if (at == std::string_view::npos) return std::nullopt;
  const auto objects = extract_json_objects(prompt.substr(at + kContextLead.size()));
  if (objects.empty()) return std::nullopt;
  const auto& ctx = objects.front();
  return Context{ctx.value("comment1", ""), ctx.value("comment2", "")};
}

bool tracks_quality(Feature f) {
  switch (f) {
    case Feature::influential:
    case Feature::interesting:
    case Feature::interesting_if_true:
    case Feature::shareable:
    case Feature::attention:
      return true;
    default:
      return false;
  }
}

int quality_rating(double q) { return 1 + std::min(4, static_cast<int>(std::floor(q * 5.0))); }

ordered_json rating_object(const std::string& comment, MockMode mode, Rng& rng) {
  std::optional<double> quality;
  if (mode == MockMode::oracle) quality = embedded_quality(comment);
  ordered_json out;
  for (auto f : kFeatures) {
    const int noise = 1 + static_cast<int>(rng.uniform_index(5));
    const int rating = quality && tracks_quality(f) ? quality_rating(*quality) : noise;
    out[std::string(prompt_label(f))] = std::string(score_to_word(rating));
  }
  return out;
}

}  // namespace

std::string_view to_string(MockMode mode) noexcept { return mode == MockMode::hash ? "hash" : "oracle"; }

MockMode mock_mode_from_string(std::string_view text) {
  if (text == "hash") return MockMode::hash;
  if (text == "oracle") return MockMode::oracle;
  throw std::invalid_argument("unknown mock mode '" + std::string(text) + "' (expected hash or oracle)");
}

std::string quality_marker(double quality) {
  const auto stars = static_cast<std::size_t>(std::lround(std::clamp(quality, 0.0, 1.0) * 10.0));
  return "[[" + std::string(stars, '*') + "]]";
}

std::optional<double> embedded_quality(std::string_view text) {
  std::size_t pos = 0;
  while ((pos = text.find("[[", pos)) != std::string_view::npos) {
    std::size_t end = pos + 2;
    while (end < text.size() && text[end] == '*') ++end;
    const std::size_t stars = end - pos - 2;
    if (text.substr(end, 2) == "]]" && stars <= 10) return static_cast<double>(stars) / 10.0;
    pos += 2;
  }
  return std::nullopt;
}

std::string mock_complete(const LlmRequest& request, MockMode mode) {
  Rng rng(request_seed(request));
  const auto kind = classify_prompt(request.prompt);
  const auto ctx = prompt_context(request.prompt);
  if (kind == PromptKind::unknown || !ctx) return "mock response " + std::to_string(rng.next());

  if (kind == PromptKind::rating) {
    ordered_json out;
    out["comment1"] = rating_object(ctx->comment1, mode, rng);
    out["comment2"] = rating_object(ctx->comment2, mode, rng);
    return out.dump(2);
  }

  bool first_wins = rng.coin();
  if (mode == MockMode::oracle) {
    const auto q1 = embedded_quality(ctx->comment1);
    const auto q2 = embedded_quality(ctx->comment2);
    if (q1 && q2 && *q1 != *q2) first_wins = *q1 > *q2;
  }
  ordered_json out;
  out["comment1"] = first_wins ? 1 : 0;
  out["comment2"] = first_wins ? 0 : 1;
  return out.dump();
}

}  // namespace persuade
