#include "persuade/features.hpp"

#include <cctype>
#include <stdexcept>

namespace persuade {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames = {
    "influential",      "interesting",      "interesting_if_true", "positive_emotion",
    "negative_emotion", "shareable",        "truthfulness",        "attention",
};

constexpr std::array<std::string_view, kFeatureCount> kPromptLabels = {
    "Persuasive", "Interesting", "Interesting if True", "Positive",
    "Negative",   "Shareable",   "Truthfulness",        "Attention",
};

std::string fold_key(std::string_view key) {
  std::string out;
  for (unsigned char c : key)
    if (std::isalpha(c)) out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

}  // namespace

std::string_view feature_name(Feature f) noexcept { return kNames[index_of(f)]; }

std::string_view prompt_label(Feature f) noexcept { return kPromptLabels[index_of(f)]; }

std::optional<Feature> feature_from_name(std::string_view name) noexcept {
  for (auto f : kFeatures)
    if (kNames[index_of(f)] == name) return f;
  return std::nullopt;
}

std::optional<Feature> feature_from_response_key(std::string_view key) noexcept {
  const std::string folded = fold_key(key);
  if (folded == "persuasive" || folded == "influential") return Feature::influential;
  if (folded == "interesting") return Feature::interesting;
  if (folded == "interestingiftrue") return Feature::interesting_if_true;
  if (folded == "positive" || folded == "positiveemotion") return Feature::positive_emotion;
  if (folded == "negative" || folded == "negativeemotion") return Feature::negative_emotion;
  if (folded == "shareable" || folded == "shareability") return Feature::shareable;
  if (folded == "truthfulness") return Feature::truthfulness;
  if (folded == "attention") return Feature::attention;
  return std::nullopt;
}

void FeatureVector::validate() const {
  for (auto f : kFeatures) {
    const int r = (*this)[f];
    if (r < kLikertMin || r > kLikertMax)
      throw std::out_of_range(std::string(feature_name(f)) + " rating " + std::to_string(r) +
                              " outside 1..5");
  }
  if (belief_update && !(*belief_update >= kBeliefMin && *belief_update <= kBeliefMax))
    throw std::out_of_range("belief_update " + std::to_string(*belief_update) +
                            " outside [-100, 100]");
}

std::array<double, kFeatureCount> FeatureVector::as_reals() const noexcept {
  std::array<double, kFeatureCount> out{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) out[i] = static_cast<double>(ratings[i]);
  return out;
}

FeatureVector uniform_vector(int rating) noexcept {
  FeatureVector v;
  v.ratings.fill(rating);
  return v;
}

}  // namespace persuade
