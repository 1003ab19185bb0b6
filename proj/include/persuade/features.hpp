#pragma once

// The eight psychological rating features and the per-comment vector that
// carries them through every classifier.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace persuade {

// Canonical order. Column layouts, interaction products and exports all
// follow it.
enum class Feature : std::size_t {
  influential,
  interesting,
  interesting_if_true,
  positive_emotion,
  negative_emotion,
  shareable,
  truthfulness,
  attention,
};

inline constexpr std::size_t kFeatureCount = 8;

inline constexpr std::array<Feature, kFeatureCount> kFeatures = {
    Feature::influential,      Feature::interesting,      Feature::interesting_if_true,
    Feature::positive_emotion, Feature::negative_emotion, Feature::shareable,
    Feature::truthfulness,     Feature::attention,
};

constexpr std::size_t index_of(Feature f) noexcept { return static_cast<std::size_t>(f); }

// Internal snake_case name, e.g. "interesting_if_true".
std::string_view feature_name(Feature f) noexcept;
std::optional<Feature> feature_from_name(std::string_view name) noexcept;

// Label used on the wire in the rating prompt. The first feature is still
// called "Persuasive" there.
std::string_view prompt_label(Feature f) noexcept;

// Maps a response key to a feature after folding case and dropping
// everything but letters: "Interesting if True", "interesting_if_true" and
// "InterestingIfTrue" all resolve. "Persuasive" and "Influential" both map to
// Feature::influential.
std::optional<Feature> feature_from_response_key(std::string_view key) noexcept;

inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 5;
inline constexpr double kBeliefMin = -100.0;
inline constexpr double kBeliefMax = 100.0;

struct FeatureVector {
  std::array<int, kFeatureCount> ratings{};
  std::optional<double> belief_update;

  int& operator[](Feature f) noexcept { return ratings[index_of(f)]; }
  int operator[](Feature f) const noexcept { return ratings[index_of(f)]; }

  // Throws std::out_of_range naming the first offending field.
  void validate() const;

  std::array<double, kFeatureCount> as_reals() const noexcept;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

FeatureVector uniform_vector(int rating) noexcept;

}  // namespace persuade
