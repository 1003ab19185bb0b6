#include <algorithm>
#include <cmath>
#include <limits>

#include "persuade/linear_models.hpp"
#include "persuade/numstats.hpp"

namespace persuade {

ThresholdRule tune_threshold(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("tune_threshold: length mismatch");
  std::size_t positives = 0;
  for (int l : labels) positives += l == 1;
  if (positives == 0 || positives == labels.size())
    throw std::invalid_argument("tune_threshold: both classes must be present");

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sweep thresholds upwards. At -inf every row is predicted positive; each
  // time the threshold passes a group of equal scores those rows flip to
  // negative.
  const double n = static_cast<double>(scores.size());
  std::size_t correct = positives;
  ThresholdRule best{-std::numeric_limits<double>::infinity(), static_cast<double>(correct) / n};

  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    const double value = scores[order[i]];
    while (j < order.size() && scores[order[j]] == value) {
      if (labels[order[j]] == 1)
        --correct;
      else
        ++correct;
      ++j;
    }
    const double threshold = j < order.size() ? 0.5 * (value + scores[order[j]])
                                              : std::numeric_limits<double>::infinity();
    const double acc = static_cast<double>(correct) / n;
    if (acc > best.training_accuracy) best = ThresholdRule{threshold, acc};
    i = j;
  }
  return best;
}

ordered_json to_json(const ThresholdRule& rule) {
  ordered_json j;
  j["threshold"] = encode_real(rule.threshold);
  j["orientation"] = "score >= threshold -> positive";
  j["training_accuracy"] = rule.training_accuracy;
  return j;
}

ThresholdRule threshold_from_json(const json& j) {
  return ThresholdRule{decode_real(j.at("threshold")), j.at("training_accuracy").get<double>()};
}

}  // namespace persuade
