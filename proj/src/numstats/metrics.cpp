#include <cmath>
#include <numeric>

#include "persuade/numstats.hpp"

namespace persuade {

double mean(std::span<const double> values) {
  if (values.empty()) throw StatsError("mean: empty input");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double accuracy(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size())
    throw StatsError("accuracy: length mismatch (" + std::to_string(predicted.size()) + " vs " +
                     std::to_string(actual.size()) + ")");
  if (predicted.empty()) throw StatsError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == actual[i];
  return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw StatsError("roc_auc: length mismatch");
  if (scores.empty()) throw StatsError("roc_auc: empty input");
  std::size_t positives = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw StatsError("roc_auc: labels must be 0 or 1");
    positives += static_cast<std::size_t>(l);
  }
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw StatsError("roc_auc: both classes must be present");

  const auto ranks = average_ranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i)
    if (labels[i] == 1) rank_sum += ranks[i];
  const double np = static_cast<double>(positives);
  const double u = rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(negatives));
}

}  // namespace persuade
