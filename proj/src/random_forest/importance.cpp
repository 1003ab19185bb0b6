#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "persuade/numstats.hpp"
#include "persuade/parallel.hpp"
#include "persuade/random_forest.hpp"
#include "persuade/rng.hpp"

namespace persuade {

namespace {

constexpr std::uint64_t kPermutationStream = 2;

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

ImportanceReport permutation_importance(const ForestModel& model, const Matrix& X_test,
                                        std::span<const int> y_test, std::size_t n_permutations,
                                        std::uint64_t seed, std::size_t n_threads) {
  if (n_permutations < 2) throw std::invalid_argument("permutation_importance: need at least 2 permutations");
  if (X_test.rows() == 0) throw std::invalid_argument("permutation_importance: empty evaluation data");
  if (X_test.rows() != y_test.size()) throw std::invalid_argument("permutation_importance: X/y length mismatch");
  if (X_test.cols() != model.n_features) throw std::invalid_argument("permutation_importance: width mismatch");

  ImportanceReport report;
  report.n_permutations = n_permutations;
  report.baseline_accuracy = accuracy(predict_labels(model, X_test), y_test);
  report.features.resize(model.n_features);

  detail::parallel_for(model.n_features, n_threads, [&](std::size_t j) {
    Matrix shuffled = X_test;
    const auto original = X_test.column(j);
    std::vector<std::size_t> order(X_test.rows());
    std::vector<double> drops(n_permutations);
    for (std::size_t rep = 0; rep < n_permutations; ++rep) {
      std::iota(order.begin(), order.end(), 0);
      Rng rng(derive_seed(seed, {kPermutationStream, j, rep}));
      rng.shuffle(std::span(order));
      for (std::size_t r = 0; r < order.size(); ++r) shuffled(r, j) = original[order[r]];
      drops[rep] = report.baseline_accuracy - accuracy(predict_labels(model, shuffled), y_test);
    }
    report.features[j] = FeatureImportance{model.feature_names[j], mean(drops), sample_stddev(drops)};
  });
  return report;
}

std::vector<FeatureImportance> ImportanceReport::ranked() const {
  auto out = features;
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.mean > b.mean; });
  return out;
}

std::string ImportanceReport::to_csv() const {
  std::ostringstream out;
  out << "rank,feature,mean_importance,std_importance\n";
  std::size_t rank = 0;
  for (const auto& f : ranked()) out << ++rank << ',' << f.feature << ',' << fixed(f.mean, 10) << ',' << fixed(f.stddev, 10) << '\n';
  return out.str();
}

std::string ImportanceReport::to_text() const {
  std::size_t width = 7;
  for (const auto& f : features) width = std::max(width, f.feature.size());
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-4s  %-*s  %12s  %12s\n", "rank", static_cast<int>(width), "feature", "mean", "std");
  out << line;
  std::size_t rank = 0;
  for (const auto& f : ranked()) {
    std::snprintf(line, sizeof line, "%-4zu  %-*s  %12.6f  %12.6f\n", ++rank, static_cast<int>(width),
                  f.feature.c_str(), f.mean, f.stddev);
    out << line;
  }
  out << "baseline accuracy " << fixed(baseline_accuracy, 4) << " on " << evaluation_split << " split, "
      << n_permutations << " permutations\n";
  return out.str();
}

ordered_json ImportanceReport::to_json() const {
  ordered_json j;
  j["evaluation_split"] = evaluation_split;
  j["n_permutations"] = n_permutations;
  j["baseline_accuracy"] = baseline_accuracy;
  ordered_json rows = ordered_json::array();
  for (const auto& f : ranked()) rows.push_back({{"feature", f.feature}, {"mean", f.mean}, {"std", f.stddev}});
  j["features"] = std::move(rows);
  return j;
}

}  // namespace persuade
