#pragma once

// Bagged CART classification trees with Gini splits, and permutation
// variable importance over a held-out set. Binary labels only.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "persuade/json_util.hpp"
#include "persuade/matrix.hpp"

namespace persuade {

struct ForestParams {
  std::size_t n_trees = 300;
  std::uint64_t seed = 42;
  // nullopt: floor(sqrt(p)), at least 1.
  std::optional<std::size_t> features_per_split;
  // nullopt: grow until pure or unsplittable.
  std::optional<std::size_t> max_depth;
  std::size_t min_samples_leaf = 1;
  // nullopt: n rows, drawn with replacement.
  std::optional<std::size_t> bootstrap_size;
  // 0: hardware concurrency. Results do not depend on it.
  std::size_t n_threads = 0;
};

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double split_value = 0.0;  // value <= split_value goes left
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::array<std::uint32_t, 2> class_counts{};

  bool is_leaf() const noexcept { return feature == kLeaf; }
  // Majority class; an even leaf votes positive.
  int majority() const noexcept { return class_counts[1] >= class_counts[0] ? 1 : 0; }
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  int predict(std::span<const double> row) const;
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  bool uses_feature(std::size_t feature) const noexcept;
  std::size_t depth() const;

 private:
  std::vector<TreeNode> nodes_;  // root at index 0
};

struct ForestModel {
  ForestParams params;
  std::size_t n_features = 0;
  std::size_t features_per_split = 1;  // resolved
  std::size_t n_training_rows = 0;
  std::vector<std::string> feature_names;
  std::vector<DecisionTree> trees;
};

struct ForestVote {
  int label = 0;
  double positive_fraction = 0.0;
};

// Throws std::invalid_argument on empty input, a single class, labels other
// than 0/1, or bad params.
ForestModel fit_forest(const Matrix& X, std::span<const int> y, const ForestParams& params = {},
                       std::vector<std::string> feature_names = {});

// Majority vote of the first `first_k` trees (all trees by default); a tied
// vote is positive. Throws std::invalid_argument on a width mismatch.
ForestVote predict_forest(const ForestModel& model, std::span<const double> row,
                          std::optional<std::size_t> first_k = std::nullopt);

std::vector<int> predict_labels(const ForestModel& model, const Matrix& X,
                                std::optional<std::size_t> first_k = std::nullopt);

ordered_json to_json(const ForestModel& model);
ForestModel forest_from_json(const json& j);

// ---------------------------------------------------------------------------

struct FeatureImportance {
  std::string feature;
  double mean = 0.0;
  double stddev = 0.0;
};

struct ImportanceReport {
  std::vector<FeatureImportance> features;  // column order
  std::size_t n_permutations = 0;
  double baseline_accuracy = 0.0;
  std::string evaluation_split = "test";

  // Descending mean; ties keep column order.
  std::vector<FeatureImportance> ranked() const;
  std::string to_csv() const;
  std::string to_text() const;
  ordered_json to_json() const;
};

// For each column and each of n_permutations seeded shuffles of that column,
// records baseline accuracy minus accuracy on the shuffled data. Rows must
// be disjoint from the training data. Throws std::invalid_argument when
// n_permutations < 2 or the data is empty.
ImportanceReport permutation_importance(const ForestModel& model, const Matrix& X_test,
                                        std::span<const int> y_test, std::size_t n_permutations = 100,
                                        std::uint64_t seed = 42, std::size_t n_threads = 0);

}  // namespace persuade
