#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "persuade/random_forest.hpp"
#include "persuade/rng.hpp"
#include "persuade/parallel.hpp"

namespace persuade {

namespace {

// Stream tags under the root seed; importance.cpp uses 2.
constexpr std::uint64_t kTreeStream = 1;

struct Split {
  std::size_t feature;
  double value;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, std::span<const int> y, const ForestModel& model, Rng& rng)
      : X_(X), y_(y), model_(model), rng_(rng), column_(X.rows()) {}

  DecisionTree build(std::vector<std::size_t> samples) {
    samples_ = std::move(samples);
    std::vector<TreeNode> nodes(1);
    struct Work {
      std::uint32_t node;
      std::size_t begin, end, depth;
    };
    std::vector<Work> stack{{0, 0, samples_.size(), 0}};
    while (!stack.empty()) {
      const Work w = stack.back();
      stack.pop_back();

      std::array<std::uint32_t, 2> counts{};
      for (std::size_t i = w.begin; i < w.end; ++i) ++counts[static_cast<std::size_t>(y_[samples_[i]])];
      nodes[w.node].class_counts = counts;

      const auto split = find_split(w.begin, w.end, w.depth, counts);
      if (!split) continue;

      const auto first = samples_.begin();
      const auto mid = static_cast<std::size_t>(
          std::partition(first + static_cast<std::ptrdiff_t>(w.begin), first + static_cast<std::ptrdiff_t>(w.end),
                         [&](std::size_t s) { return X_(s, split->feature) <= split->value; }) -
          first);
      const auto left = static_cast<std::uint32_t>(nodes.size());
      nodes.resize(nodes.size() + 2);
      TreeNode& node = nodes[w.node];
      node.feature = static_cast<std::int32_t>(split->feature);
      node.split_value = split->value;
      node.left = left;
      node.right = left + 1;
      stack.push_back({left + 1, mid, w.end, w.depth + 1});
      stack.push_back({left, w.begin, mid, w.depth + 1});
    }
    return DecisionTree(std::move(nodes));
  }

 private:
  std::optional<Split> find_split(std::size_t begin, std::size_t end, std::size_t depth,
                                  const std::array<std::uint32_t, 2>& counts) {
    const std::size_t n = end - begin;
    const std::size_t min_leaf = model_.params.min_samples_leaf;
    if (counts[0] == 0 || counts[1] == 0) return std::nullopt;
    if (n < 2 * min_leaf) return std::nullopt;
    if (model_.params.max_depth && depth >= *model_.params.max_depth) return std::nullopt;

    // Seeded partial shuffle picks the candidates; scanning them in ascending
    // order makes equal-impurity splits resolve to the lower feature index.
    std::vector<std::size_t> features(model_.n_features);
    std::iota(features.begin(), features.end(), 0);
    const std::size_t k = model_.features_per_split;
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::size_t>(rng_.uniform_index(features.size() - i));
      std::swap(features[i], features[j]);
    }
    features.resize(k);
    std::sort(features.begin(), features.end());

    // n/2 times the weighted Gini impurity of a split is sum(a*b/size) over
    // its children; the parent's is c0*c1/n.
    const double parent = static_cast<double>(counts[0]) * counts[1] / static_cast<double>(n);
    double best_score = parent;
    std::optional<Split> best;
    for (std::size_t f : features) {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = samples_[begin + i];
        column_[i] = {X_(s, f), y_[s]};
      }
      std::sort(column_.begin(), column_.begin() + static_cast<std::ptrdiff_t>(n),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      std::array<double, 2> left{};
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left[static_cast<std::size_t>(column_[i].second)] += 1.0;
        if (column_[i].first == column_[i + 1].first) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        if (n_left < min_leaf || n_right < min_leaf) continue;
        const double r0 = counts[0] - left[0];
        const double r1 = counts[1] - left[1];
        const double score =
            left[0] * left[1] / static_cast<double>(n_left) + r0 * r1 / static_cast<double>(n_right);
        // strict improvement only; the first of equal candidates is kept
        if (score < best_score - 1e-12 * parent) {
          best_score = score;
          double value = 0.5 * (column_[i].first + column_[i + 1].first);
          if (!(value < column_[i + 1].first)) value = column_[i].first;
          best = Split{f, value};
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  std::span<const int> y_;
  const ForestModel& model_;
  Rng& rng_;
  std::vector<std::size_t> samples_;
  std::vector<std::pair<double, int>> column_;
};

}  // namespace

int DecisionTree::predict(std::span<const double> row) const {
  std::uint32_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const auto& node = nodes_[i];
    i = row[static_cast<std::size_t>(node.feature)] <= node.split_value ? node.left : node.right;
  }
  return nodes_[i].majority();
}

bool DecisionTree::uses_feature(std::size_t feature) const noexcept {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const TreeNode& n) {
    return !n.is_leaf() && static_cast<std::size_t>(n.feature) == feature;
  });
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::size_t deepest = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes_[i].is_leaf()) {
      stack.emplace_back(nodes_[i].left, d + 1);
      stack.emplace_back(nodes_[i].right, d + 1);
    }
  }
  return deepest;
}

ForestModel fit_forest(const Matrix& X, std::span<const int> y, const ForestParams& params,
                       std::vector<std::string> feature_names) {
  if (X.rows() == 0 || X.cols() == 0) throw std::invalid_argument("fit_forest: empty design matrix");
  if (y.size() != X.rows()) throw std::invalid_argument("fit_forest: X/y length mismatch");
  if (X.rows() < 2) throw std::invalid_argument("fit_forest: need at least two rows");
  std::size_t positives = 0;
  for (int label : y) {
    if (label != 0 && label != 1) throw std::invalid_argument("fit_forest: labels must be 0 or 1");
    positives += static_cast<std::size_t>(label);
  }
  if (positives == 0 || positives == y.size())
    throw std::invalid_argument("fit_forest: both classes must be present");
  if (params.n_trees == 0) throw std::invalid_argument("fit_forest: n_trees must be >= 1");
  if (params.min_samples_leaf == 0) throw std::invalid_argument("fit_forest: min_samples_leaf must be >= 1");

  ForestModel model;
  model.params = params;
  model.n_features = X.cols();
  model.n_training_rows = X.rows();
  model.features_per_split = params.features_per_split.value_or(
      std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(X.cols())))));
  if (model.features_per_split < 1 || model.features_per_split > X.cols())
    throw std::invalid_argument("fit_forest: features_per_split must be in [1, p]");
  if (feature_names.empty())
    for (std::size_t j = 0; j < X.cols(); ++j) feature_names.push_back("x" + std::to_string(j + 1));
  if (feature_names.size() != X.cols()) throw std::invalid_argument("fit_forest: feature name count mismatch");
  model.feature_names = std::move(feature_names);

  const std::size_t bootstrap = params.bootstrap_size.value_or(X.rows());
  if (bootstrap == 0) throw std::invalid_argument("fit_forest: bootstrap_size must be >= 1");

  model.trees.resize(params.n_trees);
  detail::parallel_for(params.n_trees, params.n_threads, [&](std::size_t t) {
    Rng rng(derive_seed(params.seed, {kTreeStream, t}));
    std::vector<std::size_t> sample(bootstrap);
    for (auto& s : sample) s = static_cast<std::size_t>(rng.uniform_index(X.rows()));
    TreeBuilder builder(X, y, model, rng);
    model.trees[t] = builder.build(std::move(sample));
  });
  return model;
}

ForestVote predict_forest(const ForestModel& model, std::span<const double> row,
                          std::optional<std::size_t> first_k) {
  if (row.size() != model.n_features)
    throw std::invalid_argument("predict_forest: row has " + std::to_string(row.size()) +
                                " values, model expects " + std::to_string(model.n_features));
  const std::size_t k = std::min(first_k.value_or(model.trees.size()), model.trees.size());
  if (k == 0) throw std::invalid_argument("predict_forest: no trees to vote");
  std::size_t positive = 0;
  for (std::size_t t = 0; t < k; ++t) positive += static_cast<std::size_t>(model.trees[t].predict(row));
  const double fraction = static_cast<double>(positive) / static_cast<double>(k);
  return ForestVote{2 * positive >= k ? 1 : 0, fraction};
}

std::vector<int> predict_labels(const ForestModel& model, const Matrix& X, std::optional<std::size_t> first_k) {
  std::vector<int> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict_forest(model, X.row(r), first_k).label;
  return out;
}

ordered_json to_json(const ForestModel& model) {
  ordered_json params;
  params["n_trees"] = model.params.n_trees;
  params["seed"] = model.params.seed;
  params["features_per_split"] = model.features_per_split;
  params["features_per_split_rule"] = model.params.features_per_split ? "fixed" : "floor(sqrt(p))";
  params["max_depth"] = model.params.max_depth ? ordered_json(*model.params.max_depth) : ordered_json();
  params["min_samples_leaf"] = model.params.min_samples_leaf;
  params["bootstrap_size"] =
      model.params.bootstrap_size ? ordered_json(*model.params.bootstrap_size) : ordered_json();

  ordered_json trees = ordered_json::array();
  for (const auto& tree : model.trees) {
    ordered_json nodes = ordered_json::array();
    for (const auto& n : tree.nodes()) {
      ordered_json node;
      if (!n.is_leaf()) {
        node["feature"] = n.feature;
        node["split_value"] = n.split_value;
        node["left"] = n.left;
        node["right"] = n.right;
      }
      node["class_counts"] = n.class_counts;
      nodes.push_back(std::move(node));
    }
    trees.push_back(std::move(nodes));
  }

  ordered_json j;
  j["kind"] = "random_forest";
  j["params"] = std::move(params);
  j["n_features"] = model.n_features;
  j["n_training_rows"] = model.n_training_rows;
  j["feature_names"] = model.feature_names;
  j["trees"] = std::move(trees);
  return j;
}

ForestModel forest_from_json(const json& j) {
  ForestModel m;
  const auto& p = j.at("params");
  m.params.n_trees = p.at("n_trees").get<std::size_t>();
  m.params.seed = p.at("seed").get<std::uint64_t>();
  m.features_per_split = p.at("features_per_split").get<std::size_t>();
  if (p.at("features_per_split_rule") == "fixed") m.params.features_per_split = m.features_per_split;
  if (!p.at("max_depth").is_null()) m.params.max_depth = p.at("max_depth").get<std::size_t>();
  m.params.min_samples_leaf = p.at("min_samples_leaf").get<std::size_t>();
  if (!p.at("bootstrap_size").is_null()) m.params.bootstrap_size = p.at("bootstrap_size").get<std::size_t>();
  m.n_features = j.at("n_features").get<std::size_t>();
  m.n_training_rows = j.at("n_training_rows").get<std::size_t>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  for (const auto& tree : j.at("trees")) {
    std::vector<TreeNode> nodes;
    for (const auto& n : tree) {
      TreeNode node;
      node.class_counts = n.at("class_counts").get<std::array<std::uint32_t, 2>>();
      if (n.contains("feature")) {
        node.feature = n.at("feature").get<std::int32_t>();
        node.split_value = n.at("split_value").get<double>();
        node.left = n.at("left").get<std::uint32_t>();
        node.right = n.at("right").get<std::uint32_t>();
        if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= m.n_features)
          throw std::invalid_argument("forest model: split feature out of range");
      }
      nodes.push_back(node);
    }
    for (const auto& node : nodes)
      if (!node.is_leaf() && (node.left >= nodes.size() || node.right >= nodes.size()))
        throw std::invalid_argument("forest model: child index out of range");
    m.trees.emplace_back(std::move(nodes));
  }
  if (m.trees.size() != m.params.n_trees) throw std::invalid_argument("forest model: tree count mismatch");
  return m;
}

}  // namespace persuade
