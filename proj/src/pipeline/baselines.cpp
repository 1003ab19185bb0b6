#include "persuade/pipeline.hpp"

#include <algorithm>

#include "persuade/numstats.hpp"

namespace persuade {

namespace {

std::vector<const ThreadPair*> sorted_pairs(std::span<const ThreadPair> pairs, std::optional<Split> split = {}) {
  std::vector<const ThreadPair*> out;
  for (const auto& p : pairs)
    if (!split || p.split == *split) out.push_back(&p);
  std::sort(out.begin(), out.end(), [](const ThreadPair* a, const ThreadPair* b) { return a->id < b->id; });
  return out;
}

}  // namespace

double per_side_accuracy(std::span<const Prediction> predictions) {
  if (predictions.empty()) throw std::invalid_argument("per_side_accuracy: no predictions");
  std::size_t correct = 0;
  for (const auto& p : predictions) correct += p.label == p.truth() ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double pairwise_accuracy(std::span<const Prediction> predictions) {
  std::map<std::string, std::array<std::optional<double>, 2>> by_thread;
  for (const auto& p : predictions) by_thread[p.thread_id][p.side == Side::positive ? 0 : 1] = p.score;
  double credit = 0.0;
  std::size_t threads = 0;
  for (const auto& [id, scores] : by_thread) {
    if (!scores[0] || !scores[1]) continue;
    ++threads;
    if (*scores[0] > *scores[1]) credit += 1.0;
    else if (*scores[0] == *scores[1]) credit += 0.5;
  }
  if (threads == 0) throw std::invalid_argument("pairwise_accuracy: no complete pairs");
  return credit / static_cast<double>(threads);
}

MethodResult summarize(std::string method, std::vector<Prediction> predictions) {
  MethodResult r;
  r.method = std::move(method);
  r.accuracy = per_side_accuracy(predictions);
  r.pairwise_accuracy = pairwise_accuracy(predictions);
  r.predictions = std::move(predictions);
  return r;
}

TheoryResult run_theory_baseline(const BeliefModel& model, const RatingMatrix& matrix,
                                 std::span<const ThreadPair> pairs) {
  std::vector<double> train_scores;
  std::vector<int> train_labels;
  std::vector<Prediction> test;
  for (const ThreadPair* p : sorted_pairs(pairs)) {
    if (!matrix.has_thread(p->id)) continue;
    for (Side side : {Side::positive, Side::negative}) {
      const double score = predict_belief(model, matrix.rows.at(RowKey{p->id, side}));
      if (p->split == Split::train) {
        train_scores.push_back(score);
        train_labels.push_back(side == Side::positive ? 1 : 0);
      } else {
        test.push_back(Prediction{p->id, side, "theory", matrix.model_name, score, 0});
      }
    }
  }
  if (train_scores.empty()) throw std::invalid_argument("theory baseline: no rated train threads");
  if (test.empty()) throw std::invalid_argument("theory baseline: no rated test threads");

  TheoryResult out;
  out.rule = tune_threshold(train_scores, train_labels);
  for (auto& p : test) p.label = out.rule.classify(p.score);
  out.result = summarize("theory", std::move(test));
  return out;
}

TransparentResult run_transparent_baseline(std::span<const ThreadPair> pairs, const std::string& model_name,
                                           std::size_t folds, std::uint64_t seed) {
  std::vector<std::string> train_text;
  std::vector<int> train_labels;
  for (const ThreadPair* p : sorted_pairs(pairs, Split::train)) {
    train_text.push_back(p->positive);
    train_labels.push_back(1);
    train_text.push_back(p->negative);
    train_labels.push_back(0);
  }
  const auto test_pairs = sorted_pairs(pairs, Split::test);
  if (train_text.size() < 4) throw std::invalid_argument("transparent baseline: needs at least two train threads");
  if (test_pairs.empty()) throw std::invalid_argument("transparent baseline: no test threads");

  // Each class holds one row per train thread.
  const std::size_t k = std::clamp<std::size_t>(folds, 2, train_text.size() / 2);
  auto tf = tf_vectorize(train_text);
  TransparentResult out;
  out.model = fit_logistic_cv(tf.matrix, train_labels, std::move(tf.vocabulary), k, {}, seed);

  std::vector<Prediction> test;
  for (const ThreadPair* p : test_pairs) {
    for (Side side : {Side::positive, Side::negative}) {
      const double prob = predict_logistic(out.model, side == Side::positive ? p->positive : p->negative);
      test.push_back(Prediction{p->id, side, "transparent", model_name, prob, prob >= 0.5 ? 1 : 0});
    }
  }
  out.result = summarize("transparent", std::move(test));
  return out;
}

MethodResult run_blackbox_baseline(const ZeroShotResult& zeroshot, std::span<const ThreadPair> pairs) {
  std::vector<Prediction> test;
  for (const ThreadPair* p : sorted_pairs(pairs, Split::test)) {
    const auto pick = zeroshot.predicted_positive.find(p->id);
    if (pick == zeroshot.predicted_positive.end()) continue;
    for (Side side : {Side::positive, Side::negative}) {
      const int label = pick->second == side ? 1 : 0;
      test.push_back(Prediction{p->id, side, "blackbox", zeroshot.model_name, static_cast<double>(label), label});
    }
  }
  if (test.empty()) throw std::invalid_argument("blackbox baseline: no classified test threads");
  return summarize("blackbox", std::move(test));
}

HybridResult run_hybrid(const RatingMatrix& matrix, const BeliefModel& belief, std::span<const ThreadPair> pairs,
                        const ForestParams& params) {
  HybridResult out;
  out.design = assemble_design(matrix, score_beliefs(belief, matrix), belief.mode, pairs);
  const auto train = out.design.subset(Split::train);
  const auto test = out.design.subset(Split::test);
  if (test.rows.empty()) throw std::invalid_argument("hybrid: no rated test threads");
  out.forest = fit_forest(train.X, train.y, params, out.design.columns);

  const std::string method(hybrid_method(belief.mode));
  std::vector<Prediction> predictions;
  for (std::size_t i = 0; i < test.rows.size(); ++i) {
    const auto vote = predict_forest(out.forest, test.X.row(i));
    predictions.push_back(
        Prediction{test.rows[i].thread_id, test.rows[i].side, method, matrix.model_name, vote.positive_fraction, vote.label});
  }
  out.result = summarize(method, std::move(predictions));
  return out;
}

std::optional<PrunedResult> run_pruned(const HybridResult& hybrid, const ImportanceReport& importance,
                                       const ForestParams& params) {
  std::vector<std::size_t> keep;
  PrunedResult out;
  for (std::size_t c = 0; c < importance.features.size(); ++c) {
    if (importance.features[c].mean > 0.0) {
      keep.push_back(c);
      out.kept_columns.push_back(importance.features[c].feature);
    }
  }
  if (keep.empty() || keep.size() == importance.features.size()) return std::nullopt;

  const auto train = hybrid.design.subset(Split::train);
  const auto test = hybrid.design.subset(Split::test);
  const auto forest = fit_forest(train.X.select_columns(keep), train.y, params, out.kept_columns);
  out.accuracy = accuracy(predict_labels(forest, test.X.select_columns(keep)), test.y);
  return out;
}

}  // namespace persuade
