#pragma once

// End-to-end experiment: design matrices for the hybrid forest, the three
// baselines, cross-model agreement and the evaluation report.
//
// Design column order is fixed. Independent mode: the eight ratings in
// canonical feature order, then belief_update. Interaction mode: the eight
// ratings, the 28 pairwise products a*b for a before b in canonical order,
// then belief_update. Rows are sorted by (thread id, side), positive first,
// so the order of the input threads never matters.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "persuade/corpus.hpp"
#include "persuade/extraction.hpp"
#include "persuade/features.hpp"
#include "persuade/json_util.hpp"
#include "persuade/linear_models.hpp"
#include "persuade/matrix.hpp"
#include "persuade/mock_provider.hpp"
#include "persuade/random_forest.hpp"

namespace persuade {

enum class DesignMode { independent, interaction };

std::string_view to_string(DesignMode mode) noexcept;
DesignMode design_mode_from_string(std::string_view text);

inline constexpr std::size_t kInteractionTerms = kFeatureCount * (kFeatureCount - 1) / 2;
inline constexpr std::string_view kBeliefColumn = "belief_update";

// 8 ratings, 28 products, then belief_update when attached: 36 or 37 values.
std::vector<double> expand_interactions(const FeatureVector& v);

// Names matching expand_interactions without belief_update.
std::vector<std::string> interaction_column_names();

// Forest columns: 9 (independent) or 37 (interaction).
std::vector<std::string> design_column_names(DesignMode mode);

// ---------------------------------------------------------------------------
// Belief-update regression

struct BeliefModel {
  DesignMode mode = DesignMode::independent;
  OlsModel ols;
};

// Predictor columns built from the per-message mean ratings; same names as
// the forest columns minus belief_update.
Matrix belief_predictors(std::span<const TruthWinsMessage> messages, DesignMode mode);

BeliefModel fit_belief_model(std::span<const TruthWinsMessage> messages, DesignMode mode,
                             const StepwiseOptions& options = {});
double predict_belief(const BeliefModel& model, const FeatureVector& v);

using BeliefScores = std::map<RowKey, double>;
BeliefScores score_beliefs(const BeliefModel& model, const RatingMatrix& matrix);

ordered_json to_json(const BeliefModel& model);
BeliefModel belief_model_from_json(const json& j);

// ---------------------------------------------------------------------------
// Design matrices

struct Design {
  Matrix X;
  std::vector<int> y;  // 1 for the positive side
  std::vector<RowKey> rows;
  std::vector<Split> splits;
  std::vector<std::string> columns;
  std::vector<std::string> excluded_threads;  // in `pairs` but without ratings

  Design subset(Split split) const;
};

// One row per rated (thread, side) of `pairs`. Throws std::invalid_argument
// listing the keys that lack a belief score.
Design assemble_design(const RatingMatrix& matrix, const BeliefScores& beliefs, DesignMode mode,
                       std::span<const ThreadPair> pairs);

// ---------------------------------------------------------------------------
// Methods

inline constexpr std::array<std::string_view, 5> kMethods = {
    "transparent", "blackbox", "theory", "hybrid_independent", "hybrid_interaction"};

std::string_view hybrid_method(DesignMode mode) noexcept;

struct Prediction {
  std::string thread_id;
  Side side = Side::positive;
  std::string method;
  std::string model;
  double score = 0.0;
  int label = 0;

  int truth() const noexcept { return side == Side::positive ? 1 : 0; }
};

// Fraction of sides labelled correctly.
double per_side_accuracy(std::span<const Prediction> predictions);
// Fraction of threads whose positive side scores higher; ties count one half.
// Threads missing either side are skipped.
double pairwise_accuracy(std::span<const Prediction> predictions);

struct MethodResult {
  std::string method;
  std::vector<Prediction> predictions;  // test split only
  double accuracy = 0.0;
  double pairwise_accuracy = 0.0;
};

MethodResult summarize(std::string method, std::vector<Prediction> predictions);

// Scores every side with the belief model, tunes the threshold on the train
// split and classifies the test split side by side.
struct TheoryResult {
  MethodResult result;
  ThresholdRule rule;
};
TheoryResult run_theory_baseline(const BeliefModel& model, const RatingMatrix& matrix,
                                 std::span<const ThreadPair> pairs);

// TF logistic regression on the comment text alone, cross-validated on the
// train split; probability >= 0.5 is positive.
struct TransparentResult {
  MethodResult result;
  LogisticModel model;
};
TransparentResult run_transparent_baseline(std::span<const ThreadPair> pairs, const std::string& model_name,
                                           std::size_t folds = 10, std::uint64_t seed = 42);

// Zero-shot picks scored 1 for the chosen side and 0 for the other.
MethodResult run_blackbox_baseline(const ZeroShotResult& zeroshot, std::span<const ThreadPair> pairs);

struct HybridResult {
  MethodResult result;
  Design design;
  ForestModel forest;
};
HybridResult run_hybrid(const RatingMatrix& matrix, const BeliefModel& belief, std::span<const ThreadPair> pairs,
                        const ForestParams& params);

// Refit on the columns whose mean importance is above zero. nullopt when no
// column qualifies or when every column does.
struct PrunedResult {
  std::vector<std::string> kept_columns;
  double accuracy = 0.0;
};
std::optional<PrunedResult> run_pruned(const HybridResult& hybrid, const ImportanceReport& importance,
                                       const ForestParams& params);

// ---------------------------------------------------------------------------
// Agreement

struct AgreementRow {
  Feature feature = Feature::influential;
  std::string model_a;
  std::string model_b;
  double rho = 0.0;      // nan when either column is constant
  double p_value = 1.0;  // nan when either column is constant
  std::size_t n = 0;
};

struct AgreementTable {
  std::vector<AgreementRow> rows;  // model pairs in input order, features in canonical order
  std::string to_csv() const;
};

// Needs at least two matrices; each pair is compared over the comments both
// rated. Throws std::invalid_argument when a pair shares no comment.
AgreementTable run_agreement(std::span<const RatingMatrix> matrices);

// ---------------------------------------------------------------------------
// Configuration and report

struct RunConfig {
  std::filesystem::path cmv_path;
  std::filesystem::path truthwins_path;
  std::string provider_url;
  std::vector<std::string> models;
  std::optional<MockMode> mock;
  std::filesystem::path cache_path;  // empty: in-memory only
  std::uint64_t seed = 42;
  DesignMode mode = DesignMode::independent;
  std::size_t parallelism = 4;
  std::filesystem::path out_dir = "out";
  double max_failure_rate = 0.10;
  double requests_per_second = 0.0;
  std::size_t n_trees = 300;
  std::size_t n_permutations = 100;
  std::size_t cv_folds = 10;
  bool prune = true;

  // Throws std::invalid_argument on the first inconsistent field.
  void validate() const;
};

// Unknown keys are rejected. Relative paths resolve against `base_dir`.
RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
ordered_json to_json(const RunConfig& config);

struct MethodSummary {
  double accuracy = 0.0;
  double pairwise_accuracy = 0.0;
  std::size_t test_rows = 0;
};

struct ModelReport {
  std::string model_name;
  std::map<std::string, MethodSummary, std::less<>> methods;
  std::size_t evaluated_threads = 0;
  std::size_t test_threads = 0;
  std::map<std::string, std::string> failures;  // thread id -> reason
  std::optional<PrunedResult> pruned;
  std::optional<double> pruned_baseline;  // accuracy of the unpruned forest being refined
};

struct EvaluationReport {
  ordered_json config;
  std::vector<ModelReport> models;
  std::string started_at;
  std::string finished_at;

  // Timestamps live under "timestamps"; nothing else varies between runs.
  ordered_json to_json() const;
  std::string to_text() const;
};

EvaluationReport report_from_json(const json& j);

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& what)
      : std::runtime_error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

std::vector<ThreadPair> load_pairs(const std::filesystem::path& cmv_path);

// Mock provider when configured, otherwise the HTTP endpoint.
std::unique_ptr<CompletionProvider> make_provider(const RunConfig& config);

// Runs every stage and writes report.json, report.txt, predictions.jsonl,
// importance.csv, agreement.csv, ratings.jsonl, zeroshot.jsonl,
// belief_model.json and pairs.jsonl to config.out_dir. Progress goes to `log`
// when given.
EvaluationReport run_experiment(const RunConfig& config, std::ostream* log = nullptr);

void save_predictions(const std::filesystem::path& path, std::span<const Prediction> predictions);
std::vector<Prediction> load_predictions(const std::filesystem::path& path);

void save_zeroshot(const std::filesystem::path& path, std::span<const ZeroShotResult> results);

}  // namespace persuade
