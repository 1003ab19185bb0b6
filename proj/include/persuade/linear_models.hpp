#pragma once

// Regression baselines: ordinary least squares with classical inference and
// p-value stepwise selection (the belief-update model), accuracy-tuned score
// thresholds, and an L2 logistic regression on term frequencies.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "persuade/json_util.hpp"
#include "persuade/matrix.hpp"

namespace persuade {

class CollinearityError : public std::runtime_error {
 public:
  CollinearityError(std::vector<std::string> columns);
  const std::vector<std::string>& columns() const noexcept { return columns_; }

 private:
  std::vector<std::string> columns_;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double gradient_norm)
      : std::runtime_error(what), gradient_norm_(gradient_norm) {}
  double gradient_norm() const noexcept { return gradient_norm_; }

 private:
  double gradient_norm_;
};

// ---------------------------------------------------------------------------
// OLS

struct OlsModel {
  // Every candidate column offered to the fit, in input order.
  std::vector<std::string> feature_names;
  // Columns that carry a coefficient, in coefficient order.
  std::vector<std::string> selected_features;
  // Dropped before selection by the collinearity screen.
  std::vector<std::string> excluded_features;

  // Intercept first, then one entry per selected feature.
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  std::vector<double> t_stats;
  std::vector<double> p_values;

  double r_squared = 0.0;
  std::size_t n_observations = 0;
  double alpha = 0.05;  // entry/removal threshold when built by stepwise_select
};

using NamedRow = std::map<std::string, double, std::less<>>;

// Least squares with an intercept via Householder QR. Standard errors come
// from sigma^2 (X'X)^-1 with sigma^2 = RSS / (n - p - 1); p-values are
// two-sided Student-t on n - p - 1 degrees of freedom.
// Throws CollinearityError naming the dependent columns, std::invalid_argument
// when n <= p + 1.
OlsModel fit_ols(const Matrix& X, std::span<const double> y,
                 std::vector<std::string> feature_names = {});

struct StepwiseOptions {
  double alpha = 0.05;
  double collinearity_cutoff = 0.95;
  int max_iterations = 100;
};

// Bidirectional stepwise selection. Columns whose |r| with an earlier kept
// column exceeds the cutoff (or that are constant) are screened out first.
// Each iteration adds the excluded column with the smallest entry p-value if
// it is below alpha, then drops included columns whose p-value is >= alpha,
// worst first. Ties go to the lexicographically smaller name.
OlsModel stepwise_select(const Matrix& X, std::span<const double> y,
                         const std::vector<std::string>& feature_names,
                         const StepwiseOptions& options = {});

// intercept + sum of coef * row[name] over selected features.
// Throws std::out_of_range if a selected feature is missing.
double predict_ols(const OlsModel& model, const NamedRow& row);

ordered_json to_json(const OlsModel& model);
OlsModel ols_from_json(const json& j);

// ---------------------------------------------------------------------------
// Thresholds

// score >= threshold -> positive.
struct ThresholdRule {
  double threshold = 0.0;
  double training_accuracy = 0.0;

  int classify(double score) const noexcept { return score >= threshold ? 1 : 0; }
};

// Scans -inf, every midpoint between consecutive distinct scores, and +inf;
// keeps the most accurate, smallest threshold on ties.
ThresholdRule tune_threshold(std::span<const double> scores, std::span<const int> labels);

// ---------------------------------------------------------------------------
// Term-frequency logistic regression

struct SparseRow {
  std::vector<std::uint32_t> index;  // ascending
  std::vector<double> value;

  std::size_t nnz() const noexcept { return index.size(); }
};

struct SparseMatrix {
  std::size_t cols = 0;
  std::vector<SparseRow> rows;

  std::size_t n_rows() const noexcept { return rows.size(); }
  static SparseMatrix from_dense(const Matrix& dense);
  SparseMatrix select_rows(std::span<const std::size_t> which) const;
};

// Raw token counts over a lexicographically ordered vocabulary. Tokens not in
// the vocabulary are ignored.
class TfVectorizer {
 public:
  TfVectorizer() = default;
  explicit TfVectorizer(std::vector<std::string> vocabulary);

  static TfVectorizer fit(std::span<const std::string> texts);

  SparseRow transform(std::string_view text) const;
  SparseMatrix transform(std::span<const std::string> texts) const;

  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }

 private:
  std::vector<std::string> vocabulary_;  // sorted, unique
};

struct TfResult {
  SparseMatrix matrix;
  std::vector<std::string> vocabulary;
};

TfResult tf_vectorize(std::span<const std::string> texts);

// Objective: mean logistic loss + (l2 / 2) * ||w||^2. The intercept, stored
// last in the parameter vector, is not penalised.
class LogisticObjective {
 public:
  LogisticObjective(const SparseMatrix& X, std::span<const int> y, double l2);

  std::size_t dimension() const noexcept { return X_.cols + 1; }
  double value(std::span<const double> params) const;
  void gradient(std::span<const double> params, std::span<double> out) const;
  // out = H(params) * v
  void hessian_vector(std::span<const double> params, std::span<const double> v,
                      std::span<double> out) const;

 private:
  const SparseMatrix& X_;
  std::span<const int> y_;
  double l2_;
};

struct OptimizerOptions {
  int max_iterations = 1000;
  double gradient_tolerance = 1e-8;
};

struct LogisticFit {
  std::vector<double> params;   // weights then intercept
  std::vector<double> losses;   // objective after each accepted step, starting at zero params
  double gradient_norm = 0.0;
  int iterations = 0;
};

// Newton-CG with backtracking line search. Throws ConvergenceError carrying
// the final gradient norm when the tolerance is not met.
LogisticFit fit_logistic(const SparseMatrix& X, std::span<const int> y, double l2,
                         const OptimizerOptions& options = {});

struct LogisticModel {
  std::vector<std::string> vocabulary;
  std::vector<double> weights;  // vocabulary.size() + 1, intercept last
  double l2_strength = 1.0;
  double cv_auc = 0.0;
  std::map<double, double> cv_auc_by_l2;
};

// Seven log-spaced strengths, 1e-3 .. 1e3.
std::vector<double> default_l2_grid();

// Stratified folds: each class is shuffled under the seed and dealt round
// robin across k folds. Returns the fold index of every row.
std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k,
                                          std::uint64_t seed);

// Picks the strength with the best mean validation ROC AUC (first in grid
// order on ties), then refits on all rows.
LogisticModel fit_logistic_cv(const SparseMatrix& X, std::span<const int> y,
                              std::vector<std::string> vocabulary, std::size_t folds = 10,
                              std::span<const double> l2_grid = {}, std::uint64_t seed = 42);

double predict_logistic(const LogisticModel& model, const SparseRow& row);
double predict_logistic(const LogisticModel& model, std::string_view text);

ordered_json to_json(const ThresholdRule& rule);
ThresholdRule threshold_from_json(const json& j);

}  // namespace persuade
