#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "persuade/corpus.hpp"
#include "persuade/linear_models.hpp"
#include "persuade/numstats.hpp"
#include "persuade/rng.hpp"

namespace persuade {

namespace {

double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double linear_score(const SparseRow& row, std::span<const double> params) {
  double z = params.back();
  for (std::size_t k = 0; k < row.nnz(); ++k) z += params[row.index[k]] * row.value[k];
  return z;
}

}  // namespace

LogisticObjective::LogisticObjective(const SparseMatrix& X, std::span<const int> y, double l2)
    : X_(X), y_(y), l2_(l2) {
  if (X.n_rows() != y.size()) throw std::invalid_argument("logistic: X/y length mismatch");
  if (X.n_rows() == 0) throw std::invalid_argument("logistic: no rows");
  if (!(l2 > 0.0)) throw std::invalid_argument("logistic: l2 strength must be positive");
}

double LogisticObjective::value(std::span<const double> params) const {
  double loss = 0.0;
  for (std::size_t i = 0; i < X_.n_rows(); ++i) {
    const double z = linear_score(X_.rows[i], params);
    loss += softplus(z) - (y_[i] == 1 ? z : 0.0);
  }
  loss /= static_cast<double>(X_.n_rows());
  const auto w = params.first(X_.cols);
  return loss + 0.5 * l2_ * dot(w, w);
}

void LogisticObjective::gradient(std::span<const double> params, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(X_.n_rows());
  for (std::size_t i = 0; i < X_.n_rows(); ++i) {
    const auto& row = X_.rows[i];
    const double residual = (sigmoid(linear_score(row, params)) - y_[i]) * inv_n;
    for (std::size_t k = 0; k < row.nnz(); ++k) out[row.index[k]] += residual * row.value[k];
    out.back() += residual;
  }
  for (std::size_t j = 0; j < X_.cols; ++j) out[j] += l2_ * params[j];
}

namespace {

// Per-row second derivative weights sigma(z)(1 - sigma(z)) / n.
std::vector<double> curvature(const SparseMatrix& X, std::span<const double> params) {
  std::vector<double> d(X.n_rows());
  const double inv_n = 1.0 / static_cast<double>(X.n_rows());
  for (std::size_t i = 0; i < X.n_rows(); ++i) {
    const double s = sigmoid(linear_score(X.rows[i], params));
    d[i] = s * (1.0 - s) * inv_n;
  }
  return d;
}

void hessian_times(const SparseMatrix& X, std::span<const double> d, double l2,
                   std::span<const double> v, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < X.n_rows(); ++i) {
    const auto& row = X.rows[i];
    const double xv = d[i] * linear_score(row, v);
    for (std::size_t k = 0; k < row.nnz(); ++k) out[row.index[k]] += xv * row.value[k];
    out.back() += xv;
  }
  for (std::size_t j = 0; j < X.cols; ++j) out[j] += l2 * v[j];
}

}  // namespace

void LogisticObjective::hessian_vector(std::span<const double> params, std::span<const double> v,
                                       std::span<double> out) const {
  hessian_times(X_, curvature(X_, params), l2_, v, out);
}

LogisticFit fit_logistic(const SparseMatrix& X, std::span<const int> y, double l2,
                         const OptimizerOptions& options) {
  const LogisticObjective objective(X, y, l2);
  const std::size_t dim = objective.dimension();

  LogisticFit fit;
  fit.params.assign(dim, 0.0);
  std::vector<double> grad(dim), direction(dim), residual(dim), conj(dim), hconj(dim), trial(dim),
      trial_grad(dim);

  double f = objective.value(fit.params);
  fit.losses.push_back(f);
  objective.gradient(fit.params, grad);
  double gnorm = norm2(grad);

  const std::size_t max_cg = std::min<std::size_t>(dim, 250);
  while (gnorm > options.gradient_tolerance && fit.iterations < options.max_iterations) {
    // Truncated conjugate gradient on H d = -g.
    const auto d_weights = curvature(X, fit.params);
    std::fill(direction.begin(), direction.end(), 0.0);
    for (std::size_t j = 0; j < dim; ++j) residual[j] = -grad[j];
    conj = residual;
    double rs = dot(residual, residual);
    const double cg_tol = std::min(0.5, std::sqrt(gnorm)) * gnorm;
    for (std::size_t k = 0; k < max_cg; ++k) {
      hessian_times(X, d_weights, l2, conj, hconj);
      const double curv = dot(conj, hconj);
      if (curv <= 0.0) break;
      const double step = rs / curv;
      for (std::size_t j = 0; j < dim; ++j) {
        direction[j] += step * conj[j];
        residual[j] -= step * hconj[j];
      }
      const double rs_next = dot(residual, residual);
      if (std::sqrt(rs_next) <= cg_tol) break;
      for (std::size_t j = 0; j < dim; ++j) conj[j] = residual[j] + (rs_next / rs) * conj[j];
      rs = rs_next;
    }
    double slope = dot(grad, direction);
    if (!(slope < 0.0)) {
      for (std::size_t j = 0; j < dim; ++j) direction[j] = -grad[j];
      slope = -gnorm * gnorm;
    }

    // Armijo backtracking, unless the predicted decrease is below the
    // resolution of f; then only the gradient can tell steps apart.
    const double resolution = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(f));
    double t = 1.0;
    bool accepted = false;
    double f_trial = f;
    for (int halvings = 0; halvings < 60 && -slope > resolution; ++halvings, t *= 0.5) {
      for (std::size_t j = 0; j < dim; ++j) trial[j] = fit.params[j] + t * direction[j];
      f_trial = objective.value(trial);
      if (f_trial <= f + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Near the optimum the decrease drops below double resolution. Take the
      // full step if it does not increase the loss and shrinks the gradient.
      for (std::size_t j = 0; j < dim; ++j) trial[j] = fit.params[j] + direction[j];
      f_trial = objective.value(trial);
      objective.gradient(trial, trial_grad);
      if (!(f_trial <= f + resolution && norm2(trial_grad) < gnorm))
        throw ConvergenceError("logistic fit: line search failed, gradient norm " + std::to_string(gnorm),
                               gnorm);
    }

    fit.params.swap(trial);
    f = f_trial;
    fit.losses.push_back(f);
    objective.gradient(fit.params, grad);
    gnorm = norm2(grad);
    ++fit.iterations;
  }

  fit.gradient_norm = gnorm;
  if (gnorm > options.gradient_tolerance)
    throw ConvergenceError("logistic fit did not converge in " + std::to_string(options.max_iterations) +
                               " iterations, gradient norm " + std::to_string(gnorm),
                           gnorm);
  return fit;
}

std::vector<double> default_l2_grid() { return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}; }

std::vector<std::size_t> stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_folds: need at least two folds");
  std::vector<std::size_t> fold(labels.size());
  std::size_t offset = 0;
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) members.push_back(i);
    Rng rng(derive_seed(seed, {0xf01d, static_cast<std::uint64_t>(cls)}));
    rng.shuffle(std::span(members));
    for (std::size_t m = 0; m < members.size(); ++m) fold[members[m]] = (offset + m) % k;
    offset = (offset + members.size()) % k;
  }
  return fold;
}

LogisticModel fit_logistic_cv(const SparseMatrix& X, std::span<const int> y,
                              std::vector<std::string> vocabulary, std::size_t folds,
                              std::span<const double> l2_grid, std::uint64_t seed) {
  if (X.n_rows() != y.size()) throw std::invalid_argument("fit_logistic_cv: X/y length mismatch");
  if (vocabulary.size() != X.cols) throw std::invalid_argument("fit_logistic_cv: vocabulary width mismatch");
  std::vector<double> grid(l2_grid.begin(), l2_grid.end());
  if (grid.empty()) grid = default_l2_grid();
  if (X.n_rows() < folds) throw std::invalid_argument("fit_logistic_cv: fewer rows than folds");
  const auto positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  if (positives < folds || y.size() - positives < folds)
    throw std::invalid_argument("fit_logistic_cv: each class needs at least one row per fold");

  const auto fold_of = stratified_folds(y, folds, seed);

  LogisticModel model;
  model.vocabulary = std::move(vocabulary);
  double best_auc = -1.0;
  for (double l2 : grid) {
    double auc_sum = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<std::size_t> train_rows, valid_rows;
      for (std::size_t i = 0; i < y.size(); ++i) (fold_of[i] == f ? valid_rows : train_rows).push_back(i);
      const SparseMatrix Xt = X.select_rows(train_rows);
      std::vector<int> yt;
      for (auto i : train_rows) yt.push_back(y[i]);
      const auto fit = fit_logistic(Xt, yt, l2);

      std::vector<double> scores;
      std::vector<int> yv;
      for (auto i : valid_rows) {
        scores.push_back(linear_score(X.rows[i], fit.params));
        yv.push_back(y[i]);
      }
      auc_sum += roc_auc(scores, yv);
    }
    const double auc = auc_sum / static_cast<double>(folds);
    model.cv_auc_by_l2[l2] = auc;
    if (auc > best_auc) {
      best_auc = auc;
      model.l2_strength = l2;
    }
  }

  model.cv_auc = best_auc;
  model.weights = fit_logistic(X, y, model.l2_strength).params;
  return model;
}

double predict_logistic(const LogisticModel& model, const SparseRow& row) {
  return sigmoid(linear_score(row, model.weights));
}

double predict_logistic(const LogisticModel& model, std::string_view text) {
  // The model's vocabulary is already sorted, so the vectorizer reuses it as is.
  const TfVectorizer vectorizer(model.vocabulary);
  return predict_logistic(model, vectorizer.transform(text));
}

}  // namespace persuade
