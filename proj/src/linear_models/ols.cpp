#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "persuade/linear_models.hpp"
#include "persuade/numstats.hpp"

namespace persuade {

namespace {

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

Eigen::MatrixXd design_with_intercept(const Matrix& X) {
  Eigen::MatrixXd A(X.rows(), X.cols() + 1);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    A(r, 0) = 1.0;
    for (std::size_t c = 0; c < X.cols(); ++c) A(r, c + 1) = X(r, c);
  }
  return A;
}

constexpr double kRankThreshold = 1e-9;

Eigen::Index numerical_rank(const Eigen::MatrixXd& A) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(kRankThreshold);
  return qr.rank();
}

// Columns scaled to unit norm so the rank threshold is scale free. All-zero
// columns stay zero.
Eigen::MatrixXd unit_columns(const Eigen::MatrixXd& A) {
  Eigen::MatrixXd out = A;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double norm = out.col(c).norm();
    if (norm > 0.0) out.col(c) /= norm;
  }
  return out;
}

// Walks the columns in order and reports every one that lies in the span of
// the intercept and the columns kept before it.
std::vector<std::string> dependent_columns(const Eigen::MatrixXd& A,
                                           const std::vector<std::string>& names) {
  const Eigen::MatrixXd U = unit_columns(A);
  std::vector<Eigen::Index> kept{0};
  std::vector<std::string> offending;
  for (Eigen::Index c = 1; c < U.cols(); ++c) {
    Eigen::MatrixXd trial(U.rows(), static_cast<Eigen::Index>(kept.size()) + 1);
    for (std::size_t k = 0; k < kept.size(); ++k) trial.col(static_cast<Eigen::Index>(k)) = U.col(kept[k]);
    trial.col(trial.cols() - 1) = U.col(c);
    if (numerical_rank(trial) == trial.cols())
      kept.push_back(c);
    else
      offending.push_back(names[static_cast<std::size_t>(c - 1)]);
  }
  return offending;
}

}  // namespace

CollinearityError::CollinearityError(std::vector<std::string> columns)
    : std::runtime_error("collinear design: columns [" + join(columns) +
                         "] are linear combinations of the intercept and earlier columns"),
      columns_(std::move(columns)) {}

OlsModel fit_ols(const Matrix& X, std::span<const double> y, std::vector<std::string> feature_names) {
  const std::size_t n = X.rows();
  const std::size_t p = X.cols();
  if (y.size() != n) throw std::invalid_argument("fit_ols: X has " + std::to_string(n) +
                                                 " rows but y has " + std::to_string(y.size()));
  if (feature_names.empty())
    for (std::size_t j = 0; j < p; ++j) feature_names.push_back("x" + std::to_string(j + 1));
  if (feature_names.size() != p) throw std::invalid_argument("fit_ols: feature name count mismatch");
  if (n <= p + 1)
    throw std::invalid_argument("fit_ols: need more than p + 1 = " + std::to_string(p + 1) +
                                " observations, got " + std::to_string(n));

  const Eigen::MatrixXd A = design_with_intercept(X);
  if (numerical_rank(unit_columns(A)) < A.cols()) throw CollinearityError(dependent_columns(A, feature_names));

  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(n));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::VectorXd beta = qr.solve(yv);
  const double y_mean = yv.mean();
  const double sst = (yv.array() - y_mean).square().sum();
  const double resolution = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(y_mean));
  const bool constant_target = sst <= static_cast<double>(n) * resolution * resolution;
  if (constant_target) {
    beta.setZero();
    beta(0) = y_mean;
  }

  const auto k = A.cols();
  const Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd R_inv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::VectorXd residual = yv - A * beta;
  const double rss = residual.squaredNorm();
  const double dof = static_cast<double>(n - p - 1);
  const double sigma2 = rss / dof;

  OlsModel m;
  m.feature_names = feature_names;
  m.selected_features = feature_names;
  m.n_observations = n;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double coef = beta(i);
    const double se = std::sqrt(sigma2 * R_inv.row(i).squaredNorm());
    double t;
    double pv;
    if (se > 0.0) {
      t = coef / se;
      pv = student_t_two_sided(t, dof);
    } else {
      // exact fit: any nonzero coefficient is infinitely significant
      t = coef == 0.0 ? 0.0 : std::copysign(INFINITY, coef);
      pv = coef == 0.0 ? 1.0 : 0.0;
    }
    m.coefficients.push_back(coef);
    m.standard_errors.push_back(se);
    m.t_stats.push_back(t);
    m.p_values.push_back(pv);
  }

  m.r_squared = constant_target ? 0.0 : 1.0 - rss / sst;
  return m;
}

double predict_ols(const OlsModel& model, const NamedRow& row) {
  double out = model.coefficients.at(0);
  for (std::size_t j = 0; j < model.selected_features.size(); ++j) {
    const auto& name = model.selected_features[j];
    auto it = row.find(name);
    if (it == row.end()) throw std::out_of_range("predict_ols: row is missing feature '" + name + "'");
    out += model.coefficients[j + 1] * it->second;
  }
  return out;
}

ordered_json to_json(const OlsModel& model) {
  auto reals = [](const std::vector<double>& v) {
    ordered_json arr = ordered_json::array();
    for (double x : v) arr.push_back(encode_real(x));
    return arr;
  };
  ordered_json j;
  j["kind"] = "ols";
  j["feature_names"] = model.feature_names;
  j["selected_features"] = model.selected_features;
  j["excluded_features"] = model.excluded_features;
  j["coefficients"] = reals(model.coefficients);
  j["standard_errors"] = reals(model.standard_errors);
  j["t_stats"] = reals(model.t_stats);
  j["p_values"] = reals(model.p_values);
  j["r_squared"] = encode_real(model.r_squared);
  j["n_observations"] = model.n_observations;
  j["alpha"] = model.alpha;
  return j;
}

OlsModel ols_from_json(const json& j) {
  auto reals = [](const json& arr) {
    std::vector<double> v;
    for (const auto& x : arr) v.push_back(decode_real(x));
    return v;
  };
  OlsModel m;
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  m.selected_features = j.at("selected_features").get<std::vector<std::string>>();
  m.excluded_features = j.at("excluded_features").get<std::vector<std::string>>();
  m.coefficients = reals(j.at("coefficients"));
  m.standard_errors = reals(j.at("standard_errors"));
  m.t_stats = reals(j.at("t_stats"));
  m.p_values = reals(j.at("p_values"));
  m.r_squared = decode_real(j.at("r_squared"));
  m.n_observations = j.at("n_observations").get<std::size_t>();
  m.alpha = j.at("alpha").get<double>();
  if (m.coefficients.size() != m.selected_features.size() + 1 ||
      m.standard_errors.size() != m.coefficients.size() || m.t_stats.size() != m.coefficients.size() ||
      m.p_values.size() != m.coefficients.size())
    throw std::invalid_argument("ols model: inference lists are not aligned with coefficients");
  return m;
}

}  // namespace persuade
