#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "persuade/corpus.hpp"
#include "persuade/linear_models.hpp"
#include "persuade/rng.hpp"

using namespace persuade;

namespace {

std::vector<std::vector<double>> random_rows(Rng& rng, std::size_t n, std::size_t p) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(p));
  for (auto& r : rows)
    for (auto& v : r) v = rng.normal();
  return rows;
}

SparseMatrix dense_to_sparse(const std::vector<std::vector<double>>& rows) {
  return SparseMatrix::from_dense(Matrix::from_rows(rows));
}

}  // namespace

// ---------------------------------------------------------------------------
// OLS

TEST_CASE("fit_ols exact line") {
  const auto X = Matrix::from_rows({{0}, {1}, {2}, {3}, {4}});
  const std::vector<double> y = {1, 3, 5, 7, 9};
  const auto m = fit_ols(X, y);
  CHECK(m.coefficients[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(m.coefficients[1] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(m.r_squared == doctest::Approx(1.0));
  CHECK(m.selected_features == std::vector<std::string>{"x1"});
  CHECK(m.n_observations == 5);
  CHECK(m.p_values[1] < 1e-30);
}

TEST_CASE("fit_ols matches the normal-equation oracle") {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = random_rows(rng, 50, 5);
    std::vector<double> y(50);
    for (std::size_t i = 0; i < 50; ++i) y[i] = 1.0 + rows[i][0] - 2.0 * rows[i][3] + rng.normal();
    const auto m = fit_ols(Matrix::from_rows(rows), y);
    const auto b = oracle::normal_equations(rows, y);
    const auto p = oracle::ols_p_values(rows, y);
    for (std::size_t k = 0; k < b.size(); ++k) {
      CHECK(std::fabs(m.coefficients[k] - b[k]) <= 1e-8);
      CHECK(std::fabs(m.p_values[k] - p[k]) <= 1e-7);
    }
  }
}

TEST_CASE("fit_ols inference on a simple regression") {
  // se(slope) = sqrt(sigma^2 / Sxx) with sigma^2 = RSS / (n - 2).
  const std::vector<double> x = {1, 2, 3, 4, 5, 6};
  const std::vector<double> y = {1.1, 1.9, 3.2, 3.8, 5.3, 5.9};
  Matrix X;
  for (double v : x) X.append_row({v});
  const auto m = fit_ols(X, y);
  double mx = 3.5, sxx = 0, sxy = 0, my = 0;
  for (double v : y) my += v / 6.0;
  for (int i = 0; i < 6; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double rss = 0, tss = 0;
  for (int i = 0; i < 6; ++i) {
    rss += std::pow(y[i] - intercept - slope * x[i], 2);
    tss += std::pow(y[i] - my, 2);
  }
  CHECK(m.coefficients[1] == doctest::Approx(slope).epsilon(1e-12));
  CHECK(m.standard_errors[1] == doctest::Approx(std::sqrt(rss / 4.0 / sxx)).epsilon(1e-10));
  CHECK(m.t_stats[1] == doctest::Approx(m.coefficients[1] / m.standard_errors[1]).epsilon(1e-12));
  CHECK(m.r_squared == doctest::Approx(1.0 - rss / tss).epsilon(1e-12));
}

TEST_CASE("fit_ols residuals are orthogonal to the design") {
  Rng rng(11);
  const auto rows = random_rows(rng, 80, 4);
  std::vector<double> y(80);
  for (auto& v : y) v = rng.normal();
  const auto m = fit_ols(Matrix::from_rows(rows), y);
  std::vector<double> xtr(5, 0.0);
  for (std::size_t i = 0; i < 80; ++i) {
    double fit = m.coefficients[0];
    for (std::size_t j = 0; j < 4; ++j) fit += m.coefficients[j + 1] * rows[i][j];
    const double r = y[i] - fit;
    xtr[0] += r;
    for (std::size_t j = 0; j < 4; ++j) xtr[j + 1] += rows[i][j] * r;
  }
  for (double v : xtr) CHECK(std::fabs(v) <= 1e-8);
}

TEST_CASE("fit_ols rejects collinear and short designs") {
  const auto X = Matrix::from_rows({{1, 2, 1}, {2, 4, 0}, {3, 6, 1}, {4, 8, 0}, {5, 10, 2}});
  const std::vector<double> y = {1, 2, 3, 4, 5};
  try {
    fit_ols(X, y, {"a", "b", "c"});
    FAIL("expected CollinearityError");
  } catch (const CollinearityError& e) {
    CHECK(e.columns() == std::vector<std::string>{"b"});
  }
  const auto constant = Matrix::from_rows({{1}, {1}, {1}, {1}});
  CHECK_THROWS_AS(fit_ols(constant, std::vector<double>{1, 2, 3, 4}, {"k"}), CollinearityError);
  CHECK_THROWS_AS(fit_ols(Matrix::from_rows({{1, 2}, {2, 1}, {3, 5}}), std::vector<double>{1, 2, 3}),
                  std::invalid_argument);
}

TEST_CASE("fit_ols constant target and zero columns") {
  const auto X = Matrix::from_rows({{1}, {2}, {3}, {4}});
  const auto m = fit_ols(X, std::vector<double>{5, 5, 5, 5});
  CHECK(m.r_squared == 0.0);
  CHECK(m.coefficients[0] == doctest::Approx(5.0));
  CHECK(m.coefficients[1] == 0.0);
  CHECK(m.p_values[1] == 1.0);

  const auto empty = fit_ols(Matrix(4, 0), std::vector<double>{1, 2, 3, 4});
  REQUIRE(empty.coefficients.size() == 1);
  CHECK(empty.coefficients[0] == 2.5);
}

TEST_CASE("predict_ols") {
  OlsModel m;
  m.selected_features = {"x1"};
  m.coefficients = {1.0, 2.0};
  CHECK(predict_ols(m, NamedRow{{"x1", 3.0}}) == 7.0);
  CHECK(predict_ols(m, NamedRow{{"x1", 0.0}}) == 1.0);
  CHECK_THROWS_AS(predict_ols(m, NamedRow{{"x2", 3.0}}), std::out_of_range);
}

TEST_CASE("OLS model JSON round trip is bit exact") {
  Rng rng(12);
  const auto rows = random_rows(rng, 30, 3);
  std::vector<double> y(30);
  for (auto& v : y) v = rng.normal();
  const auto m = fit_ols(Matrix::from_rows(rows), y, {"a", "b", "c"});
  const auto back = ols_from_json(json::parse(to_json(m).dump()));
  CHECK(back.coefficients == m.coefficients);
  CHECK(back.standard_errors == m.standard_errors);
  CHECK(back.p_values == m.p_values);
  CHECK(back.selected_features == m.selected_features);
  CHECK(back.r_squared == m.r_squared);
}

// ---------------------------------------------------------------------------
// Stepwise

TEST_CASE("stepwise fixtures pass their oracle screens") {
  CHECK(fixture::planted_is_clean(fixture::planted(fixture::kPlantedSeed)));
  CHECK(fixture::noise_is_clean(fixture::pure_noise(fixture::kNoiseSeed)));
}

TEST_CASE("stepwise recovers the planted feature") {
  const auto f = fixture::planted(fixture::kPlantedSeed);
  const auto m = stepwise_select(f.matrix(), f.y, f.names);
  CHECK(m.selected_features == std::vector<std::string>{"x1"});
  CHECK(m.p_values[1] < 1e-10);
  CHECK(m.feature_names == f.names);
}

TEST_CASE("stepwise selects nothing on pure noise") {
  const auto f = fixture::pure_noise(fixture::kNoiseSeed);
  const auto m = stepwise_select(f.matrix(), f.y, f.names);
  CHECK(m.selected_features.empty());
  CHECK(m.coefficients.size() == 1);
}

TEST_CASE("stepwise screens a duplicated informative column") {
  auto f = fixture::planted(fixture::kPlantedSeed, 200);
  for (auto& r : f.rows) r.push_back(r[0] * 2.0 + 1.0);
  f.names.push_back("x1_copy");
  const auto m = stepwise_select(f.matrix(), f.y, f.names);
  CHECK(m.excluded_features == std::vector<std::string>{"x1_copy"});
  CHECK(m.selected_features == std::vector<std::string>{"x1"});
}

TEST_CASE("stepwise result is stable under reselection") {
  Rng rng(13);
  const auto rows = random_rows(rng, 300, 6);
  std::vector<double> y(300);
  for (std::size_t i = 0; i < 300; ++i) y[i] = rows[i][1] - 0.5 * rows[i][4] + 0.2 * rows[i][2] + rng.normal();
  const std::vector<std::string> names = {"a", "b", "c", "d", "e", "f"};
  const auto m = stepwise_select(Matrix::from_rows(rows), y, names);
  CHECK(std::find(m.selected_features.begin(), m.selected_features.end(), "b") != m.selected_features.end());
  for (std::size_t k = 1; k < m.p_values.size(); ++k) CHECK(m.p_values[k] < 0.05);

  std::vector<std::size_t> cols;
  for (const auto& s : m.selected_features)
    cols.push_back(static_cast<std::size_t>(std::find(names.begin(), names.end(), s) - names.begin()));
  const auto again = stepwise_select(Matrix::from_rows(rows).select_columns(cols), y, m.selected_features);
  CHECK(again.selected_features == m.selected_features);
}

TEST_CASE("stepwise with a constant target selects nothing") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed);
    const auto rows = random_rows(rng, 60, 8);
    const std::vector<double> y(60, 7.3);
    const auto m = stepwise_select(Matrix::from_rows(rows), y, {"a", "b", "c", "d", "e", "f", "g", "h"});
    CHECK(m.selected_features.empty());
    CHECK(m.coefficients[0] == doctest::Approx(7.3));
    const auto full = fit_ols(Matrix::from_rows(rows), y);
    for (std::size_t j = 1; j < full.coefficients.size(); ++j) {
      CHECK(full.coefficients[j] == 0.0);
      CHECK(full.p_values[j] == 1.0);
    }
  }
}

// ---------------------------------------------------------------------------
// Thresholds

TEST_CASE("tune_threshold examples") {
  const auto r = tune_threshold(std::vector<double>{1, 2, 3, 4}, std::vector<int>{0, 0, 1, 1});
  CHECK(r.threshold == 2.5);
  CHECK(r.training_accuracy == 1.0);

  const std::vector<double> s = {-3, -1, 2, 5};
  const auto sep = tune_threshold(s, std::vector<int>{0, 0, 1, 1});
  CHECK(sep.threshold == 0.5);

  const auto anti = tune_threshold(std::vector<double>{1, 2, 3, 4, 5}, std::vector<int>{1, 1, 1, 0, 0});
  CHECK(anti.training_accuracy >= 0.6);

  const auto flat = tune_threshold(std::vector<double>{2, 2, 2, 2}, std::vector<int>{1, 0, 1, 0});
  CHECK(flat.threshold == -std::numeric_limits<double>::infinity());
  CHECK(flat.classify(2.0) == 1);
  CHECK_THROWS(tune_threshold(std::vector<double>{1, 2}, std::vector<int>{1, 1}));
}

TEST_CASE("tune_threshold matches a dense scan") {
  Rng rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng.uniform_index(40);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::round(rng.normal() * 4.0) / 4.0;
      y[i] = rng.uniform01() < 0.5 + 0.1 * s[i] ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    const auto r = tune_threshold(s, y);
    CHECK(r.training_accuracy == oracle::dense_threshold_scan(s, y));
    CHECK(oracle::threshold_accuracy(s, y, r.threshold) == r.training_accuracy);
  }
}

TEST_CASE("threshold JSON keeps infinities") {
  ThresholdRule r{-std::numeric_limits<double>::infinity(), 0.5};
  const auto back = threshold_from_json(json::parse(to_json(r).dump()));
  CHECK(back.threshold == r.threshold);
  CHECK(back.training_accuracy == 0.5);
}

// ---------------------------------------------------------------------------
// Term frequencies

TEST_CASE("tf_vectorize examples") {
  const std::vector<std::string> texts = {"a a b", ""};
  const auto tf = tf_vectorize(texts);
  CHECK(tf.vocabulary == std::vector<std::string>{"a", "b"});
  CHECK(tf.matrix.rows[0].index == std::vector<std::uint32_t>{0, 1});
  CHECK(tf.matrix.rows[0].value == std::vector<double>{2, 1});
  CHECK(tf.matrix.rows[1].nnz() == 0);

  const TfVectorizer v(tf.vocabulary);
  const auto row = v.transform("b zebra b");
  CHECK(row.index == std::vector<std::uint32_t>{1});
  CHECK(row.value == std::vector<double>{2});
}

TEST_CASE("tf is order invariant and permutation equivariant") {
  const std::vector<std::string> texts = {"the cat sat", "a dog ran far", "cat dog"};
  const std::vector<std::string> shuffled = {"cat dog", "the cat sat", "far ran dog a"};
  const auto a = tf_vectorize(texts);
  const auto b = tf_vectorize(shuffled);
  CHECK(a.vocabulary == b.vocabulary);
  CHECK(a.matrix.rows[0].index == b.matrix.rows[1].index);
  CHECK(a.matrix.rows[1].index == b.matrix.rows[2].index);
  CHECK(a.matrix.rows[1].value == b.matrix.rows[2].value);
  CHECK(a.matrix.rows[2].index == b.matrix.rows[0].index);
}

// ---------------------------------------------------------------------------
// Logistic regression

TEST_CASE("logistic gradient matches central differences") {
  Rng rng(16);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rows = random_rows(rng, 20, 10);
    std::vector<int> y(20);
    for (auto& v : y) v = rng.coin() ? 1 : 0;
    const double l2 = 0.1 * (trial + 1);
    const auto X = dense_to_sparse(rows);
    const LogisticObjective obj(X, y, l2);
    std::vector<double> params(11);
    for (auto& v : params) v = 0.5 * rng.normal();

    std::vector<double> g(11);
    obj.gradient(params, g);
    const auto fd = oracle::finite_difference_gradient(
        [&](const std::vector<double>& p) { return oracle::logistic_objective(rows, y, l2, p); }, params);
    for (std::size_t j = 0; j < 11; ++j)
      CHECK(std::fabs(g[j] - fd[j]) <= 1e-6 * std::max(1.0, std::fabs(fd[j])));
    CHECK(obj.value(params) == doctest::Approx(oracle::logistic_objective(rows, y, l2, params)).epsilon(1e-12));

    // Hessian-vector product against differences of the gradient.
    std::vector<double> v(11), hv(11), gp(11), gm(11), pp = params, pm = params;
    for (auto& x : v) x = rng.normal();
    obj.hessian_vector(params, v, hv);
    const double h = 1e-5;
    for (std::size_t j = 0; j < 11; ++j) {
      pp[j] += h * v[j];
      pm[j] -= h * v[j];
    }
    obj.gradient(pp, gp);
    obj.gradient(pm, gm);
    for (std::size_t j = 0; j < 11; ++j) CHECK(hv[j] == doctest::Approx((gp[j] - gm[j]) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("logistic fit converges with monotone losses") {
  Rng rng(17);
  const auto rows = random_rows(rng, 100, 5);
  std::vector<int> y(100);
  for (std::size_t i = 0; i < 100; ++i) y[i] = rows[i][0] + 0.5 * rng.normal() > 0 ? 1 : 0;
  const auto fit = fit_logistic(dense_to_sparse(rows), y, 0.01);
  CHECK(fit.gradient_norm <= 1e-8);
  for (std::size_t k = 1; k < fit.losses.size(); ++k) CHECK(fit.losses[k] <= fit.losses[k - 1]);
  CHECK(fit.params[0] > 0.5);
}

TEST_CASE("logistic fit reports non-convergence") {
  Rng rng(18);
  const auto rows = random_rows(rng, 50, 4);
  std::vector<int> y(50);
  for (auto& v : y) v = rng.coin() ? 1 : 0;
  OptimizerOptions o;
  o.max_iterations = 1;
  try {
    fit_logistic(dense_to_sparse(rows), y, 1e-3, o);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.gradient_norm() > 1e-8);
  }
  CHECK_THROWS_AS(fit_logistic(dense_to_sparse(rows), y, 0.0), std::invalid_argument);
}

TEST_CASE("stratified folds balance classes and follow the seed") {
  std::vector<int> y(100);
  for (std::size_t i = 0; i < 100; ++i) y[i] = i < 30 ? 1 : 0;
  const auto f = stratified_folds(y, 10, 42);
  for (std::size_t k = 0; k < 10; ++k) {
    int pos = 0, all = 0;
    for (std::size_t i = 0; i < 100; ++i)
      if (f[i] == k) {
        ++all;
        pos += y[i];
      }
    CHECK(pos == 3);
    CHECK(all == 10);
  }
  CHECK(stratified_folds(y, 10, 42) == f);
  CHECK(stratified_folds(y, 10, 43) != f);
}

TEST_CASE("fit_logistic_cv on a separable corpus") {
  std::vector<std::string> texts;
  std::vector<int> y;
  Rng rng(19);
  const std::vector<std::string> filler = {"movie", "plot", "actor", "scene", "story", "ending"};
  for (int i = 0; i < 40; ++i) {
    const bool good = i % 2 == 0;
    std::string t = good ? "good" : "bad";
    for (int k = 0; k < 4; ++k) t += " " + filler[rng.uniform_index(filler.size())];
    texts.push_back(t);
    y.push_back(good ? 1 : 0);
  }
  auto tf = tf_vectorize(texts);
  const auto m = fit_logistic_cv(tf.matrix, y, tf.vocabulary);
  CHECK(m.cv_auc == 1.0);
  CHECK(m.weights.size() == m.vocabulary.size() + 1);
  CHECK(m.cv_auc_by_l2.size() == 7);
  CHECK(predict_logistic(m, "good plot") > 0.5);
  CHECK(predict_logistic(m, "bad plot") < 0.5);

  const std::vector<double> one = {0.5};
  CHECK(fit_logistic_cv(tf.matrix, y, tf.vocabulary, 10, one).l2_strength == 0.5);
}

TEST_CASE("fit_logistic_cv on labels independent of text") {
  Rng rng(20);
  std::vector<std::string> texts;
  std::vector<int> y;
  const std::vector<std::string> words = {"alpha", "beta", "gamma", "delta", "eps", "zeta", "eta", "theta"};
  for (int i = 0; i < 400; ++i) {
    std::string t;
    for (int k = 0; k < 6; ++k) t += words[rng.uniform_index(words.size())] + " ";
    texts.push_back(t);
    y.push_back(i % 2);
  }
  auto tf = tf_vectorize(texts);
  const auto m = fit_logistic_cv(tf.matrix, y, tf.vocabulary);
  CHECK(m.cv_auc >= 0.4);
  CHECK(m.cv_auc <= 0.6);
}

TEST_CASE("predict_logistic examples") {
  LogisticModel m;
  m.vocabulary = {"a", "b"};
  m.weights = {0.0, 0.0, 0.0};
  CHECK(predict_logistic(m, "a b") == 0.5);
  m.weights = {10.0, 0.0, 0.0};
  CHECK(predict_logistic(m, "a") == doctest::Approx(0.9999546).epsilon(1e-7));
  m.weights = {10.0, 0.0, -1.0};
  CHECK(predict_logistic(m, "") == doctest::Approx(1.0 / (1.0 + std::exp(1.0))));
  CHECK(predict_logistic(m, "unknown words") == predict_logistic(m, ""));
}
