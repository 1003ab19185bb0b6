// One line per acceptance criterion: PASS or FAIL, the criterion number, a
// short title and the wall time. Exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fake_server.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "persuade/linear_models.hpp"
#include "persuade/mock_provider.hpp"
#include "persuade/numstats.hpp"
#include "persuade/pipeline.hpp"
#include "persuade/prompts.hpp"
#include "persuade/random_forest.hpp"
#include "persuade/rng.hpp"
#include "persuade/synthetic.hpp"
#include "temp_dir.hpp"

using namespace persuade;

namespace {

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::size_t checks() const { return checks_; }
  std::size_t failed() const { return failed_; }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::size_t checks_ = 0;
  std::size_t failed_ = 0;
  std::vector<std::string> failures_;
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<void(Check&)> body;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string num(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::vector<std::vector<double>> random_rows(Rng& rng, std::size_t n, std::size_t p) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(p));
  for (auto& r : rows)
    for (auto& v : r) v = rng.normal();
  return rows;
}

std::vector<double> with_ties(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(rng.uniform_index(10)) - 3.0;
  return v;
}

// ---------------------------------------------------------------------------

void golden_prompts(Check& c) {
  const std::filesystem::path dir = PERSUADE_GOLDEN_DIR;
  c.expect(build_rating_prompt("A", "B", "C") == slurp(dir / "rating_prompt_ABC.txt"), "rating prompt differs");
  c.expect(build_zeroshot_prompt("A", "B", "C") == slurp(dir / "zeroshot_prompt_ABC.txt"), "zero-shot prompt differs");
}

void ols_oracle(Check& c) {
  Rng rng(derive_seed(42, {2}));
  for (int trial = 0; trial < 100; ++trial) {
    const auto rows = random_rows(rng, 50, 5);
    std::vector<double> y(50);
    for (std::size_t i = 0; i < 50; ++i) {
      y[i] = rng.normal();
      for (std::size_t j = 0; j < 5; ++j) y[i] += (static_cast<double>(j) - 2.0) * rows[i][j];
    }
    const auto m = fit_ols(Matrix::from_rows(rows), y);
    const auto b = oracle::normal_equations(rows, y);
    for (std::size_t k = 0; k < b.size(); ++k)
      c.expect(std::fabs(m.coefficients[k] - b[k]) <= 1e-8,
               "trial " + std::to_string(trial) + " coefficient " + std::to_string(k) + ": " + num(m.coefficients[k]) +
                   " vs " + num(b[k]));
    std::vector<double> xtr(6, 0.0);
    for (std::size_t i = 0; i < 50; ++i) {
      double fit = m.coefficients[0];
      for (std::size_t j = 0; j < 5; ++j) fit += m.coefficients[j + 1] * rows[i][j];
      const double r = y[i] - fit;
      xtr[0] += r;
      for (std::size_t j = 0; j < 5; ++j) xtr[j + 1] += rows[i][j] * r;
    }
    for (double v : xtr) c.expect(std::fabs(v) <= 1e-8, "trial " + std::to_string(trial) + " |X'r| = " + num(v));
  }
}

void stepwise_recovery(Check& c) {
  const auto planted = fixture::planted(fixture::kPlantedSeed);
  const auto noise = fixture::pure_noise(fixture::kNoiseSeed);
  c.expect(fixture::planted_is_clean(planted), "planted fixture fails its oracle screen");
  c.expect(fixture::noise_is_clean(noise), "noise fixture fails its oracle screen");
  const auto a = stepwise_select(planted.matrix(), planted.y, planted.names);
  c.expect(a.selected_features == std::vector<std::string>{"x1"}, "planted fixture did not select exactly {x1}");
  const auto b = stepwise_select(noise.matrix(), noise.y, noise.names);
  c.expect(b.selected_features.empty(), "noise fixture selected a feature");
}

void threshold_optimality(Check& c) {
  Rng rng(derive_seed(42, {4}));
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + rng.uniform_index(90);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial % 2 ? std::round(rng.normal() * 3.0) / 3.0 : rng.normal();
      y[i] = rng.uniform01() < 0.5 + 0.15 * s[i] ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    const auto rule = tune_threshold(s, y);
    const double brute = oracle::dense_threshold_scan(s, y);
    c.expect(rule.training_accuracy == brute,
             "trial " + std::to_string(trial) + ": " + num(rule.training_accuracy) + " vs scan " + num(brute));
    c.expect(oracle::threshold_accuracy(s, y, rule.threshold) == rule.training_accuracy,
             "trial " + std::to_string(trial) + ": reported accuracy not achieved by the threshold");
  }
}

void spearman_oracle(Check& c) {
  Rng rng(derive_seed(42, {5}));
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 5 + rng.uniform_index(96);
    const auto x = with_ties(rng, n);
    auto y = with_ties(rng, n);
    for (std::size_t i = 0; i < n; ++i) y[i] += 0.5 * x[i];
    std::vector<double> fx(n);
    for (std::size_t i = 0; i < n; ++i) fx[i] = std::exp(0.7 * x[i]) + x[i] * x[i] * x[i];
    double rho = 0.0;
    try {
      rho = spearman(x, y).rho;
    } catch (const StatsError&) {
      continue;
    }
    const double brute = oracle::spearman(x, y);
    c.expect(std::fabs(rho - brute) <= 1e-12, "trial " + std::to_string(trial) + ": " + num(rho) + " vs " + num(brute));
    c.expect(std::fabs(spearman(fx, y).rho - rho) <= 1e-12,
             "trial " + std::to_string(trial) + ": not invariant under an increasing transform");
  }
}

void auc_oracle(Check& c) {
  Rng rng(derive_seed(42, {6}));
  for (std::size_t n = 2; n <= 200; ++n) {
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = n % 2 ? static_cast<double>(rng.uniform_index(n / 4 + 2)) : rng.normal();
      y[i] = rng.coin() ? 1 : 0;
    }
    y[0] = 1;
    y[1] = 0;
    const double fast = roc_auc(s, y);
    const double brute = oracle::mann_whitney_auc(s, y);
    c.expect(fast == brute, "n=" + std::to_string(n) + ": " + num(fast) + " vs " + num(brute));
  }
}

void logistic_checks(Check& c) {
  Rng rng(derive_seed(42, {7}));
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = random_rows(rng, 20, 10);
    std::vector<int> y(20);
    for (auto& v : y) v = rng.coin() ? 1 : 0;
    const double l2 = std::pow(10.0, -2.0 + 0.2 * trial);
    const auto X = SparseMatrix::from_dense(Matrix::from_rows(rows));
    const LogisticObjective obj(X, y, l2);
    std::vector<double> params(11);
    for (auto& v : params) v = 0.5 * rng.normal();
    std::vector<double> g(11);
    obj.gradient(params, g);
    const auto fd = oracle::finite_difference_gradient(
        [&](const std::vector<double>& p) { return oracle::logistic_objective(rows, y, l2, p); }, params);
    for (std::size_t j = 0; j < 11; ++j)
      c.expect(std::fabs(g[j] - fd[j]) <= 1e-6 * std::max(1.0, std::fabs(fd[j])),
               "trial " + std::to_string(trial) + " component " + std::to_string(j) + ": " + num(g[j]) + " vs " +
                   num(fd[j]));
  }

  std::vector<std::string> texts;
  std::vector<int> labels;
  const std::vector<std::string> filler = {"river", "stone", "cloud", "paper", "window", "garden", "orange"};
  for (int i = 0; i < 60; ++i) {
    const bool good = i % 2 == 0;
    std::string t = good ? "agree" : "disagree";
    for (int k = 0; k < 5; ++k) t += " " + filler[rng.uniform_index(filler.size())];
    texts.push_back(t);
    labels.push_back(good ? 1 : 0);
  }
  const auto tf = tf_vectorize(texts);
  const auto model = fit_logistic_cv(tf.matrix, labels, tf.vocabulary);
  c.expect(model.cv_auc == 1.0, "separable fixture cv_auc = " + num(model.cv_auc));
}

void forest_checks(Check& c) {
  const auto train = fixture::blobs(derive_seed(42, {8, 1}));
  const auto test = fixture::blobs(derive_seed(42, {8, 2}));
  c.expect(fixture::separated_by_diagonal(train), "training fixture is not separable");
  ForestParams params;  // 300 trees, seed 42
  const auto a = fit_forest(train.X, train.y, params);
  const auto b = fit_forest(train.X, train.y, params);
  c.expect(a.trees.size() == 300, "forest does not have 300 trees");
  c.expect(predict_labels(a, test.X) == predict_labels(b, test.X), "identical fits predict differently");
  c.expect(to_json(a).dump() == to_json(b).dump(), "identical fits serialize differently");
  const double train_acc = accuracy(predict_labels(a, train.X), train.y);
  const double test_acc = accuracy(predict_labels(a, test.X), test.y);
  c.expect(train_acc == 1.0, "training accuracy " + num(train_acc));
  c.expect(test_acc >= 0.95, "held-out accuracy " + num(test_acc));
}

void importance_checks(Check& c) {
  constexpr std::size_t informative = 1;
  auto train = fixture::label_copy(derive_seed(42, {9, 1}), 400, informative);
  auto test = fixture::label_copy(derive_seed(42, {9, 2}), 400, informative);
  const std::vector<std::string> names = {"noise_a", "signal", "noise_b", "noise_c"};
  const auto model = fit_forest(train.X, train.y, {}, names);
  const auto report = permutation_importance(model, test.X, test.y, 100);
  const auto ranked = report.ranked();
  c.expect(ranked[0].feature == "signal", "top feature is " + ranked[0].feature);
  c.expect(report.features[informative].mean >= 0.2, "signal importance " + num(report.features[informative].mean));
  for (const auto& f : report.features)
    if (f.feature != "signal") c.expect(std::fabs(f.mean) <= 0.02, f.feature + " importance " + num(f.mean));

  auto with_constant = [](const fixture::Classification& d) {
    Matrix X;
    for (std::size_t i = 0; i < d.y.size(); ++i) {
      std::vector<double> row(d.X.row(i).begin(), d.X.row(i).end());
      row.push_back(3.0);
      X.append_row(row);
    }
    return X;
  };
  const auto cmodel = fit_forest(with_constant(train), train.y);
  const auto creport = permutation_importance(cmodel, with_constant(test), test.y, 100);
  c.expect(creport.features[4].mean == 0.0, "constant column importance " + num(creport.features[4].mean));
}

void interaction_checks(Check& c) {
  FeatureVector v;
  v[Feature::influential] = 5;
  v[Feature::interesting] = 2;
  v[Feature::interesting_if_true] = 4;
  v[Feature::positive_emotion] = 1;
  v[Feature::negative_emotion] = 3;
  v[Feature::shareable] = 3;
  v[Feature::truthfulness] = 2;
  v[Feature::attention] = 4;
  const auto x = expand_interactions(v);
  c.expect(x.size() == 36, "got " + std::to_string(x.size()) + " columns");
  v.belief_update = 17.5;
  const auto xb = expand_interactions(v);
  c.expect(xb.size() == 37, "got " + std::to_string(xb.size()) + " columns with belief update");
  c.expect(xb.back() == 17.5, "belief update is not last");

  const std::vector<std::string> expected = {
      "influential", "interesting", "interesting_if_true", "positive_emotion", "negative_emotion", "shareable",
      "truthfulness", "attention",
      "influential*interesting", "influential*interesting_if_true", "influential*positive_emotion",
      "influential*negative_emotion", "influential*shareable", "influential*truthfulness", "influential*attention",
      "interesting*interesting_if_true", "interesting*positive_emotion", "interesting*negative_emotion",
      "interesting*shareable", "interesting*truthfulness", "interesting*attention",
      "interesting_if_true*positive_emotion", "interesting_if_true*negative_emotion", "interesting_if_true*shareable",
      "interesting_if_true*truthfulness", "interesting_if_true*attention", "positive_emotion*negative_emotion",
      "positive_emotion*shareable", "positive_emotion*truthfulness", "positive_emotion*attention",
      "negative_emotion*shareable", "negative_emotion*truthfulness", "negative_emotion*attention",
      "shareable*truthfulness", "shareable*attention", "truthfulness*attention"};
  c.expect(interaction_column_names() == expected, "column order differs from the documented order");
  if (x.size() == 36) {
    c.expect(x[12] == 15.0, "influential*shareable = " + num(x[12]));           // 5 * 3
    c.expect(x[22] == 12.0, "interesting_if_true*negative_emotion = " + num(x[22]));  // 4 * 3
    c.expect(x[35] == 8.0, "truthfulness*attention = " + num(x[35]));           // 2 * 4
  }
}

RunConfig synthetic_run(const TempDir& dir, std::size_t n_threads) {
  SyntheticOptions opt;
  opt.n_threads = n_threads;
  const auto corpus = make_synthetic_corpus(opt);
  save_cmv_dataset(dir / "cmv.jsonl", corpus.threads);
  save_truthwins(dir / "truthwins.jsonl", corpus.truthwins);
  RunConfig config;
  config.cmv_path = dir / "cmv.jsonl";
  config.truthwins_path = dir / "truthwins.jsonl";
  config.out_dir = dir / "run";
  config.cache_path = dir / "cache.jsonl";
  return config;
}

std::string without_timestamps(const std::string& report_json) {
  auto j = ordered_json::parse(report_json);
  j.erase("timestamps");
  return j.dump(2);
}

void check_methods(Check& c, const EvaluationReport& report, const std::vector<std::string>& models) {
  c.expect(report.models.size() == models.size(), "report has " + std::to_string(report.models.size()) + " models");
  for (std::size_t i = 0; i < report.models.size() && i < models.size(); ++i) {
    const auto& m = report.models[i];
    c.expect(m.model_name == models[i], "model " + m.model_name + " out of order");
    for (auto method : kMethods) {
      const auto it = m.methods.find(method);
      c.expect(it != m.methods.end(), m.model_name + " lacks " + std::string(method));
      if (it == m.methods.end()) continue;
      c.expect(it->second.test_rows > 0, m.model_name + "/" + std::string(method) + " has no test rows");
      c.expect(it->second.accuracy >= 0.0 && it->second.accuracy <= 1.0,
               m.model_name + "/" + std::string(method) + " accuracy out of range");
    }
  }
}

void end_to_end_mock(Check& c) {
  TempDir dir;
  auto config = synthetic_run(dir, 40);
  config.mock = MockMode::oracle;
  config.models = {"mock"};
  run_experiment(config);  // warms the cache
  const auto cache_before = slurp(config.cache_path);

  run_experiment(config);
  const auto report_a = slurp(config.out_dir / "report.json");
  const auto text_a = slurp(config.out_dir / "report.txt");
  const auto predictions_a = slurp(config.out_dir / "predictions.jsonl");
  const auto second = run_experiment(config);
  const auto report_b = slurp(config.out_dir / "report.json");

  c.expect(slurp(config.cache_path) == cache_before, "warm replays wrote to the cache");
  c.expect(without_timestamps(report_a) == without_timestamps(report_b), "reports differ modulo timestamps");
  c.expect(slurp(config.out_dir / "report.txt") == text_a, "report.txt differs between replays");
  c.expect(slurp(config.out_dir / "predictions.jsonl") == predictions_a, "predictions differ between replays");

  check_methods(c, second, {"mock"});
  for (const auto* method : {"hybrid_independent", "hybrid_interaction"}) {
    const auto it = second.models.at(0).methods.find(method);
    if (it != second.models.at(0).methods.end())
      c.expect(it->second.accuracy >= 0.9, std::string(method) + " accuracy " + num(it->second.accuracy));
  }
}

// Stand-in for a hosted chat-completions endpoint: checks the key and answers
// with the hash-mode mock for whatever model is named.
void replication_harness(Check& c) {
  const std::string key = "acceptance-key";
  fixture::FakeChatServer server([&](const httplib::Request& req, httplib::Response& res) {
    if (req.get_header_value("Authorization") != "Bearer " + key) {
      res.status = 401;
      return;
    }
    const auto body = json::parse(req.body);
    const LlmRequest request{body.at("model").get<std::string>(),
                             body.at("messages").at(0).at("content").get<std::string>(),
                             body.at("temperature").get<double>(), body.at("seed").get<std::int64_t>()};
    res.set_content(fixture::chat_reply(mock_complete(request, MockMode::hash)), "application/json");
  });
  ::setenv(kApiKeyEnv, key.c_str(), 1);

  TempDir dir;
  auto config = synthetic_run(dir, 40);
  config.provider_url = server.url();
  config.models = {"llama3-70b", "gemma2-9b", "mixtral-8x7b"};
  const auto report = run_experiment(config);
  ::unsetenv(kApiKeyEnv);

  check_methods(c, report, config.models);
  c.expect(server.received().size() == 3 * 2 * 40, "endpoint saw " + std::to_string(server.received().size()) +
                                                       " requests");
  const auto text = slurp(config.out_dir / "report.txt");
  for (const auto& m : config.models) c.expect(text.find(m) != std::string::npos, "report.txt lacks " + m);
  for (auto method : kMethods)
    c.expect(text.find(std::string(method)) != std::string::npos, "report.txt lacks " + std::string(method));
  const auto agreement = slurp(config.out_dir / "agreement.csv");
  c.expect(std::count(agreement.begin(), agreement.end(), '\n') == 1 + 3 * static_cast<long>(kFeatureCount),
           "agreement.csv does not cover three model pairs");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "golden prompts match byte for byte", 1, golden_prompts},
      {2, "OLS matches normal equations; residuals orthogonal", 5, ols_oracle},
      {3, "stepwise recovers {x1} and selects nothing on noise", 5, stepwise_recovery},
      {4, "tuned threshold matches a dense scan", 5, threshold_optimality},
      {5, "Spearman matches rank-then-Pearson; monotone invariant", 5, spearman_oracle},
      {6, "ROC AUC matches exhaustive Mann-Whitney up to n=200", 5, auc_oracle},
      {7, "logistic gradient check; separable cv_auc = 1", 10, logistic_checks},
      {8, "forest determinism and separable-fixture power", 30, forest_checks},
      {9, "permutation importance on the label-copy fixture", 60, importance_checks},
      {10, "interaction expansion arithmetic and order", 1, interaction_checks},
      {11, "end-to-end mock run: methods, accuracy, replay", 120, end_to_end_mock},
      {12, "full report for three models over an HTTP endpoint", 300, replication_harness},
  };

  int failed = 0;
  for (const auto& criterion : criteria) {
    Check check;
    std::string error;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.body(check);
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= criterion.budget_seconds;
    const bool pass = check.ok() && error.empty() && in_time && check.checks() > 0;
    if (!pass) ++failed;
    std::cout << (pass ? "PASS" : "FAIL") << "  " << std::setw(2) << criterion.id << "  " << std::left
              << std::setw(56) << criterion.title << std::right << std::fixed << std::setprecision(3) << std::setw(9)
              << seconds << " s  (" << check.checks() << " checks)\n";
    for (const auto& f : check.failures()) std::cout << "      " << f << '\n';
    if (check.failed() > check.failures().size())
      std::cout << "      ... " << check.failed() - check.failures().size() << " more\n";
    if (!error.empty()) std::cout << "      exception: " << error << '\n';
    if (!in_time) std::cout << "      over the " << criterion.budget_seconds << " s budget\n";
    std::cout.flush();
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
