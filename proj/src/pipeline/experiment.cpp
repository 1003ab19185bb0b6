#include "persuade/pipeline.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>

#include "persuade/mock_provider.hpp"

namespace persuade {

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

void note(std::ostream* log, const std::string& line) {
  if (log) *log << line << std::endl;
}

std::string importance_csv_rows(const std::string& model, DesignMode mode, const ImportanceReport& report) {
  std::ostringstream out;
  out.precision(10);
  std::size_t rank = 0;
  for (const auto& f : report.ranked())
    out << model << ',' << to_string(mode) << ',' << ++rank << ',' << f.feature << ',' << std::fixed << f.mean << ','
        << f.stddev << '\n';
  return out.str();
}

MethodSummary summary_of(const MethodResult& r) {
  return MethodSummary{r.accuracy, r.pairwise_accuracy, r.predictions.size()};
}

}  // namespace

std::vector<ThreadPair> load_pairs(const std::filesystem::path& cmv_path) {
  const auto threads = load_cmv_dataset(cmv_path);
  return select_contrast_pairs(threads);
}

std::unique_ptr<CompletionProvider> make_provider(const RunConfig& config) {
  if (config.mock) return std::make_unique<MockProvider>(*config.mock);
  return std::make_unique<HttpProvider>(EndpointConfig{config.provider_url, {}, std::chrono::seconds(60)});
}

EvaluationReport run_experiment(const RunConfig& config, std::ostream* log) {
  config.validate();
  EvaluationReport report;
  report.started_at = utc_timestamp();
  report.config = to_json(config);
  std::filesystem::create_directories(config.out_dir);
  const auto& out = config.out_dir;

  const auto pairs = stage("pairing", [&] { return load_pairs(config.cmv_path); });
  save_pairs(out / "pairs.jsonl", pairs);
  note(log, "paired " + std::to_string(pairs.size()) + " threads");

  const auto [belief_ind, belief_int] = stage("belief", [&] {
    const auto records = load_truthwins(config.truthwins_path);
    const auto messages = aggregate_messages(records);
    return std::pair{fit_belief_model(messages, DesignMode::independent),
                     fit_belief_model(messages, DesignMode::interaction)};
  });
  {
    ordered_json j;
    j["independent"] = to_json(belief_ind);
    j["interaction"] = to_json(belief_int);
    write_text_file(out / "belief_model.json", j.dump(2) + "\n");
  }
  const BeliefModel& belief_main = config.mode == DesignMode::independent ? belief_ind : belief_int;
  note(log, "belief models: " + std::to_string(belief_ind.ols.selected_features.size()) + " independent and " +
                std::to_string(belief_int.ols.selected_features.size()) + " interaction terms selected");

  auto provider = stage("provider", [&] { return make_provider(config); });
  std::unique_ptr<ResponseCache> cache = config.cache_path.empty()
                                             ? std::make_unique<ResponseCache>()
                                             : std::make_unique<ResponseCache>(config.cache_path);
  RateLimiter limiter(config.requests_per_second, static_cast<double>(config.parallelism));
  LlmClient client(*provider, cache.get(), RetryPolicy{}, &limiter);
  ExtractionOptions extraction;
  extraction.seed = config.seed;
  extraction.parallelism = config.parallelism;
  extraction.max_failure_rate = config.max_failure_rate;

  std::vector<RatingMatrix> matrices;
  std::vector<ZeroShotResult> zeroshots;
  for (const auto& model : config.models) {
    matrices.push_back(stage("extract", [&] { return extract_features(pairs, client, model, extraction); }));
    zeroshots.push_back(stage("zeroshot", [&] { return classify_zeroshot(pairs, client, model, extraction); }));
    note(log, model + ": " + std::to_string(matrices.back().failures.size()) + " rating and " +
                  std::to_string(zeroshots.back().failures.size()) + " zero-shot failures");
  }
  note(log, "provider calls: " + std::to_string(client.provider_calls()));
  save_ratings(out / "ratings.jsonl", matrices);
  save_zeroshot(out / "zeroshot.jsonl", zeroshots);

  ForestParams forest;
  forest.n_trees = config.n_trees;
  forest.seed = config.seed;

  std::vector<Prediction> predictions;
  std::string importance_csv = "model,variant,rank,feature,mean_importance,std_importance\n";
  std::map<std::set<std::string>, TransparentResult> transparent_by_exclusion;

  for (std::size_t m = 0; m < config.models.size(); ++m) {
    const auto& model = config.models[m];
    const auto& ratings = matrices[m];
    const auto& zeroshot = zeroshots[m];

    ModelReport mr;
    mr.model_name = model;
    mr.failures = ratings.failures;
    for (const auto& [id, reason] : zeroshot.failures) {
      auto& slot = mr.failures[id];
      slot = slot.empty() ? "zero-shot " + reason : slot + "; zero-shot " + reason;
    }
    std::set<std::string> excluded;
    for (const auto& [id, reason] : mr.failures) excluded.insert(id);
    std::vector<ThreadPair> kept;
    for (const auto& p : pairs)
      if (!excluded.contains(p.id)) kept.push_back(p);
    mr.evaluated_threads = kept.size();
    mr.test_threads = static_cast<std::size_t>(
        std::count_if(kept.begin(), kept.end(), [](const ThreadPair& p) { return p.split == Split::test; }));

    std::vector<MethodResult> results;
    results.push_back(stage("transparent", [&] {
      auto it = transparent_by_exclusion.find(excluded);
      if (it == transparent_by_exclusion.end())
        it = transparent_by_exclusion.emplace(excluded, run_transparent_baseline(kept, model, config.cv_folds, config.seed))
                 .first;
      MethodResult r = it->second.result;
      for (auto& p : r.predictions) p.model = model;
      return r;
    }));
    results.push_back(stage("blackbox", [&] { return run_blackbox_baseline(zeroshot, kept); }));
    results.push_back(stage("theory", [&] { return run_theory_baseline(belief_main, ratings, kept).result; }));

    const auto hybrid_ind = stage("hybrid", [&] { return run_hybrid(ratings, belief_ind, kept, forest); });
    const auto hybrid_int = stage("hybrid", [&] { return run_hybrid(ratings, belief_int, kept, forest); });
    results.push_back(hybrid_ind.result);
    results.push_back(hybrid_int.result);

    const HybridResult& refined = config.mode == DesignMode::independent ? hybrid_ind : hybrid_int;
    const auto importance = stage("importance", [&] {
      const auto test = refined.design.subset(Split::test);
      return permutation_importance(refined.forest, test.X, test.y, config.n_permutations, config.seed);
    });
    importance_csv += importance_csv_rows(model, config.mode, importance);
    if (config.prune) {
      mr.pruned = stage("pruning", [&] { return run_pruned(refined, importance, forest); });
      if (mr.pruned) mr.pruned_baseline = refined.result.accuracy;
    }

    for (auto& r : results) {
      mr.methods[r.method] = summary_of(r);
      predictions.insert(predictions.end(), r.predictions.begin(), r.predictions.end());
    }
    note(log, model + ": hybrid " + std::to_string(refined.result.accuracy) + ", evaluated " +
                  std::to_string(mr.evaluated_threads) + " threads");
    report.models.push_back(std::move(mr));
  }

  const auto agreement =
      matrices.size() >= 2 ? stage("agreement", [&] { return run_agreement(matrices); }) : AgreementTable{};
  write_text_file(out / "agreement.csv", agreement.to_csv());
  write_text_file(out / "importance.csv", importance_csv);
  save_predictions(out / "predictions.jsonl", predictions);

  report.finished_at = utc_timestamp();
  write_text_file(out / "report.json", report.to_json().dump(2) + "\n");
  write_text_file(out / "report.txt", report.to_text());
  return report;
}

}  // namespace persuade
