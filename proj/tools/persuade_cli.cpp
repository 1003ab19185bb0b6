// persuade: command-line front end for the persuasion pipeline.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <memory>
#include <optional>

#include "persuade/pipeline.hpp"
#include "persuade/synthetic.hpp"

using namespace persuade;

namespace {

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string cache;
  std::string out;
  std::string provider_url;
  std::vector<std::string> models;
  std::optional<std::size_t> parallelism;
  std::string mock;
  std::string cmv;
  std::string truthwins;
};

RunConfig resolve_config(const GlobalFlags& g) {
  RunConfig c = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  if (g.seed) c.seed = *g.seed;
  if (!g.mode.empty()) c.mode = design_mode_from_string(g.mode);
  if (!g.cache.empty()) c.cache_path = g.cache;
  if (!g.out.empty()) c.out_dir = g.out;
  if (!g.provider_url.empty()) c.provider_url = g.provider_url;
  if (!g.models.empty()) c.models = g.models;
  if (g.parallelism) c.parallelism = *g.parallelism;
  if (!g.mock.empty()) c.mock = mock_mode_from_string(g.mock);
  if (!g.cmv.empty()) c.cmv_path = g.cmv;
  if (!g.truthwins.empty()) c.truthwins_path = g.truthwins;
  if (c.mock && c.models.empty()) c.models = {"mock"};
  return c;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

struct Session {
  std::unique_ptr<CompletionProvider> provider;
  std::unique_ptr<ResponseCache> cache;
  std::unique_ptr<RateLimiter> limiter;
  std::unique_ptr<LlmClient> client;
  ExtractionOptions options;

  explicit Session(const RunConfig& c) {
    require(!c.models.empty(), "no model configured (use --model or --mock)");
    require(c.mock || !c.provider_url.empty(), "no provider configured (use --provider-url or --mock)");
    provider = make_provider(c);
    cache = c.cache_path.empty() ? std::make_unique<ResponseCache>() : std::make_unique<ResponseCache>(c.cache_path);
    limiter = std::make_unique<RateLimiter>(c.requests_per_second, static_cast<double>(c.parallelism));
    client = std::make_unique<LlmClient>(*provider, cache.get(), RetryPolicy{}, limiter.get());
    options.seed = c.seed;
    options.parallelism = c.parallelism;
    options.max_failure_rate = c.max_failure_rate;
  }
};

std::vector<TruthWinsMessage> load_messages(const RunConfig& c) {
  require(!c.truthwins_path.empty(), "no Truth Wins file (use --truthwins)");
  return aggregate_messages(load_truthwins(c.truthwins_path));
}

std::vector<ThreadPair> require_pairs(const RunConfig& c) {
  require(!c.cmv_path.empty(), "no CMV file (use --cmv)");
  return load_pairs(c.cmv_path);
}

std::filesystem::path output(const RunConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.out_dir);
  return c.out_dir / name;
}

void print_failures(const std::string& model, const std::map<std::string, std::string>& failures) {
  for (const auto& [id, reason] : failures) std::cerr << model << ": " << id << ": " << reason << '\n';
}

std::vector<ThreadPair> rated_pairs(std::span<const ThreadPair> pairs, const RatingMatrix& m) {
  std::vector<ThreadPair> out;
  for (const auto& p : pairs)
    if (m.has_thread(p.id)) out.push_back(p);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predict successful persuasion from LLM-rated psychological features"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--config", g.config, "JSON run configuration; flags override its values");
  app.add_option("--seed", g.seed, "Seed for every random choice (default 42)");
  app.add_option("--mode", g.mode, "Design variant")->check(CLI::IsMember({"independent", "interaction"}));
  app.add_option("--cache", g.cache, "Response cache file (JSONL)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--provider-url", g.provider_url, "OpenAI-compatible chat completions URL");
  app.add_option("--model", g.models, "Model name; repeat for several models");
  app.add_option("--parallelism", g.parallelism, "Concurrent LLM requests")->check(CLI::PositiveNumber);
  app.add_option("--mock", g.mock, "Use the built-in mock provider")->check(CLI::IsMember({"hash", "oracle"}));
  app.add_option("--cmv", g.cmv, "Change My View dataset (JSONL, raw or paired)");
  app.add_option("--truthwins", g.truthwins, "Truth Wins ratings (JSONL)");
  app.fallthrough();

  std::map<std::string, std::function<int()>> handlers;

  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus and a mock configuration to --out");
  std::size_t synth_threads = 40;
  synth->add_option("--threads", synth_threads, "Number of threads")->check(CLI::Range(2, 100000));
  handlers["synth"] = [&] {
    const auto c = resolve_config(g);
    SyntheticOptions o;
    o.n_threads = synth_threads;
    o.seed = c.seed;
    const auto corpus = make_synthetic_corpus(o);
    save_cmv_dataset(output(c, "cmv.jsonl"), corpus.threads);
    save_truthwins(output(c, "truthwins.jsonl"), corpus.truthwins);
    ordered_json cfg;
    cfg["cmv"] = "cmv.jsonl";
    cfg["truthwins"] = "truthwins.jsonl";
    cfg["mock"] = "oracle";
    cfg["models"] = {"mock-a", "mock-b"};
    cfg["cache"] = "cache.jsonl";
    cfg["out"] = "run";
    cfg["seed"] = c.seed;
    write_text_file(output(c, "config.json"), cfg.dump(2) + "\n");
    std::cout << "wrote " << corpus.threads.size() << " threads and " << corpus.truthwins.size()
              << " Truth Wins rows to " << c.out_dir.string() << '\n';
    return 0;
  };

  auto* pair = app.add_subcommand("pair", "Reduce raw CMV threads to contrast pairs");
  std::string pair_output;
  pair->add_option("--output", pair_output, "Paired JSONL (default <out>/pairs.jsonl)");
  handlers["pair"] = [&] {
    const auto c = resolve_config(g);
    const auto pairs = require_pairs(c);
    const auto path = pair_output.empty() ? output(c, "pairs.jsonl") : std::filesystem::path(pair_output);
    save_pairs(path, pairs);
    std::cout << "paired " << pairs.size() << " threads into " << path.string() << '\n';
    return 0;
  };

  app.add_subcommand("extract", "Rate every reply with each model; writes ratings.jsonl");
  handlers["extract"] = [&] {
    const auto c = resolve_config(g);
    const auto pairs = require_pairs(c);
    Session s(c);
    std::vector<RatingMatrix> matrices;
    for (const auto& model : c.models) {
      matrices.push_back(extract_features(pairs, *s.client, model, s.options));
      print_failures(model, matrices.back().failures);
      std::cout << model << ": rated " << matrices.back().rows.size() / 2 << " of " << pairs.size() << " threads\n";
    }
    save_ratings(output(c, "ratings.jsonl"), matrices);
    return 0;
  };

  app.add_subcommand("zeroshot", "Ask each model which reply persuaded; writes zeroshot.jsonl");
  handlers["zeroshot"] = [&] {
    const auto c = resolve_config(g);
    const auto pairs = require_pairs(c);
    Session s(c);
    std::vector<ZeroShotResult> results;
    for (const auto& model : c.models) {
      results.push_back(classify_zeroshot(pairs, *s.client, model, s.options));
      const auto& r = results.back();
      print_failures(model, r.failures);
      std::size_t correct = 0;
      for (const auto& [id, side] : r.predicted_positive) correct += side == Side::positive ? 1 : 0;
      std::cout << model << ": picked the delta reply in " << correct << " of " << r.predicted_positive.size()
                << " threads\n";
    }
    save_zeroshot(output(c, "zeroshot.jsonl"), results);
    return 0;
  };

  auto* belief = app.add_subcommand("belief", "Fit the belief-update regressions; writes belief_model.json");
  std::string belief_ratings;
  belief->add_option("--ratings", belief_ratings, "Also score these ratings into belief_scores.jsonl");
  handlers["belief"] = [&] {
    const auto c = resolve_config(g);
    const auto messages = load_messages(c);
    const auto ind = fit_belief_model(messages, DesignMode::independent);
    const auto inter = fit_belief_model(messages, DesignMode::interaction);
    ordered_json j;
    j["independent"] = to_json(ind);
    j["interaction"] = to_json(inter);
    write_text_file(output(c, "belief_model.json"), j.dump(2) + "\n");
    for (const auto* m : {&ind, &inter}) {
      std::cout << to_string(m->mode) << ": r^2 " << m->ols.r_squared << ", selected";
      for (const auto& f : m->ols.selected_features) std::cout << ' ' << f;
      std::cout << '\n';
    }
    if (!belief_ratings.empty()) {
      std::vector<ordered_json> lines;
      for (const auto& matrix : load_ratings(belief_ratings)) {
        const auto a = score_beliefs(ind, matrix);
        const auto b = score_beliefs(inter, matrix);
        for (const auto& [key, score] : a)
          lines.push_back({{"thread_id", key.thread_id},
                           {"side", std::string(to_string(key.side))},
                           {"model", matrix.model_name},
                           {"independent", score},
                           {"interaction", b.at(key)}});
      }
      write_jsonl(output(c, "belief_scores.jsonl"), lines);
    }
    return 0;
  };

  std::string ratings_path;
  auto* train = app.add_subcommand("train", "Fit the hybrid forest for --mode and score the test split");
  train->add_option("--ratings", ratings_path, "ratings.jsonl from extract")->required();
  auto* importance = app.add_subcommand("importance", "Permutation importance of the hybrid forest for --mode");
  importance->add_option("--ratings", ratings_path, "ratings.jsonl from extract")->required();

  auto fit_hybrids = [&](const RunConfig& c, const std::function<void(const HybridResult&)>& each) {
    const auto pairs = require_pairs(c);
    const auto belief_model = fit_belief_model(load_messages(c), c.mode);
    ForestParams params;
    params.n_trees = c.n_trees;
    params.seed = c.seed;
    for (const auto& matrix : load_ratings(ratings_path, pairs))
      each(run_hybrid(matrix, belief_model, rated_pairs(pairs, matrix), params));
  };

  handlers["train"] = [&] {
    const auto c = resolve_config(g);
    std::vector<Prediction> all;
    fit_hybrids(c, [&](const HybridResult& h) {
      const auto& model = h.result.predictions.front().model;
      std::cout << model << ": " << h.result.method << " accuracy " << h.result.accuracy << " per side, "
                << h.result.pairwise_accuracy << " pairwise\n";
      write_text_file(output(c, "forest_" + model + "_" + std::string(to_string(c.mode)) + ".json"),
                      to_json(h.forest).dump() + "\n");
      all.insert(all.end(), h.result.predictions.begin(), h.result.predictions.end());
    });
    save_predictions(output(c, "predictions.jsonl"), all);
    return 0;
  };

  handlers["importance"] = [&] {
    const auto c = resolve_config(g);
    std::string csv = "model,variant,rank,feature,mean_importance,std_importance\n";
    fit_hybrids(c, [&](const HybridResult& h) {
      const auto test = h.design.subset(Split::test);
      const auto report = permutation_importance(h.forest, test.X, test.y, c.n_permutations, c.seed);
      const auto& model = h.result.predictions.front().model;
      std::cout << model << '\n' << report.to_text();
      std::size_t rank = 0;
      for (const auto& f : report.ranked())
        csv += model + "," + std::string(to_string(c.mode)) + "," + std::to_string(++rank) + "," + f.feature + "," +
               std::to_string(f.mean) + "," + std::to_string(f.stddev) + "\n";
    });
    write_text_file(output(c, "importance.csv"), csv);
    return 0;
  };

  auto* agreement = app.add_subcommand("agreement", "Spearman agreement of ratings across models");
  agreement->add_option("--ratings", ratings_path, "ratings.jsonl holding two or more models")->required();
  handlers["agreement"] = [&] {
    const auto c = resolve_config(g);
    const auto table = run_agreement(load_ratings(ratings_path));
    write_text_file(output(c, "agreement.csv"), table.to_csv());
    std::cout << table.to_csv();
    return 0;
  };

  auto* report = app.add_subcommand("report", "Print a report.json as a table");
  std::string report_path;
  report->add_option("report", report_path, "report.json")->required()->check(CLI::ExistingFile);
  handlers["report"] = [&] {
    std::cout << report_from_json(json::parse(read_text_file(report_path))).to_text();
    return 0;
  };

  app.add_subcommand("run", "Run the full pipeline and write every artifact to --out");
  handlers["run"] = [&] {
    const auto c = resolve_config(g);
    const auto r = run_experiment(c, &std::cerr);
    std::cout << r.to_text();
    return 0;
  };

  CLI11_PARSE(app, argc, argv);
  try {
    return handlers.at(app.get_subcommands().front()->get_name())();
  } catch (const AuthenticationError& e) {
    std::cerr << "error: authentication failed (" << e.what() << "); check " << kApiKeyEnv << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
