#include "persuade/pipeline.hpp"

#include <cstdio>
#include <set>
#include <sstream>

namespace persuade {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  if (value.empty()) return {};
  std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  if (cmv_path.empty()) throw std::invalid_argument("config: cmv path is required");
  if (truthwins_path.empty()) throw std::invalid_argument("config: truthwins path is required");
  if (models.empty()) throw std::invalid_argument("config: at least one model is required");
  if (std::set<std::string>(models.begin(), models.end()).size() != models.size())
    throw std::invalid_argument("config: duplicate model name");
  if (!mock && provider_url.empty()) throw std::invalid_argument("config: provider_url is required without --mock");
  if (parallelism == 0) throw std::invalid_argument("config: parallelism must be positive");
  if (!(max_failure_rate >= 0.0 && max_failure_rate <= 1.0))
    throw std::invalid_argument("config: max_failure_rate must lie in [0, 1]");
  if (requests_per_second < 0.0) throw std::invalid_argument("config: requests_per_second must be >= 0");
  if (n_trees == 0) throw std::invalid_argument("config: n_trees must be positive");
  if (n_permutations < 2) throw std::invalid_argument("config: n_permutations must be at least 2");
  if (cv_folds < 2) throw std::invalid_argument("config: cv_folds must be at least 2");
}

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir) {
  static const std::set<std::string, std::less<>> known = {
      "cmv",     "truthwins",        "provider_url",        "models",  "mock",           "cache",
      "seed",    "mode",             "parallelism",         "out",     "max_failure_rate", "requests_per_second",
      "n_trees", "n_permutations",   "cv_folds",            "prune"};
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw std::invalid_argument("config: unknown key '" + key + "'");

  RunConfig c;
  try {
    if (j.contains("cmv")) c.cmv_path = resolve(base_dir, j["cmv"].get<std::string>());
    if (j.contains("truthwins")) c.truthwins_path = resolve(base_dir, j["truthwins"].get<std::string>());
    if (j.contains("provider_url")) c.provider_url = j["provider_url"].get<std::string>();
    if (j.contains("models")) c.models = j["models"].get<std::vector<std::string>>();
    if (j.contains("mock") && !j["mock"].is_null()) c.mock = mock_mode_from_string(j["mock"].get<std::string>());
    if (j.contains("cache")) c.cache_path = resolve(base_dir, j["cache"].get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("mode")) c.mode = design_mode_from_string(j["mode"].get<std::string>());
    if (j.contains("parallelism")) c.parallelism = j["parallelism"].get<std::size_t>();
    if (j.contains("out")) c.out_dir = resolve(base_dir, j["out"].get<std::string>());
    if (j.contains("max_failure_rate")) c.max_failure_rate = j["max_failure_rate"].get<double>();
    if (j.contains("requests_per_second")) c.requests_per_second = j["requests_per_second"].get<double>();
    if (j.contains("n_trees")) c.n_trees = j["n_trees"].get<std::size_t>();
    if (j.contains("n_permutations")) c.n_permutations = j["n_permutations"].get<std::size_t>();
    if (j.contains("cv_folds")) c.cv_folds = j["cv_folds"].get<std::size_t>();
    if (j.contains("prune")) c.prune = j["prune"].get<bool>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["cmv"] = c.cmv_path.string();
  j["truthwins"] = c.truthwins_path.string();
  j["provider_url"] = c.provider_url;
  j["models"] = c.models;
  j["mock"] = c.mock ? ordered_json(std::string(to_string(*c.mock))) : ordered_json(nullptr);
  j["cache"] = c.cache_path.string();
  j["seed"] = c.seed;
  j["mode"] = std::string(to_string(c.mode));
  j["parallelism"] = c.parallelism;
  j["out"] = c.out_dir.string();
  j["max_failure_rate"] = c.max_failure_rate;
  j["requests_per_second"] = c.requests_per_second;
  j["n_trees"] = c.n_trees;
  j["n_permutations"] = c.n_permutations;
  j["cv_folds"] = c.cv_folds;
  j["prune"] = c.prune;
  return j;
}

ordered_json EvaluationReport::to_json() const {
  ordered_json j;
  j["config"] = config;
  ordered_json models_j = ordered_json::array();
  for (const auto& m : models) {
    ordered_json mj;
    mj["model"] = m.model_name;
    mj["evaluated_threads"] = m.evaluated_threads;
    mj["test_threads"] = m.test_threads;
    mj["failed_threads"] = m.failures.size();
    ordered_json methods_j;
    for (auto name : kMethods) {
      const auto it = m.methods.find(name);
      if (it == m.methods.end()) {
        methods_j[std::string(name)] = nullptr;
        continue;
      }
      methods_j[std::string(name)] = {{"accuracy", it->second.accuracy},
                                      {"pairwise_accuracy", it->second.pairwise_accuracy},
                                      {"test_rows", it->second.test_rows}};
    }
    mj["methods"] = std::move(methods_j);
    if (m.pruned) {
      mj["pruned"] = {{"baseline_accuracy", m.pruned_baseline.value_or(0.0)},
                      {"accuracy", m.pruned->accuracy},
                      {"kept_columns", m.pruned->kept_columns}};
    } else {
      mj["pruned"] = nullptr;
    }
    ordered_json failures_j = ordered_json::object();
    for (const auto& [id, reason] : m.failures) failures_j[id] = reason;
    mj["failures"] = std::move(failures_j);
    models_j.push_back(std::move(mj));
  }
  j["models"] = std::move(models_j);
  j["timestamps"] = {{"started_at", started_at}, {"finished_at", finished_at}};
  return j;
}

EvaluationReport report_from_json(const json& j) {
  EvaluationReport r;
  r.config = j.at("config");
  for (const auto& mj : j.at("models")) {
    ModelReport m;
    m.model_name = mj.at("model").get<std::string>();
    m.evaluated_threads = mj.at("evaluated_threads").get<std::size_t>();
    m.test_threads = mj.at("test_threads").get<std::size_t>();
    for (const auto& [name, v] : mj.at("methods").items()) {
      if (v.is_null()) continue;
      m.methods[name] = MethodSummary{v.at("accuracy").get<double>(), v.at("pairwise_accuracy").get<double>(),
                                      v.at("test_rows").get<std::size_t>()};
    }
    if (const auto& p = mj.at("pruned"); !p.is_null()) {
      m.pruned = PrunedResult{p.at("kept_columns").get<std::vector<std::string>>(), p.at("accuracy").get<double>()};
      m.pruned_baseline = p.at("baseline_accuracy").get<double>();
    }
    for (const auto& [id, reason] : mj.at("failures").items()) m.failures[id] = reason.get<std::string>();
    r.models.push_back(std::move(m));
  }
  r.started_at = j.at("timestamps").at("started_at").get<std::string>();
  r.finished_at = j.at("timestamps").at("finished_at").get<std::string>();
  return r;
}

std::string EvaluationReport::to_text() const {
  std::ostringstream out;
  std::size_t width = 5;
  for (const auto& m : models) width = std::max(width, m.model_name.size());
  char line[512];

  out << "Per-side test accuracy\n";
  std::snprintf(line, sizeof line, "%-*s", static_cast<int>(width), "model");
  out << line;
  for (auto name : kMethods) {
    std::snprintf(line, sizeof line, "  %18s", std::string(name).c_str());
    out << line;
  }
  out << '\n';
  for (const bool pairwise : {false, true}) {
    if (pairwise) out << "\nPairwise test accuracy\n";
    for (const auto& m : models) {
      std::snprintf(line, sizeof line, "%-*s", static_cast<int>(width), m.model_name.c_str());
      out << line;
      for (auto name : kMethods) {
        const auto it = m.methods.find(name);
        const std::string cell =
            it == m.methods.end() ? "-" : percent(pairwise ? it->second.pairwise_accuracy : it->second.accuracy);
        std::snprintf(line, sizeof line, "  %18s", cell.c_str());
        out << line;
      }
      out << '\n';
    }
  }
  out << '\n';
  for (const auto& m : models) {
    out << m.model_name << ": " << m.evaluated_threads << " threads evaluated (" << m.test_threads << " test), "
        << m.failures.size() << " excluded\n";
    if (m.pruned)
      out << "  pruned forest on " << m.pruned->kept_columns.size() << " columns: " << percent(m.pruned->accuracy)
          << " (unpruned " << percent(m.pruned_baseline.value_or(0.0)) << ")\n";
  }
  out << "started " << started_at << ", finished " << finished_at << '\n';
  return out.str();
}

void save_predictions(const std::filesystem::path& path, std::span<const Prediction> predictions) {
  std::vector<ordered_json> lines;
  lines.reserve(predictions.size());
  for (const auto& p : predictions) {
    ordered_json j;
    j["thread_id"] = p.thread_id;
    j["side"] = std::string(to_string(p.side));
    j["method"] = p.method;
    j["model"] = p.model;
    j["score"] = encode_real(p.score);
    j["label"] = p.label;
    lines.push_back(std::move(j));
  }
  write_jsonl(path, lines);
}

std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  std::vector<Prediction> out;
  for (const auto& [line, j] : read_jsonl(path)) {
    try {
      out.push_back(Prediction{j.at("thread_id").get<std::string>(), side_from_string(j.at("side").get<std::string>()),
                               j.at("method").get<std::string>(), j.at("model").get<std::string>(),
                               decode_real(j.at("score")), j.at("label").get<int>()});
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": line " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

void save_zeroshot(const std::filesystem::path& path, std::span<const ZeroShotResult> results) {
  std::vector<ordered_json> lines;
  for (const auto& r : results) {
    for (const auto& [id, side] : r.predicted_positive) {
      ordered_json j;
      j["thread_id"] = id;
      j["model"] = r.model_name;
      j["predicted_positive"] = std::string(to_string(side));
      j["positive_first"] = r.positive_first.at(id);
      lines.push_back(std::move(j));
    }
  }
  write_jsonl(path, lines);
}

}  // namespace persuade
