#include "persuade/extraction.hpp"

#include <algorithm>
#include <optional>

#include "persuade/json_util.hpp"
#include "persuade/parallel.hpp"
#include "persuade/prompts.hpp"
#include "persuade/response_parser.hpp"
#include "persuade/rng.hpp"

namespace persuade {

namespace {

constexpr std::uint64_t kPositionStream = 3;

// Calls `interpret` on the response. A parse failure consumes one attempt and
// the next attempt bypasses the cache. A transport error ends the pair at
// once: the client has already spent its retry budget on it.
template <typename Interpret>
auto attempt_pair(LlmClient& client, const LlmRequest& request, int attempts, Interpret&& interpret,
                  std::string& failure) -> std::optional<decltype(interpret(std::string{}))> {
  for (int attempt = 1; attempt <= std::max(1, attempts); ++attempt) {
    try {
      const auto text = client.complete(request, attempt == 1 ? CacheMode::read_write : CacheMode::refresh);
      return interpret(text);
    } catch (const AuthenticationError&) {
      throw;
    } catch (const ResponseParseError& e) {
      failure = std::string("parse error: ") + e.what() + " (" + std::to_string(attempt) + " attempts)";
    } catch (const TransportError& e) {
      failure = std::string("transport error: ") + e.what();
      break;
    }
  }
  return std::nullopt;
}

void check_failure_rate(std::size_t failures, std::size_t total, double threshold, const std::string& what,
                        const std::map<std::string, std::string>& reasons) {
  if (total == 0) return;
  const double rate = static_cast<double>(failures) / static_cast<double>(total);
  if (rate <= threshold) return;
  std::string summary = what + ": " + std::to_string(failures) + " of " + std::to_string(total) +
                        " pairs failed, above the allowed fraction " + std::to_string(threshold);
  std::size_t shown = 0;
  for (const auto& [id, reason] : reasons) {
    if (shown++ == 3) break;
    summary += "\n  " + id + ": " + reason;
  }
  throw ExtractionAborted(summary);
}

template <typename Result, typename PerPair>
std::vector<std::optional<Result>> run_pairs(std::span<const ThreadPair> pairs, const ExtractionOptions& options,
                                             std::vector<std::string>& failures, PerPair&& per_pair) {
  std::vector<std::optional<Result>> results(pairs.size());
  failures.assign(pairs.size(), {});
  detail::parallel_for(pairs.size(), std::max<std::size_t>(1, options.parallelism),
                       [&](std::size_t i) { results[i] = per_pair(pairs[i], failures[i]); });
  return results;
}

}  // namespace

std::string_view to_string(Side side) noexcept { return side == Side::positive ? "positive" : "negative"; }

Side side_from_string(std::string_view text) {
  if (text == "positive") return Side::positive;
  if (text == "negative") return Side::negative;
  throw std::invalid_argument("invalid side '" + std::string(text) + "'");
}

bool RatingMatrix::has_thread(const std::string& thread_id) const {
  return rows.contains(RowKey{thread_id, Side::positive}) && rows.contains(RowKey{thread_id, Side::negative});
}

bool positive_goes_first(std::uint64_t seed, std::string_view thread_id) noexcept {
  return (derive_seed(seed, {kPositionStream, fnv1a64(thread_id)}) & 1U) != 0;
}

RatingMatrix extract_features(std::span<const ThreadPair> pairs, LlmClient& client, const std::string& model_name,
                              const ExtractionOptions& options) {
  if (pairs.empty()) throw std::invalid_argument("extract_features: no pairs");

  std::vector<std::string> reasons;
  auto results = run_pairs<std::pair<FeatureVector, FeatureVector>>(
      pairs, options, reasons, [&](const ThreadPair& p, std::string& failure) {
        const bool first = positive_goes_first(options.seed, p.id);
        LlmRequest req{model_name,
                       build_rating_prompt(p.op_text, first ? p.positive : p.negative, first ? p.negative : p.positive),
                       kReplicationTemperature, static_cast<std::int64_t>(options.seed)};
        return attempt_pair(client, req, options.attempts_per_pair, parse_rating_response, failure);
      });

  RatingMatrix m;
  m.model_name = model_name;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& id = pairs[i].id;
    const bool first = positive_goes_first(options.seed, id);
    m.positive_first[id] = first;
    if (!results[i]) {
      m.failures[id] = reasons[i];
      continue;
    }
    const auto& [c1, c2] = *results[i];
    m.rows[RowKey{id, Side::positive}] = first ? c1 : c2;
    m.rows[RowKey{id, Side::negative}] = first ? c2 : c1;
  }
  check_failure_rate(m.failures.size(), pairs.size(), options.max_failure_rate, "rating extraction (" + model_name + ")",
                     m.failures);
  return m;
}

ZeroShotResult classify_zeroshot(std::span<const ThreadPair> pairs, LlmClient& client, const std::string& model_name,
                                 const ExtractionOptions& options) {
  if (pairs.empty()) throw std::invalid_argument("classify_zeroshot: no pairs");

  std::vector<std::string> reasons;
  auto results = run_pairs<std::pair<int, int>>(pairs, options, reasons, [&](const ThreadPair& p, std::string& failure) {
    const bool first = positive_goes_first(options.seed, p.id);
    LlmRequest req{model_name,
                   build_zeroshot_prompt(p.op_text, first ? p.positive : p.negative, first ? p.negative : p.positive),
                   kReplicationTemperature, static_cast<std::int64_t>(options.seed)};
    return attempt_pair(client, req, options.attempts_per_pair, parse_zeroshot_response, failure);
  });

  ZeroShotResult out;
  out.model_name = model_name;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& id = pairs[i].id;
    const bool first = positive_goes_first(options.seed, id);
    out.positive_first[id] = first;
    if (!results[i]) {
      out.failures[id] = reasons[i];
      continue;
    }
    const bool picked_comment1 = results[i]->first == 1;
    // comment1 holds the positive reply iff `first`
    out.predicted_positive[id] = picked_comment1 == first ? Side::positive : Side::negative;
  }
  check_failure_rate(out.failures.size(), pairs.size(), options.max_failure_rate, "zero-shot (" + model_name + ")",
                     out.failures);
  return out;
}

void save_ratings(const std::filesystem::path& path, std::span<const RatingMatrix> matrices) {
  std::vector<ordered_json> lines;
  for (const auto& m : matrices) {
    for (const auto& [key, v] : m.rows) {
      ordered_json rec;
      rec["thread_id"] = key.thread_id;
      rec["side"] = std::string(to_string(key.side));
      rec["model"] = m.model_name;
      for (auto f : kFeatures) rec[std::string(feature_name(f))] = v[f];
      lines.push_back(std::move(rec));
    }
  }
  write_jsonl(path, lines);
}

std::vector<RatingMatrix> load_ratings(const std::filesystem::path& path, std::span<const ThreadPair> pairs) {
  std::vector<RatingMatrix> out;
  for (const auto& [line, rec] : read_jsonl(path)) {
    const auto where = path.string() + ": line " + std::to_string(line) + ": ";
    try {
      const auto model = rec.at("model").get<std::string>();
      auto it = std::find_if(out.begin(), out.end(), [&](const RatingMatrix& m) { return m.model_name == model; });
      if (it == out.end()) {
        out.push_back(RatingMatrix{model, {}, {}, {}});
        it = std::prev(out.end());
      }
      FeatureVector v;
      for (auto f : kFeatures) v[f] = rec.at(std::string(feature_name(f))).get<int>();
      v.validate();
      it->rows[RowKey{rec.at("thread_id").get<std::string>(), side_from_string(rec.at("side").get<std::string>())}] = v;
    } catch (const std::exception& e) {
      throw std::runtime_error(where + e.what());
    }
  }
  for (auto& m : out)
    for (const auto& p : pairs)
      if (!m.has_thread(p.id)) m.failures[p.id] = "no ratings in " + path.filename().string();
  return out;
}

}  // namespace persuade
