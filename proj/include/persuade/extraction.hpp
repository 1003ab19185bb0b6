#pragma once

// Per-pair LLM calls over a corpus: feature ratings and zero-shot picks.
//
// Each pair is sent once with the positive reply placed in the comment1 or
// comment2 slot by a seeded coin keyed on the thread id, so assignments do
// not depend on corpus order or parallelism. The assignment is kept so
// answers map back to sides. A pair whose response cannot be used after the
// retry budget is recorded as a failure; the run aborts only when failures
// exceed the configured fraction.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "persuade/corpus.hpp"
#include "persuade/features.hpp"
#include "persuade/llm_client.hpp"

namespace persuade {

enum class Side { positive, negative };

std::string_view to_string(Side side) noexcept;
Side side_from_string(std::string_view text);

struct RowKey {
  std::string thread_id;
  Side side = Side::positive;

  friend auto operator<=>(const RowKey&, const RowKey&) = default;
};

struct RatingMatrix {
  std::string model_name;
  std::map<RowKey, FeatureVector> rows;
  std::map<std::string, std::string> failures;  // thread id -> reason
  std::map<std::string, bool> positive_first;   // thread id -> positive sent as comment1

  bool has_thread(const std::string& thread_id) const;
};

class ExtractionAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExtractionOptions {
  std::uint64_t seed = 42;
  std::size_t parallelism = 1;
  int attempts_per_pair = 3;
  double max_failure_rate = 0.10;
};

bool positive_goes_first(std::uint64_t seed, std::string_view thread_id) noexcept;

// Throws ExtractionAborted when the failure fraction exceeds the threshold and
// rethrows AuthenticationError immediately.
RatingMatrix extract_features(std::span<const ThreadPair> pairs, LlmClient& client, const std::string& model_name,
                              const ExtractionOptions& options = {});

struct ZeroShotResult {
  std::string model_name;
  std::map<std::string, Side> predicted_positive;  // thread id -> side the model picked
  std::map<std::string, std::string> failures;
  std::map<std::string, bool> positive_first;
};

ZeroShotResult classify_zeroshot(std::span<const ThreadPair> pairs, LlmClient& client, const std::string& model_name,
                                 const ExtractionOptions& options = {});

// {thread_id, side, model, influential, ..., attention}, one line per row;
// matrices are written in the given order.
void save_ratings(const std::filesystem::path& path, std::span<const RatingMatrix> matrices);

// Groups rows by model in first-appearance order. Threads listed in `pairs`
// that are missing a side are recorded as failures.
std::vector<RatingMatrix> load_ratings(const std::filesystem::path& path, std::span<const ThreadPair> pairs = {});

}  // namespace persuade
