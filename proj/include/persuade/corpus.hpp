#pragma once

// Loading, validation and pairing of the two datasets.
//
// Change My View threads arrive either raw (a delta-awarded reply plus every
// non-awarded root reply) or pre-paired. Raw threads are reduced to a single
// contrast pair by picking the non-awarded reply whose token set is closest to
// the awarded one under Jaccard similarity.
//
// Truth Wins rows carry one rater's judgements of one message; they are
// averaged per message before regression.

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "persuade/features.hpp"

namespace persuade {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Split { train, test };

std::string_view to_string(Split split) noexcept;
Split split_from_string(std::string_view text);  // throws DatasetError

struct CmvThread {
  std::string id;
  std::string op_text;
  std::string positive;
  std::vector<std::string> negative_candidates;
  Split split = Split::train;
  // Set when the record came in the paired format.
  bool pre_paired = false;
};

struct ThreadPair {
  std::string id;
  std::string op_text;
  std::string positive;
  std::string negative;
  Split split = Split::train;
  double pair_similarity = 0.0;
};

using TokenSet = std::set<std::string, std::less<>>;

// Lowercased maximal runs of token characters, in order, duplicates kept.
// Token characters are ASCII letters and digits plus any byte >= 0x80, so
// UTF-8 words survive intact.
std::vector<std::string> tokenize_sequence(std::string_view text);

TokenSet tokenize(std::string_view text);

// |a ∩ b| / |a ∪ b|; 1.0 when both are empty.
double jaccard_similarity(const TokenSet& a, const TokenSet& b);

// Throws DatasetError when the thread has no usable candidate.
ThreadPair select_contrast_pair(const CmvThread& thread);
std::vector<ThreadPair> select_contrast_pairs(std::span<const CmvThread> threads);

using WarningSink = std::function<void(std::string_view)>;
void warn_to_stderr(std::string_view message);

inline constexpr std::size_t kReferenceTrainThreads = 3456;
inline constexpr std::size_t kReferenceTestThreads = 807;

// Accepts raw and paired lines in the same file. Warns, without failing, when
// the split sizes differ from the reference 3456/807.
std::vector<CmvThread> load_cmv_dataset(const std::filesystem::path& path,
                                        const WarningSink& warn = warn_to_stderr);
void save_cmv_dataset(const std::filesystem::path& path, std::span<const CmvThread> threads);
void save_pairs(const std::filesystem::path& path, std::span<const ThreadPair> pairs);

struct TruthWinsRecord {
  std::string message_id;
  std::string rater_id;
  double belief_update = 0.0;
  std::array<int, kFeatureCount> ratings{};  // indexed by Feature

  int rating(Feature f) const noexcept { return ratings[index_of(f)]; }
  friend bool operator==(const TruthWinsRecord&, const TruthWinsRecord&) = default;
};

struct TruthWinsMessage {
  std::string message_id;
  double mean_belief_update = 0.0;
  std::array<double, kFeatureCount> mean_ratings{};  // indexed by Feature
  std::size_t rater_count = 0;

  double mean(Feature f) const noexcept { return mean_ratings[index_of(f)]; }
};

std::vector<TruthWinsRecord> load_truthwins(const std::filesystem::path& path);
void save_truthwins(const std::filesystem::path& path, std::span<const TruthWinsRecord> records);

// One message per distinct message_id, in order of first appearance.
std::vector<TruthWinsMessage> aggregate_messages(std::span<const TruthWinsRecord> records);

}  // namespace persuade
