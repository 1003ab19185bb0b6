#include <algorithm>
#include <cctype>

#include "persuade/corpus.hpp"

namespace persuade {

namespace {

bool is_token_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

}  // namespace

std::vector<std::string> tokenize_sequence(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_token_byte(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TokenSet tokenize(std::string_view text) {
  auto seq = tokenize_sequence(text);
  return TokenSet(std::make_move_iterator(seq.begin()), std::make_move_iterator(seq.end()));
}

double jaccard_similarity(const TokenSet& a, const TokenSet& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t shared = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++shared;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(uni);
}

ThreadPair select_contrast_pair(const CmvThread& thread) {
  if (thread.negative_candidates.empty())
    throw DatasetError("record " + thread.id + ": no negative candidates");

  const TokenSet positive_tokens = tokenize(thread.positive);
  std::size_t best = thread.negative_candidates.size();
  double best_score = -1.0;
  for (std::size_t i = 0; i < thread.negative_candidates.size(); ++i) {
    const auto& candidate = thread.negative_candidates[i];
    if (candidate == thread.positive) continue;
    const double score = jaccard_similarity(positive_tokens, tokenize(candidate));
    if (score > best_score) {  // strict: earliest index wins ties
      best_score = score;
      best = i;
    }
  }
  if (best == thread.negative_candidates.size())
    throw DatasetError("record " + thread.id + ": every negative candidate equals the positive reply");

  return ThreadPair{thread.id, thread.op_text, thread.positive,
                    thread.negative_candidates[best], thread.split, best_score};
}

std::vector<ThreadPair> select_contrast_pairs(std::span<const CmvThread> threads) {
  std::vector<ThreadPair> out;
  out.reserve(threads.size());
  for (const auto& t : threads) out.push_back(select_contrast_pair(t));
  return out;
}

}  // namespace persuade
