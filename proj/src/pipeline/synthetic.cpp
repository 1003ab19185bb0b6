#include "persuade/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "persuade/mock_provider.hpp"
#include "persuade/rng.hpp"

namespace persuade {

namespace {

constexpr std::array<std::string_view, 48> kFiller = {
    "people",  "policy",   "reason",  "because", "market",  "school",   "city",     "history", "value",
    "family",  "system",   "money",   "health",  "future",  "public",   "society",  "choice",  "evidence",
    "moral",   "freedom",  "work",    "culture", "science", "risk",     "benefit",  "cost",    "law",
    "country", "change",   "view",    "example", "problem", "solution", "argument", "fact",    "opinion",
    "trust",   "media",    "economy", "power",   "energy",  "nature",   "growth",   "data",    "impact",
    "debate",  "standard", "common"};

std::string filler(Rng& rng, std::size_t min_words, std::size_t max_words) {
  const std::size_t n = min_words + rng.uniform_index(max_words - min_words + 1);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += kFiller[rng.uniform_index(kFiller.size())];
  }
  return out;
}

// Tenths in [lo, hi].
double quality(Rng& rng, int lo, int hi) {
  return static_cast<double>(lo + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(hi - lo + 1)))) / 10.0;
}

int likert(double x) { return std::clamp(static_cast<int>(std::lround(x)), kLikertMin, kLikertMax); }

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& options) {
  if (options.n_threads < 2) throw std::invalid_argument("synthetic corpus: need at least two threads");
  if (options.negatives_per_thread == 0) throw std::invalid_argument("synthetic corpus: need a negative reply");
  if (!(options.test_fraction > 0.0 && options.test_fraction < 1.0))
    throw std::invalid_argument("synthetic corpus: test_fraction must lie in (0, 1)");

  SyntheticCorpus out;
  Rng rng(derive_seed(options.seed, {1}));

  std::vector<std::size_t> order(options.n_threads);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_test = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(options.test_fraction * static_cast<double>(options.n_threads))));
  std::vector<bool> is_test(options.n_threads, false);
  for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;

  for (std::size_t t = 0; t < options.n_threads; ++t) {
    CmvThread thread;
    char id[32];
    std::snprintf(id, sizeof id, "t%04zu", t + 1);
    thread.id = id;
    thread.op_text = filler(rng, 20, 40);
    thread.positive = filler(rng, 15, 30) + " " + quality_marker(quality(rng, 6, 10));
    for (std::size_t k = 0; k < options.negatives_per_thread; ++k)
      thread.negative_candidates.push_back(filler(rng, 15, 30) + " " + quality_marker(quality(rng, 0, 4)));
    thread.split = is_test[t] ? Split::test : Split::train;
    out.threads.push_back(std::move(thread));
  }

  // Raters share a latent message quality on the quality-tracking features;
  // belief update rises with interesting and shareable.
  for (std::size_t m = 0; m < options.truthwins_messages; ++m) {
    const double q = rng.uniform01();
    char id[32];
    std::snprintf(id, sizeof id, "m%04zu", m + 1);
    for (std::size_t r = 0; r < options.raters_per_message; ++r) {
      TruthWinsRecord rec;
      rec.message_id = id;
      rec.rater_id = "r" + std::to_string(r + 1);
      for (auto f : kFeatures) {
        const bool tracks = f == Feature::influential || f == Feature::interesting ||
                            f == Feature::interesting_if_true || f == Feature::shareable || f == Feature::attention;
        rec.ratings[index_of(f)] =
            tracks ? likert(1.0 + 4.0 * q + 0.7 * rng.normal()) : 1 + static_cast<int>(rng.uniform_index(5));
      }
      const double belief = 12.0 * (rec.rating(Feature::interesting) - 3) +
                            8.0 * (rec.rating(Feature::shareable) - 3) + 10.0 * rng.normal();
      rec.belief_update = std::clamp(std::round(belief), kBeliefMin, kBeliefMax);
      out.truthwins.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace persuade
