#pragma once

// Seeded synthetic corpora for demos and tests. Comment text is filler drawn
// from one shared word list, so the words carry no label signal; each reply
// carries a hidden quality marker (see mock_provider.hpp) that is higher for
// the delta-awarded reply.

#include <cstdint>
#include <vector>

#include "persuade/corpus.hpp"

namespace persuade {

struct SyntheticOptions {
  std::size_t n_threads = 40;
  std::size_t negatives_per_thread = 3;
  double test_fraction = 0.25;
  std::size_t truthwins_messages = 120;
  std::size_t raters_per_message = 3;
  std::uint64_t seed = 42;
};

struct SyntheticCorpus {
  std::vector<CmvThread> threads;
  std::vector<TruthWinsRecord> truthwins;
};

SyntheticCorpus make_synthetic_corpus(const SyntheticOptions& options = {});

}  // namespace persuade
