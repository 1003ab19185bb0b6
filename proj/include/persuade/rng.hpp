#pragma once

// Seeded random streams.
//
// One root seed expands into independent streams by hashing a path of
// integers through splitmix64: derive_seed(root, {tree}) for tree bootstraps,
// derive_seed(root, {feature, repetition}) for permutation shuffles, and so on.
// Streams are std::mt19937_64, whose output sequence is fixed by the standard.
// Bounded integers, reals and normals are drawn by our own helpers rather than
// the <random> distributions, whose algorithms vary between standard libraries.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace persuade {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). Rejection sampling, no modulo bias. n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  // Uniform in [0, 1) with 53 random bits.
  double uniform01();

  double normal(double mean = 0.0, double stddev = 1.0);

  bool coin() { return (next() >> 63) != 0; }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      using std::swap;
      swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace persuade
