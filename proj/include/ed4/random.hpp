#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ed4 {

// Seeded random stream. The engine is std::mt19937_64; the mapping from raw
// 64-bit draws to reals and bounded integers is done here rather than through
// <random> distributions, whose output differs between standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p) { return uniform() < p; }
  // Standard normal via Box-Muller; no cached second value.
  double normal();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a over the bytes of `text`, finalised with splitmix64 and mixed with
// `seed`. Stable across platforms and runs.
std::uint64_t stable_hash(std::uint64_t seed, std::string_view text);

// Per-sample stream keyed by (seed, sample id). Independent of processing
// order and of how samples are distributed over workers.
RandomStream derive_stream(std::uint64_t seed, std::string_view sample_id);

}  // namespace ed4
