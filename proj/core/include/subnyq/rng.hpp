#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "subnyq/types.hpp"

namespace subnyq {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed splitting rule for Monte Carlo trials:
///   trial_seed(seed, i) = splitmix64(seed XOR splitmix64(i + 1)).
/// Each trial owns its stream, so trials can run in any order or in parallel.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial_index);

/// Named sub-stream of a seed (e.g. "patterns", "content"); same rule keyed by a string hash.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream_name);

/// Deterministic random source. The distributions are implemented on top of the raw
/// mt19937_64 output so results do not depend on the standard library's distribution code.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  long uniform_int(long lo, long hi);
  /// Standard normal via Box-Muller.
  double normal();
  /// Circular complex Gaussian with unit variance, E|z|^2 = 1.
  Complex complex_normal();
  /// +1 or -1 with equal probability.
  int sign();

private:
  std::mt19937_64 engine_;
};

}  // namespace subnyq
