#include "subnyq/rng.hpp"

#include <cmath>
#include <limits>
#include <string_view>

namespace subnyq {

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial_index)
{
  return splitmix64(seed ^ splitmix64(trial_index + 1));
}

std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream_name)
{
  // FNV-1a over the name, then the same mixing as trial_seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : stream_name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ splitmix64(h));
}

double Rng::uniform()
{
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

long Rng::uniform_int(long lo, long hi)
{
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return lo + static_cast<long>(draw % span);
}

double Rng::normal()
{
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

Complex Rng::complex_normal()
{
  const double re = normal();
  const double im = normal();
  return Complex(re, im) * std::sqrt(0.5);
}

int Rng::sign() { return (engine_() >> 63) ? 1 : -1; }

}  // namespace subnyq
