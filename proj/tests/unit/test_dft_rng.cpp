#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "oracles.hpp"
#include "subnyq/dft.hpp"
#include "subnyq/rng.hpp"

using namespace subnyq;

TEST_CASE("forward DFT matches the naive sum", "[dft]")
{
  for (std::size_t n : {1u, 2u, 7u, 16u, 45u}) {
    Rng rng(n);
    ComplexSeq x(n);
    for (auto& v : x) v = rng.complex_normal();
    const auto fast = dft::forward(x);
    const auto slow = oracle::naive_dft(x);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(fast[k] - slow[k]) < 1e-10);
    const auto back = dft::inverse(fast);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(back[k] - x[k]) < 1e-12);
  }
}

TEST_CASE("series coefficients of a grid tone sit in one bin", "[dft]")
{
  const std::size_t n = 32;
  ComplexSeq x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = 2.0 * expj(kTwoPi * -5.0 * t / n);
  const auto c = dft::series_coefficients(x);
  CHECK(std::abs(c[dft::bin_index(-5, n)] - 2.0) < 1e-12);
  const auto y = dft::synthesize(c);
  for (std::size_t t = 0; t < n; ++t) CHECK(std::abs(y[t] - x[t]) < 1e-12);
}

TEST_CASE("signed bins cover (-N/2, N/2]", "[dft]")
{
  CHECK(dft::signed_bin(0, 8) == 0);
  CHECK(dft::signed_bin(4, 8) == 4);
  CHECK(dft::signed_bin(5, 8) == -3);
  CHECK(dft::signed_bin(3, 7) == 3);
  CHECK(dft::signed_bin(4, 7) == -3);
  for (long q = -20; q <= 20; ++q) CHECK(dft::signed_bin(dft::bin_index(q, 9), 9) == std::remainder(q, 9.0));
}

TEST_CASE("rng streams are deterministic and split", "[rng]")
{
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(trial_seed(7, i));
  CHECK(seeds.size() == 1000);
  CHECK(stream_seed(7, "patterns") != stream_seed(7, "content"));
  CHECK(stream_seed(7, "patterns") == stream_seed(7, "patterns"));
}

TEST_CASE("rng distributions have the advertised moments", "[rng]")
{
  Rng rng(3);
  double mean = 0.0, var = 0.0, cpow = 0.0;
  int plus = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    mean += v;
    var += v * v;
    cpow += std::norm(rng.complex_normal());
    plus += rng.sign() > 0;
    const long k = rng.uniform_int(-3, 3);
    REQUIRE(k >= -3);
    REQUIRE(k <= 3);
  }
  CHECK(std::abs(mean / n) < 0.01);
  CHECK(std::abs(var / n - 1.0) < 0.02);
  CHECK(std::abs(cpow / n - 1.0) < 0.02);
  CHECK(std::abs(plus / double(n) - 0.5) < 0.01);
}
