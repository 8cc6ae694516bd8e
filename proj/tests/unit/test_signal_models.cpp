#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "subnyq/dft.hpp"
#include "subnyq/error.hpp"
#include "subnyq/rng.hpp"
#include "subnyq/signal_models.hpp"

using namespace subnyq;

namespace {

MultibandSpec two_band(BandContent content)
{
  MultibandSpec spec;
  spec.band_count = 2;
  spec.band_width = 100.0;
  spec.f_max = 1000.0;
  spec.carriers = {500.0};
  spec.content = content;
  return spec;
}

}  // namespace

TEST_CASE("grid_length rejects non-integer products", "[signal]")
{
  CHECK(grid_length(100.0, 0.5) == 50);
  CHECK_THROWS_AS(grid_length(100.0, 0.505), Error);
  CHECK_THROWS_AS(grid_length(-1.0, 1.0), Error);
}

TEST_CASE("zero-content multiband signal is identically zero", "[signal]")
{
  const auto x = gen_multiband(two_band(BandContent::zero), 20000.0, 0.1, 1);
  for (const auto& v : x.samples()) CHECK(v == Complex{});
  CHECK(x.real_valued());
}

TEST_CASE("constant I/Q content gives the bare carrier", "[signal]")
{
  const auto x = gen_multiband(two_band(BandContent::constant), 20000.0, 0.1, 1);
  for (std::size_t n = 0; n < x.size(); ++n) CHECK(std::abs(x[n] - std::cos(kTwoPi * 500.0 * x.time(n))) < 1e-12);

  auto q = two_band(BandContent::constant);
  q.constant_i = 0.0;
  q.constant_q = 2.0;
  const auto y = gen_multiband(q, 20000.0, 0.1, 1);
  for (std::size_t n = 0; n < y.size(); ++n) CHECK(std::abs(y[n] - 2.0 * std::sin(kTwoPi * 500.0 * y.time(n))) < 1e-12);
}

TEST_CASE("six-band desk-scale signal keeps its energy inside the declared bands", "[signal]")
{
  MultibandSpec spec;
  spec.band_count = 6;
  spec.band_width = 50e3;
  spec.f_max = 10e6;
  spec.carriers = {1.23e6, 4.56e6, 7.89e6};
  const double duration = 2e-4;
  const double rate = 10 * spec.nyquist_rate();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = gen_multiband(spec, rate, duration, seed);
    const auto coeffs = dft::forward(x.samples());
    double inside = 0.0, total = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      const double f = std::abs(static_cast<double>(dft::signed_bin(k, coeffs.size())) / duration);
      bool in_band = false;
      for (double c : spec.carriers) in_band = in_band || std::abs(f - c) <= spec.band_width / 2;
      const double e = std::norm(coeffs[k]);
      total += e;
      if (in_band) inside += e;
    }
    REQUIRE(total > 0.0);
    CHECK(inside / total >= 1.0 - 1e-9);
  }
}

TEST_CASE("multiband generation validates its inputs", "[signal]")
{
  auto spec = two_band(BandContent::random_gaussian);
  spec.band_count = 4;
  spec.carriers = {500.0, 550.0};
  CHECK_THROWS_AS(gen_multiband(spec, 20000.0, 0.1, 1), Error);  // overlap
  CHECK_THROWS_AS(gen_multiband(two_band(BandContent::zero), 1500.0, 0.1, 1), Error);  // grid below 2 f_max
  CHECK_THROWS_AS(gen_multiband(two_band(BandContent::zero), 20000.0, 0.10001, 1), Error);  // grid length
  auto blind = two_band(BandContent::zero);
  blind.carriers.clear();
  CHECK_NOTHROW(blind.validate());
  CHECK_THROWS_AS(gen_multiband(blind, 20000.0, 0.1, 1), Error);
  CHECK(blind.occupied_measure() == 200.0);
}

TEST_CASE("real multiband signals have conjugate-symmetric spectra", "[signal][property]")
{
  MultibandSpec spec;
  spec.band_count = 4;
  spec.band_width = 40.0;
  spec.f_max = 1000.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    spec.carriers = {100.0 + 10.0 * rng.uniform_int(0, 30), 600.0 + 10.0 * rng.uniform_int(0, 30)};
    const auto x = gen_multiband(spec, 20000.0, 0.1, seed);
    CAPTURE(seed);
    CHECK(x.conjugate_symmetry_defect() <= 1e-10);
    for (const auto& v : x.samples()) REQUIRE(v.imag() == 0.0);
  }
}

TEST_CASE("bandpass generator confines content to the open band", "[signal]")
{
  const double duration = 0.2;
  const auto x = gen_bandpass(600.0, 625.0, 20000.0, duration, 9);
  const auto c = dft::series_coefficients(x.samples());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double f = std::abs(dft::signed_bin(k, c.size()) / duration);
    if (!(f > 600.0 && f < 625.0)) CHECK(std::abs(c[k]) < 1e-12);
  }
  CHECK(x.energy() > 0.0);
}

TEST_CASE("periodic pulse stream matches its Fourier series", "[signal]")
{
  FriSpec spec;
  spec.period = 1.0;
  spec.delays = {0.1, 0.55};
  spec.amplitudes = {1.0, Complex(-0.5, 0.25)};
  spec.pulse = PulseSpectrum::gaussian(0.02);
  const auto x = gen_fri_periodic(spec, 64.0, 3);
  REQUIRE(x.size() == 192);
  for (std::size_t p = 0; p < 64; p += 7) {
    Complex direct{};
    for (long k = -31; k <= 32; ++k) {
      const double w = kTwoPi * k;
      const Complex h = 0.02 * std::sqrt(kTwoPi) * std::exp(-0.5 * 0.02 * 0.02 * w * w);
      direct += h * oracle::dirac_coefficient(spec.delays, spec.amplitudes, 1.0, k) * expj(kTwoPi * k * p / 64.0);
    }
    CHECK(std::abs(x[p] - direct) < 1e-9);
    CHECK(std::abs(x[p + 64] - x[p]) < 1e-12);
    CHECK(std::abs(x[p + 128] - x[p]) < 1e-12);
  }
}

TEST_CASE("pulse stream errors", "[signal]")
{
  FriSpec spec;
  spec.delays = {0.1};
  spec.amplitudes = {1.0};
  CHECK_THROWS_AS(gen_fri_periodic(spec, 10.5, 1), Error);
  spec.pulse = PulseSpectrum("bad", [](double) { return Complex(std::numeric_limits<double>::infinity(), 0.0); });
  CHECK_THROWS_AS(gen_fri_periodic(spec, 16.0, 1), Error);
  spec.pulse = PulseSpectrum::dirac();
  spec.delays = {0.5, 0.2};
  spec.amplitudes = {1.0, 1.0};
  CHECK_THROWS_AS(spec.validate(), Error);
  spec.delays = {0.2, 0.5};
  spec.amplitudes = {1.0, 0.0};
  CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("harmonic spec validation and synthesis", "[signal]")
{
  HarmonicSpec spec{8, {-3, 4}, {1.0, Complex(0, 2)}};
  const auto x = gen_harmonic(spec);
  for (int n = 0; n < 8; ++n)
    CHECK(std::abs(x[n] - (expj(kTwoPi * -3 * n / 8.0) + Complex(0, 2) * expj(kTwoPi * 4 * n / 8.0))) < 1e-12);
  CHECK_THROWS_AS((HarmonicSpec{8, {-4}, {1.0}}.validate()), Error);
  CHECK_THROWS_AS((HarmonicSpec{8, {1, 1}, {1.0, 1.0}}.validate()), Error);
  CHECK_THROWS_AS((HarmonicSpec{8, {1}, {0.0}}.validate()), Error);
  const auto r = random_harmonic(64, 5, 3);
  CHECK(r.active_count() == 5);
  CHECK_NOTHROW(r.validate());
}

TEST_CASE("periodic Shannon interpolation reproduces band-limited signals", "[signal]")
{
  for (int n : {15, 16}) {
    Rng rng(static_cast<std::uint64_t>(n));
    std::vector<std::pair<int, Complex>> tones;
    for (int k = -(n - 1) / 2; k <= (n - 1) / 2; ++k)
      if (2 * std::abs(k) < n) tones.emplace_back(k, rng.complex_normal());
    const double rate = 3.0;
    auto eval = [&](double t) {
      Complex s{};
      for (auto [k, c] : tones) s += c * expj(kTwoPi * k * rate * t / n);
      return s;
    };
    ComplexSeq samples(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) samples[static_cast<std::size_t>(i)] = eval(i / rate);
    std::vector<double> times;
    for (int i = 0; i < 40; ++i) times.push_back(rng.uniform(-2.0, 8.0));
    times.push_back(2.0 / rate);
    const auto out = shannon_interpolate(samples, rate, times);
    for (std::size_t i = 0; i < times.size(); ++i) CHECK(std::abs(out[i] - eval(times[i])) < 1e-10);
  }
}

TEST_CASE("nmse conventions", "[signal]")
{
  const ComplexSeq zero(4), a{1.0, 2.0, 3.0, 4.0};
  ComplexSeq b = a;
  b[0] = 2.0;
  CHECK(nmse(zero, zero) == 0.0);
  CHECK(nmse(a, a) == 0.0);
  CHECK(nmse(a, b) == Catch::Approx(1.0 / 30.0));
  CHECK(std::isinf(nmse(zero, a)));
}

TEST_CASE("multiband synthesis is linear in the band content", "[signal][property]")
{
  MultibandSpec spec;
  spec.band_count = 4;
  spec.band_width = 40.0;
  spec.f_max = 1000.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    spec.carriers = {100.0 + 10.0 * rng.uniform_int(0, 30), 600.0 + 10.0 * rng.uniform_int(0, 30)};
    const auto c1 = draw_band_content(spec, 0.1, 2 * seed);
    const auto c2 = draw_band_content(spec, 0.1, 2 * seed + 1);
    const double alpha = rng.uniform(-3.0, 3.0);
    auto mixed = c1;
    for (std::size_t b = 0; b < mixed.size(); ++b)
      for (std::size_t i = 0; i < mixed[b].in_phase.size(); ++i) {
        mixed[b].in_phase[i] = alpha * c1[b].in_phase[i] + c2[b].in_phase[i];
        mixed[b].quadrature[i] = alpha * c1[b].quadrature[i] + c2[b].quadrature[i];
      }
    const auto x1 = synthesize_multiband(spec, 20000.0, 0.1, c1);
    const auto x2 = synthesize_multiband(spec, 20000.0, 0.1, c2);
    const auto x = synthesize_multiband(spec, 20000.0, 0.1, mixed);
    const auto expect = Complex(alpha, 0.0) * x1 + x2;
    double worst = 0.0, scale = 0.0;
    for (std::size_t p = 0; p < x.size(); ++p) {
      worst = std::max(worst, std::abs(x[p] - expect[p]));
      scale = std::max(scale, std::abs(expect[p]));
    }
    CAPTURE(seed);
    CHECK(worst <= 1e-12 * scale);
  }
}

TEST_CASE("pulse stream energy obeys Parseval", "[signal][property]")
{
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    FriSpec spec;
    spec.period = rng.uniform(0.5, 2.0);
    const int l = 1 + static_cast<int>(seed % 5);
    for (int i = 0; i < l; ++i) spec.delays.push_back(spec.period * (i + rng.uniform(0.1, 0.9)) / l);
    for (int i = 0; i < l; ++i) spec.amplitudes.push_back(rng.uniform(0.5, 1.5) * expj(rng.uniform(0.0, kTwoPi)));
    const int per_period = 16 + 2 * static_cast<int>(seed % 9);
    const int periods = 1 + static_cast<int>(seed % 3);
    const auto x = gen_fri_periodic(spec, per_period / spec.period, periods);
    double sum = 0.0;
    for (long k = -per_period / 2 + 1; k <= per_period / 2; ++k)
      sum += std::norm(oracle::dirac_coefficient(spec.delays, spec.amplitudes, spec.period, k));
    CAPTURE(seed);
    CHECK(std::abs(x.energy() - periods * spec.period * sum) <= 1e-10 * x.energy());
  }
}

TEST_CASE("Shannon interpolation reproduces random band-limited signals", "[signal][property]")
{
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed + 500);
    const int n = 8 + static_cast<int>(seed % 13);
    const double rate = rng.uniform(0.5, 4.0);
    std::vector<std::pair<int, Complex>> tones;
    for (int k = -(n - 1) / 2; k <= (n - 1) / 2; ++k) tones.emplace_back(k, rng.complex_normal());
    auto eval = [&](double t) {
      Complex s{};
      for (auto [k, c] : tones) s += c * expj(kTwoPi * k * rate * t / n);
      return s;
    };
    ComplexSeq samples(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) samples[static_cast<std::size_t>(i)] = eval(i / rate);
    std::vector<double> times;
    ComplexSeq truth;
    for (int i = 0; i < 25; ++i) {
      times.push_back(rng.uniform(-n / rate, 2.0 * n / rate));
      truth.push_back(eval(times.back()));
    }
    CAPTURE(seed, n);
    CHECK(nmse(truth, shannon_interpolate(samples, rate, times)) <= 1e-9);
  }
}
