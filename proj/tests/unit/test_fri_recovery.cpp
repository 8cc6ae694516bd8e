#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "subnyq/error.hpp"
#include "subnyq/fri_recovery.hpp"
#include "subnyq/rng.hpp"

using namespace subnyq;

namespace {

struct Stream {
  std::vector<double> delays;
  ComplexSeq amps;
};

// Sorted delays with circular gaps of at least 0.5 tau / L, amplitudes of modulus in [0.5, 1.5].
Stream random_stream(Rng& rng, int l, double tau)
{
  Stream s;
  const double gap = 0.5 * tau / l;
  for (;;) {
    s.delays.clear();
    for (int i = 0; i < l; ++i) s.delays.push_back(rng.uniform(0.0, tau));
    std::sort(s.delays.begin(), s.delays.end());
    bool ok = true;
    for (int i = 0; i < l; ++i) {
      const double next = (i + 1 < l) ? s.delays[static_cast<std::size_t>(i + 1)] : s.delays[0] + tau;
      ok = ok && (l == 1 || next - s.delays[static_cast<std::size_t>(i)] >= gap);
    }
    if (ok) break;
  }
  s.amps.clear();
  for (int i = 0; i < l; ++i) s.amps.push_back(rng.uniform(0.5, 1.5) * expj(rng.uniform(0.0, kTwoPi)));
  return s;
}

FourierCoeffs exact_coeffs(const Stream& s, double tau, int k_min, int size)
{
  FourierCoeffs x;
  x.k_min = k_min;
  x.period = tau;
  for (int k = k_min; k < k_min + size; ++k) x.values.push_back(oracle::dirac_coefficient(s.delays, s.amps, tau, k));
  return x;
}

double circular_distance(double a, double b, double tau)
{
  const double d = std::fmod(std::abs(a - b), tau);
  return std::min(d, tau - d);
}

// Max delay and amplitude errors after the best cyclic alignment of the two sorted lists.
std::pair<double, double> match(const std::vector<double>& td, const ComplexSeq& ta, const std::vector<double>& ed,
                                const ComplexSeq& ea, double tau)
{
  double best_d = 1e300, best_a = 1e300;
  const std::size_t n = td.size();
  if (ed.size() != n) return {best_d, best_a};
  for (std::size_t r = 0; r < n; ++r) {
    double md = 0.0, ma = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      md = std::max(md, circular_distance(td[i], ed[(i + r) % n], tau));
      ma = std::max(ma, std::abs(ta[i] - ea[(i + r) % n]) / std::abs(ta[i]));
    }
    if (md < best_d) {
      best_d = md;
      best_a = ma;
    }
  }
  return {best_d, best_a};
}

FriSpec spec_of(const Stream& s, double tau)
{
  FriSpec spec;
  spec.period = tau;
  spec.delays = s.delays;
  spec.amplitudes = s.amps;
  return spec;
}

}  // namespace

TEST_CASE("SoS kernel responses", "[fri]")
{
  const double tau = 2.0;
  const auto dir = SosKernel::dirichlet(3, tau);
  for (double t : {-0.9, -0.31, 0.05, 0.4, 0.77}) {
    const double w = kTwoPi * t / tau;
    CHECK(std::abs(sos_time_response(dir, t) - std::sin(3.5 * w) / std::sin(w / 2)) < 1e-12);
  }
  CHECK(std::abs(sos_time_response(dir, 0.0) - 7.0) < 1e-12);
  CHECK(sos_time_response(dir, tau) == Complex{});

  // Frequency samples against Simpson quadrature of the compact time response.
  const SosKernel sos{-2, {1.0, Complex(0.5, 0.5), 2.0, Complex(0.5, -0.5), 1.0}, tau};
  auto quad = [&](double omega) {
    const int n = 4000;
    const double h = tau / n;
    Complex s{};
    for (int i = 0; i <= n; ++i) {
      const double t = -tau / 2 + i * h;
      const double wt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += wt * sos_time_response(sos, t) * expj(-omega * t);
    }
    return s * h / 3.0;
  };
  for (int k = -5; k <= 5; ++k) {
    const Complex g = sos_frequency_response(sos, kTwoPi * k / tau);
    CHECK(std::abs(g - quad(kTwoPi * k / tau)) < 1e-9);
    const Complex expect = (k >= -2 && k <= 2) ? tau * sos.weight(k) : Complex{};
    CHECK(std::abs(g - expect) < 1e-12);
    CHECK(std::abs(kernel_lattice_response(sos, k) - expect) < 1e-12);
  }
  CHECK(std::abs(sos_frequency_response(sos, 1.3) - quad(1.3)) < 1e-9);
  CHECK(sos.real_valued());
  CHECK_FALSE((SosKernel{-1, {1.0, 1.0, Complex(0, 1)}, 1.0}.real_valued()));
  CHECK_THROWS_AS((SosKernel{-1, {1.0, 0.0, 1.0}, 1.0}.validate()), Error);
}

TEST_CASE("kernel admissibility", "[fri]")
{
  const auto dirac = PulseSpectrum::dirac();
  CHECK(kernel_admissible(LowpassKernel::symmetric(3, 1.0), dirac, 3).admissible);
  CHECK_FALSE(kernel_admissible(LowpassKernel::symmetric(3, 1.0), dirac, 4).admissible);

  const PulseSpectrum notched("notched", [](double w) {
    return Complex(std::exp(-1e-3 * w * w) * (w - kTwoPi * 2.0), 0.0);
  });
  const auto bad = kernel_admissible(LowpassKernel::symmetric(3, 1.0), notched);
  CHECK_FALSE(bad.admissible);
  REQUIRE(bad.failing_index);
  CHECK(*bad.failing_index == 2);
  CHECK(bad.diagnostics.find("k = 2") != std::string::npos);

  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    ComplexSeq b;
    for (int i = 0; i < 7; ++i) b.push_back(rng.complex_normal());
    CHECK(kernel_admissible(SosKernel{-3, b, 1.5}, dirac, 3).admissible);
  }
}

TEST_CASE("Fourier coefficients from kernel samples", "[fri]")
{
  const auto lp = LowpassKernel::symmetric(3, 1.0);
  for (const auto& v : coeffs_from_samples(ComplexSeq(7), lp).values) CHECK(v == Complex{});

  FriSpec single;
  single.delays = {0.0};
  single.amplitudes = {1.0};
  const auto x1 = gen_fri_periodic(single, 64.0, 1);
  const auto c1 = coeffs_from_samples(kernel_sample(x1, lp), lp);
  for (int k = -3; k <= 3; ++k) CHECK(std::abs(c1[k] - 1.0) < 1e-12);

  Rng rng(12);
  const Stream s = random_stream(rng, 3, 1.0);
  const auto x = gen_fri_periodic(spec_of(s, 1.0), 64.0, 1);
  for (const SamplingKernel kernel : {SamplingKernel(lp), SamplingKernel(SosKernel::dirichlet(3, 1.0))}) {
    const auto c = coeffs_from_samples(kernel_sample(x, kernel), kernel);
    for (int k = -3; k <= 3; ++k) CHECK(std::abs(c[k] - oracle::dirac_coefficient(s.delays, s.amps, 1.0, k)) < 1e-8);
  }
  CHECK_THROWS_AS(coeffs_from_samples(ComplexSeq(6), lp), Error);
}

TEST_CASE("annihilating filter", "[fri]")
{
  const double t1 = 0.3;
  const Stream one{{t1}, {Complex(0.7, -0.2)}};
  const auto a = annihilating_filter(exact_coeffs(one, 1.0, -1, 3), 1);
  REQUIRE(a.size() == 2);
  CHECK(std::abs(a[0] - 1.0) < 1e-12);
  CHECK(std::abs(a[1] + expj(-kTwoPi * t1)) < 1e-12);

  FourierCoeffs zero{-2, ComplexSeq(5), 1.0};
  try {
    annihilating_filter(zero, 2);
    FAIL("zero coefficients accepted");
  } catch (const Error& e) {
    CHECK(e.stage() == Stage::fri_annihilation);
  }
  CHECK_THROWS_AS(annihilating_filter(exact_coeffs(one, 1.0, -1, 3), 2), Error);

  const Stream two{{0.2, 0.7}, {1.0, 2.0}};
  const auto x = exact_coeffs(two, 1.0, -2, 5);
  const auto filt = annihilating_filter(x, 2);
  for (int k = x.k_min + 2; k <= x.k_max(); ++k) {
    Complex conv{};
    for (int i = 0; i <= 2; ++i) conv += filt[static_cast<std::size_t>(i)] * x[k - i];
    CHECK(std::abs(conv) <= 1e-10);
  }
}

TEST_CASE("delays from filter roots", "[fri]")
{
  const ComplexSeq unit{1.0, -1.0};
  CHECK(delays_from_filter(unit, 1.0).delays == std::vector<double>{0.0});
  const ComplexSeq half{1.0, -expj(-kPi)};
  CHECK(delays_from_filter(half, 3.0).delays[0] == Catch::Approx(1.5));
  CHECK_THROWS_AS(delays_from_filter(ComplexSeq{1.0, -2.0, 1.0}, 1.0), Error);  // double root at 1

  Rng rng(55);
  const Stream s = random_stream(rng, 5, 2.0);
  const auto est = delays_from_filter(annihilating_filter(exact_coeffs(s, 2.0, -5, 11), 5), 2.0);
  REQUIRE(est.delays.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(est.delays[i] - s.delays[i]) <= 1e-9 * 2.0);
}

TEST_CASE("amplitudes from delays", "[fri]")
{
  const auto dirac = PulseSpectrum::dirac();
  const Stream one{{0.4}, {Complex(-1.2, 0.3)}};
  const auto a = amplitudes_from_delays(exact_coeffs(one, 1.0, -1, 3), one.delays, dirac);
  CHECK(std::abs(a[0] - one.amps[0]) < 1e-13);

  const auto z = amplitudes_from_delays(FourierCoeffs{-2, ComplexSeq(5), 1.0}, std::vector<double>{0.1, 0.6}, dirac);
  for (const auto& v : z) CHECK(std::abs(v) < 1e-15);

  Rng rng(8);
  const Stream s = random_stream(rng, 4, 1.0);
  const auto got = amplitudes_from_delays(exact_coeffs(s, 1.0, -4, 9), s.delays, dirac);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(got[i] - s.amps[i]) <= 1e-9 * std::abs(s.amps[i]));

  CHECK_THROWS_AS(amplitudes_from_delays(exact_coeffs(s, 1.0, -4, 9), std::vector<double>{0.2, 0.2}, dirac), Error);
}

TEST_CASE("FRI round trip at the critical rate", "[fri]")
{
  Rng rng(2024);
  for (int l = 1; l <= 10; ++l) {
    const Stream s = random_stream(rng, l, 1.0);
    const auto x = gen_fri_periodic(spec_of(s, 1.0), 64.0, 1);
    const LowpassKernel lp = LowpassKernel::symmetric(l, 1.0);
    const auto est = fri_recover(kernel_sample(x, lp), lp, l, PulseSpectrum::dirac());
    const auto [de, ae] = match(s.delays, s.amps, est.delays, est.amplitudes, 1.0);
    CAPTURE(l);
    CHECK(de <= 1e-6);
    CHECK(ae <= 1e-6);

    const SosKernel sos = SosKernel::dirichlet(l, 1.0);
    const auto est2 = fri_recover(kernel_sample(x, sos), sos, l, PulseSpectrum::dirac());
    for (std::size_t i = 0; i < est.delays.size(); ++i) {
      CHECK(std::abs(est.delays[i] - est2.delays[i]) <= 1e-8);
      CHECK(std::abs(est.amplitudes[i] - est2.amplitudes[i]) <= 1e-8);
    }
  }

  try {
    fri_recover(ComplexSeq(7), LowpassKernel::symmetric(3, 1.0), 3, PulseSpectrum::dirac());
    FAIL("zero samples accepted");
  } catch (const Error& e) {
    CHECK(e.stage() == Stage::fri_annihilation);
    CHECK(e.tag() == "fri_annihilation/numerical");
  }
}

TEST_CASE("non-Dirac pulses are divided out before annihilation", "[fri]")
{
  Rng rng(77);
  const Stream s = random_stream(rng, 4, 1.0);
  FriSpec spec = spec_of(s, 1.0);
  spec.pulse = PulseSpectrum::gaussian(0.02);
  const auto x = gen_fri_periodic(spec, 64.0, 1);
  const SosKernel sos = SosKernel::dirichlet(4, 1.0);
  REQUIRE(kernel_admissible(sos, spec.pulse, 4));
  const auto est = fri_recover(kernel_sample(x, sos), sos, 4, spec.pulse);
  const auto [de, ae] = match(s.delays, s.amps, est.delays, est.amplitudes, 1.0);
  CHECK(de <= 1e-6);
  CHECK(ae <= 1e-6);
}

TEST_CASE("annihilation identity on exact coefficients", "[fri][property]")
{
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const int l = 1 + static_cast<int>(seed % 6);
    const int extra = static_cast<int>(seed % 3);
    const Stream s = random_stream(rng, l, 1.0);
    const auto x = exact_coeffs(s, 1.0, -l - extra, 2 * (l + extra) + 1);
    const auto a = annihilating_filter(x, l);
    double worst = 0.0;
    for (int k = x.k_min + l; k <= x.k_max(); ++k) {
      Complex conv{};
      for (int i = 0; i <= l; ++i) conv += a[static_cast<std::size_t>(i)] * x[k - i];
      worst = std::max(worst, std::abs(conv));
    }
    CAPTURE(seed);
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("FRI recovery is covariant under time shifts", "[fri][property]")
{
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed + 100);
    const int l = 1 + static_cast<int>(seed % 5);
    const Stream s = random_stream(rng, l, 1.0);
    const double delta = rng.uniform(0.0, 1.0);
    const LowpassKernel lp = LowpassKernel::symmetric(l, 1.0);
    const auto base = fri_recover(kernel_sample(gen_fri_periodic(spec_of(s, 1.0), 64.0, 1), lp), lp, l,
                                  PulseSpectrum::dirac());

    // Shifted stream: delays move by delta (mod 1), the pairs are re-sorted.
    std::vector<std::pair<double, Complex>> pairs;
    for (int i = 0; i < l; ++i) pairs.emplace_back(std::fmod(s.delays[i] + delta, 1.0), s.amps[i]);
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Stream shifted;
    for (const auto& [t, a] : pairs) {
      shifted.delays.push_back(t);
      shifted.amps.push_back(a);
    }
    const auto moved = fri_recover(kernel_sample(gen_fri_periodic(spec_of(shifted, 1.0), 64.0, 1), lp), lp, l,
                                   PulseSpectrum::dirac());
    std::vector<double> expect;
    for (double t : base.delays) expect.push_back(std::fmod(t + delta, 1.0));
    const auto [de, ae] = match(expect, base.amplitudes, moved.delays, moved.amplitudes, 1.0);
    CAPTURE(seed);
    CHECK(de <= 1e-8);
    CHECK(ae <= 1e-8);
  }
}

TEST_CASE("FRI amplitudes scale with the input", "[fri][property]")
{
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed + 200);
    const int l = 1 + static_cast<int>(seed % 5);
    const Stream s = random_stream(rng, l, 1.0);
    const Complex alpha = rng.complex_normal() * std::pow(10.0, rng.uniform(-3.0, 3.0));
    const SosKernel sos = SosKernel::dirichlet(l, 1.0);
    auto x = gen_fri_periodic(spec_of(s, 1.0), 64.0, 1);
    const auto base = fri_recover(kernel_sample(x, sos), sos, l, PulseSpectrum::dirac());
    x *= alpha;
    const auto scaled = fri_recover(kernel_sample(x, sos), sos, l, PulseSpectrum::dirac());
    CAPTURE(seed);
    REQUIRE(scaled.delays.size() == base.delays.size());
    for (std::size_t i = 0; i < base.delays.size(); ++i) {
      CHECK(std::abs(scaled.delays[i] - base.delays[i]) <= 1e-9);
      CHECK(std::abs(scaled.amplitudes[i] - alpha * base.amplitudes[i]) <= 1e-8 * std::abs(alpha * base.amplitudes[i]));
    }
  }
}

TEST_CASE("annihilating roots lie on the unit circle", "[fri][property]")
{
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed + 300);
    const int l = 1 + static_cast<int>(seed % 8);
    const Stream s = random_stream(rng, l, 1.0);
    const auto est = delays_from_filter(annihilating_filter(exact_coeffs(s, 1.0, -l, 2 * l + 1), l), 1.0);
    CAPTURE(seed);
    for (double m : est.root_magnitudes) CHECK(std::abs(m - 1.0) <= 1e-6);
  }
}

TEST_CASE("2L + 1 samples per period suffice", "[fri][property]")
{
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed + 400);
    const int l = 1 + static_cast<int>(seed % 8);
    const double tau = rng.uniform(0.5, 3.0);
    const Stream s = random_stream(rng, l, tau);
    const SosKernel sos = SosKernel::dirichlet(l, tau);
    REQUIRE(sos.real_valued());
    const auto x = gen_fri_periodic(spec_of(s, tau), 64.0 / tau, 1);
    const auto samples = kernel_sample(x, sos);
    REQUIRE(static_cast<int>(samples.size()) == 2 * l + 1);
    const auto est = fri_recover(samples, sos, l, PulseSpectrum::dirac());
    const auto [de, ae] = match(s.delays, s.amps, est.delays, est.amplitudes, tau);
    CAPTURE(seed, l, tau);
    CHECK(de <= 1e-6 * tau);
    CHECK(ae <= 1e-6);
  }
}
