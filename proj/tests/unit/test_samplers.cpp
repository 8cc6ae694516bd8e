#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "subnyq/dft.hpp"
#include "subnyq/error.hpp"
#include "subnyq/rng.hpp"
#include "subnyq/samplers.hpp"

using namespace subnyq;

namespace {

DenseSignal tone(double freq, double grid_rate, double duration, bool real)
{
  const std::size_t n = grid_length(grid_rate, duration);
  ComplexSeq s(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double t = static_cast<double>(p) / grid_rate;
    s[p] = real ? Complex(std::cos(kTwoPi * freq * t), 0.0) : expj(kTwoPi * freq * t);
  }
  return DenseSignal(std::move(s), grid_rate, real);
}

// Small MWC used by the property tests: f_p = f_s = 1 kHz, M = 31, m = 12, T = 21.
MwcConfig small_mwc(std::uint64_t seed)
{
  MwcConfig cfg;
  cfg.channels = 12;
  cfg.chips_per_period = 31;
  cfg.aliasing_rate = 1e3;
  cfg.channel_rate = 1e3;
  cfg.sign_patterns = random_sign_patterns(cfg.channels, cfg.chips_per_period, seed);
  return cfg;
}

constexpr double kSmallDuration = 0.021;
constexpr double kSmallGrid = 310e3;

// Random complex content on every DFT bin up to L f_p.
DenseSignal random_band_limited(std::uint64_t seed, double grid_rate, double duration, double f_max)
{
  Rng rng(seed);
  const std::size_t n = grid_length(grid_rate, duration);
  ComplexSeq c(n);
  const long q_max = static_cast<long>(std::floor(f_max * duration + 1e-9));
  for (long q = -q_max; q <= q_max; ++q) c[dft::bin_index(q, n)] = rng.complex_normal();
  return DenseSignal(dft::synthesize(c), grid_rate, false);
}

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("undersampling rate intervals", "[samplers]")
{
  const auto box = undersample_valid_rates(600e6, 625e6);
  REQUIRE(box.front().k == 25);
  CHECK(box.front().lo == Catch::Approx(50e6).epsilon(1e-14));
  CHECK(box.front().hi == Catch::Approx(50e6).epsilon(1e-14));
  CHECK(box.front().contains(50e6));
  CHECK(box.back().k == 1);
  CHECK(box.back().unbounded);

  const double b = 7.0;
  const auto integer = undersample_valid_rates(3 * b, 4 * b);
  REQUIRE(integer.front().k == 4);
  CHECK(integer.front().lo == Catch::Approx(2 * b));
  CHECK(integer.front().hi == Catch::Approx(2 * b));

  const auto only = undersample_valid_rates(10.0, 35.0);
  REQUIRE(only.size() == 1);
  CHECK(only[0].k == 1);
  CHECK(only[0].lo == 70.0);
  CHECK(only[0].unbounded);
  CHECK(only[0].contains(1e9));

  for (std::size_t i = 1; i < box.size(); ++i) CHECK(box[i].k < box[i - 1].k);
  CHECK_THROWS_AS(undersample_valid_rates(35.0, 10.0), Error);
  CHECK_THROWS_AS(undersample_valid_rates(10.0, 10.0), Error);
}

TEST_CASE("rates inside valid intervals never alias the band onto itself", "[samplers][property]")
{
  Rng rng(17);
  int invalid_checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double f_l = rng.uniform(1.0, 100.0);
    const double f_u = f_l + rng.uniform(0.5, 40.0);
    const auto ivs = undersample_valid_rates(f_l, f_u);
    for (const auto& iv : ivs) {
      const double hi = iv.unbounded ? 3.0 * iv.lo : iv.hi;
      for (double u : {0.0, 0.5, 1.0}) {
        const double fs = iv.lo + u * (hi - iv.lo);
        CAPTURE(f_l, f_u, iv.k, fs);
        CHECK_FALSE(oracle::aliases_overlap(f_l, f_u, fs));
      }
    }
    // A rate in the gap between two intervals must alias.
    if (ivs.size() >= 2 && !ivs[1].unbounded && ivs[1].lo - ivs[0].hi > 1e-6 * f_u) {
      const double gap = 0.5 * (ivs[0].hi + ivs[1].lo);
      CHECK(oracle::aliases_overlap(f_l, f_u, gap));
      ++invalid_checked;
    }
  }
  CHECK(invalid_checked > 10);
}

TEST_CASE("T/H lowpass model", "[samplers]")
{
  const auto low = tone(100.0, 10e3, 0.1, true);
  const auto passed = th_sample(low, 1000.0, ThModel{200.0});
  REQUIRE(passed.size() == 100);
  for (std::size_t n = 0; n < passed.size(); ++n) CHECK(std::abs(passed[n] - low[10 * n]) < 1e-12);

  const auto high = tone(300.0, 10e3, 0.1, true);
  for (const auto& v : th_sample(high, 1000.0, ThModel{200.0})) CHECK(std::abs(v) < 1e-12);

  // A 600-625 Hz band undersampled at 50 Hz aliases to baseband only without the T/H limit.
  const auto band = gen_bandpass(600.0, 625.0, 10e3, 0.2, 3);
  const auto limited = th_sample(band, 50.0, ThModel{100.0});
  const auto ideal = th_sample(band, 50.0, std::nullopt);
  double lim = 0.0, idl = 0.0;
  for (std::size_t n = 0; n < ideal.size(); ++n) {
    lim = std::max(lim, std::abs(limited[n]));
    idl = std::max(idl, std::abs(ideal[n]));
  }
  CHECK(lim < 1e-12);
  CHECK(idl > 1e-3);

  CHECK_THROWS_AS(th_sample(low, 3000.0, std::nullopt), Error);
  CHECK_THROWS_AS(th_sample(low, 1000.0, ThModel{0.0}), Error);
}

TEST_CASE("PNS pointwise reads", "[samplers]")
{
  const auto x = tone(37.0, 1000.0, 1.0, false);
  const auto single = pns_sample(x, PnsConfig{0.01, {0.0}});
  REQUIRE(single.size() == 1);
  REQUIRE(single[0].size() == 100);
  for (std::size_t n = 0; n < 100; ++n) CHECK(single[0][n] == x[10 * n]);

  const DenseSignal c(ComplexSeq(1000, Complex(2.5, 0.0)), 1000.0, true);
  const auto consts = pns_sample(c, PnsConfig{0.01, {0.0, 0.003}});
  for (const auto& ch : consts)
    for (const auto& v : ch) CHECK(v == Complex(2.5, 0.0));

  const double phi = 0.003;
  const auto two = pns_sample(x, PnsConfig{0.01, {0.0, phi}});
  for (std::size_t n = 0; n < 100; ++n) CHECK(std::abs(two[1][n] - two[0][n] * expj(kTwoPi * 37.0 * phi)) < 1e-12);

  CHECK_THROWS_AS(pns_sample(x, PnsConfig{0.01, {0.0, 0.0035}}), Error);  // off grid
  CHECK_THROWS_AS((PnsConfig{0.01, {0.0, 0.0}}.validate()), Error);
  CHECK_THROWS_AS((PnsConfig{0.01, {0.0, 0.01}}.validate()), Error);
  CHECK_THROWS_AS((PnsConfig{0.0, {0.0}}.validate()), Error);
}

TEST_CASE("MWC sensing matrix closed form", "[samplers]")
{
  MwcConfig cfg;
  cfg.channels = 2;
  cfg.chips_per_period = 9;
  cfg.aliasing_rate = cfg.channel_rate = 1.0;
  cfg.sign_patterns = {std::vector<int>(9, 1), {1, -1, -1, 1, 1, 1, -1, 1, -1}};
  const CMatrix c = mwc_matrix(cfg);
  REQUIRE(c.rows() == 2);
  REQUIRE(c.cols() == 9);
  for (int j = 0; j < 9; ++j) CHECK(std::abs(c(0, j) - (j == 4 ? Complex(1.0) : Complex())) < 1e-15);
  CHECK(std::abs(c(1, 4) - 1.0 / 9.0) < 1e-15);

  cfg.sign_patterns = random_sign_patterns(6, 9, 5);
  cfg.channels = 6;
  const CMatrix exact = mwc_matrix(cfg);
  const CMatrix quad = oracle::mwc_matrix_simpson(cfg, 101);
  CHECK((exact - quad).cwiseAbs().maxCoeff() < 1e-8);

  auto bad = cfg;
  bad.chips_per_period = 8;
  CHECK_THROWS_AS(mwc_matrix(bad), Error);
  bad = cfg;
  bad.sign_patterns[0].pop_back();
  CHECK_THROWS_AS(mwc_matrix(bad), Error);
  bad = cfg;
  bad.sign_patterns[0][0] = 0;
  CHECK_THROWS_AS(mwc_matrix(bad), Error);
}

TEST_CASE("MWC matrix columns are conjugate symmetric", "[samplers][property]")
{
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    MwcConfig cfg;
    cfg.chips_per_period = 2 * static_cast<int>(seed % 20) + 3;
    cfg.channels = 4;
    cfg.aliasing_rate = cfg.channel_rate = 1.0;
    cfg.sign_patterns = random_sign_patterns(cfg.channels, cfg.chips_per_period, seed);
    const CMatrix c = mwc_matrix(cfg);
    const int half = cfg.harmonic_limit();
    for (int l = 1; l <= half; ++l)
      CHECK((c.col(half - l) - c.col(half + l).conjugate()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("MWC sampling examples", "[samplers]")
{
  const auto cfg = small_mwc(1);
  const MwcSimulator sim(cfg, kSmallGrid, kSmallDuration);
  REQUIRE(sim.samples_per_channel() == 21);

  const auto zero = DenseSignal::zeros(kSmallGrid, kSmallDuration);
  CHECK(max_abs(sim.sample(zero)) == 0.0);

  const auto x1 = random_band_limited(1, kSmallGrid, kSmallDuration, 15e3);
  const auto x2 = random_band_limited(2, kSmallGrid, kSmallDuration, 15e3);
  const CMatrix sum = sim.sample(x1 + x2);
  const CMatrix parts = sim.sample(x1) + sim.sample(x2);
  CHECK(max_abs(sum - parts) <= 1e-12 * max_abs(sum));

  // A tone at -l0 f_p + f0 lands in slice l0, scaled by C_{i, l0}.
  const CMatrix c = mwc_matrix(cfg);
  const double f0 = 200.0 / 2.1;  // 2 bins at 1/T resolution
  for (int l0 : {-15, -4, 0, 7, 15}) {
    const auto x = tone(-l0 * cfg.aliasing_rate + f0, kSmallGrid, kSmallDuration, false);
    const CMatrix y = sim.sample(x);
    double worst = 0.0;
    for (int i = 0; i < cfg.channels; ++i)
      for (int n = 0; n < 21; ++n) {
        const Complex expect = c(i, l0 + 15) * expj(kTwoPi * f0 * n / cfg.channel_rate);
        worst = std::max(worst, std::abs(y(i, n) - expect) / c.row(i).cwiseAbs().maxCoeff());
      }
    CAPTURE(l0);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("MWC sampling equals C times the slice sequences", "[samplers][property]")
{
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto cfg = small_mwc(seed);
    const auto x = random_band_limited(seed + 1000, kSmallGrid, kSmallDuration, 15e3);
    const CMatrix y = mwc_sample(x, cfg);
    const CMatrix z = oracle::mwc_slices(x, cfg.aliasing_rate, cfg.channel_rate, cfg.harmonic_limit());
    const CMatrix expect = mwc_matrix(cfg) * z;
    CAPTURE(seed);
    CHECK(oracle::max_rel_diff(expect, y) <= 1e-6);
  }
}

TEST_CASE("pointwise mixing converges toward the analog model", "[samplers]")
{
  const auto cfg = small_mwc(3);
  double previous = 1e300;
  for (int density : {10, 40}) {
    const double grid = density * cfg.chips_per_period * cfg.aliasing_rate;
    const auto x = random_band_limited(9, grid, kSmallDuration, 15e3);
    const CMatrix exact = mwc_sample(x, cfg, MixingModel::analog_exact);
    const CMatrix naive = mwc_sample(x, cfg, MixingModel::grid_pointwise);
    const double err = oracle::max_rel_diff(exact, naive);
    CHECK(err < previous);
    previous = err;
  }
}

TEST_CASE("MWC configuration errors", "[samplers]")
{
  auto cfg = small_mwc(1);
  cfg.channel_rate = 2e3;
  CHECK_THROWS_AS(MwcSimulator(cfg, kSmallGrid, kSmallDuration), Error);
  cfg = small_mwc(1);
  CHECK_THROWS_AS(MwcSimulator(cfg, 300e3, kSmallDuration), Error);  // not a multiple of M f_p
  CHECK_THROWS_AS(MwcSimulator(cfg, kSmallGrid, 0.0215), Error);    // non-integer T
  const MwcSimulator sim(cfg, kSmallGrid, kSmallDuration);
  CHECK_THROWS_AS(sim.sample(DenseSignal::zeros(kSmallGrid, 0.042)), Error);
}

TEST_CASE("random demodulator examples", "[samplers]")
{
  HarmonicSpec spec{64, {3, -7}, {1.0, Complex(0.5, -1.0)}};
  RdConfig plain{64, 64, std::vector<int>(64, 1)};
  const auto direct = rd_sample(spec, plain);
  const std::vector<double> freqs{3.0, -7.0};
  for (int n = 0; n < 64; ++n) {
    const Complex dump = tone_dump(3.0, n, 64) + Complex(0.5, -1.0) * tone_dump(-7.0, n, 64);
    CHECK(std::abs(direct.y(n) - dump) < 1e-13);
  }

  RdConfig cfg{64, 16, random_chips(64, 4)};
  CHECK(rd_mixing_matrix(cfg).cast<Complex>() * rd_dumps(std::vector<double>{3.0}, ComplexSeq{0.0}, 64) ==
        CVector::Zero(16));

  const HarmonicSpec one{64, {3}, {1.0}};
  const auto m = rd_sample(one, cfg);
  const CVector dense = oracle::rd_dense_measurements(one, cfg, 10);
  CHECK((m.y - dense).cwiseAbs().maxCoeff() <= 1e-6);

  CHECK_THROWS_AS(rd_sample(one, RdConfig{64, 12, random_chips(64, 1)}), Error);
  CHECK_THROWS_AS(rd_sample(one, RdConfig{32, 16, random_chips(32, 1)}), Error);
}

TEST_CASE("RD sensing matrix reproduces the measurements", "[samplers][property]")
{
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int w = 32 << (seed % 3);
    const int r = w / (2 << (seed % 2));
    const auto spec = random_harmonic(w, 1 + static_cast<int>(seed % 6), seed);
    const RdConfig cfg{w, r, random_chips(w, seed + 7)};
    const auto m = rd_sample(spec, cfg);
    const CVector z = harmonic_coefficient_vector(spec);
    CAPTURE(seed);
    CHECK((m.sensing * z - m.y).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, m.y.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("minimal rate bounds and compute load", "[samplers]")
{
  CHECK(landau_min_rate(6 * 50e6) == 300e6);
  CHECK(landau_min_rate(0.0) == 0.0);
  CHECK(landau_min_rate(100e3) == 100e3);
  CHECK_THROWS_AS(landau_min_rate(-1.0), Error);

  CHECK(blind_min_rate(0.6, 10e9) == 10e9);
  CHECK(blind_min_rate(0.03, 10e9) == Catch::Approx(600e6).epsilon(1e-14));
  CHECK(blind_min_rate(0.5, 10e9) == 10e9);
  CHECK_THROWS_AS(blind_min_rate(0.0, 10e9), Error);
  CHECK_THROWS_AS(blind_min_rate(1.0, 10e9), Error);

  CHECK(mwc_compute_load(6, 35, 51e6) / 1e6 == Catch::Approx(21420.0).epsilon(1e-14));
  CHECK(mwc_compute_load(6, 0, 51e6) == 0.0);
  CHECK(mwc_compute_load(6, 35, 102e6) == 2.0 * mwc_compute_load(6, 35, 51e6));
}
