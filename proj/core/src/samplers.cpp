#include "subnyq/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "subnyq/dft.hpp"
#include "subnyq/error.hpp"
#include "subnyq/rng.hpp"

namespace subnyq {
namespace {

/// Integer ratio a / b, or throws with `what` in the message.
std::size_t integer_ratio(double a, double b, const char* what)
{
  const double r = a / b;
  const double rounded = std::round(r);
  if (rounded < 1.0 || std::abs(r - rounded) > 1e-9 * std::max(1.0, r)) {
    std::ostringstream msg;
    msg << what << " (ratio " << r << " is not a positive integer)";
    fail(Stage::sampler, ErrorKind::invalid_argument, msg.str());
  }
  return static_cast<std::size_t>(rounded);
}

/// Offset in grid points of a time that must sit on the grid.
std::size_t grid_offset(double t, double grid_rate, const char* what)
{
  const double r = t * grid_rate;
  const double rounded = std::round(r);
  if (rounded < 0.0 || std::abs(r - rounded) > 1e-9 * std::max(1.0, r)) {
    std::ostringstream msg;
    msg << what << " " << t << " is not on the simulation grid";
    fail(Stage::sampler, ErrorKind::invalid_argument, msg.str());
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

// ---------------------------------------------------------------------------
// Undersampling

bool RateInterval::contains(double rate, double rel_tol) const
{
  if (rate < lo * (1.0 - rel_tol)) return false;
  return unbounded || rate <= hi * (1.0 + rel_tol);
}

std::vector<RateInterval> undersample_valid_rates(double f_l, double f_u)
{
  require(f_l > 0.0 && f_l < f_u, Stage::sampler, "undersampling needs 0 < f_l < f_u");
  const double ratio = f_u / (f_u - f_l);
  const int k_max = static_cast<int>(std::floor(ratio * (1.0 + 1e-12)));
  std::vector<RateInterval> out;
  for (int k = k_max; k >= 1; --k) {
    RateInterval iv;
    iv.k = k;
    iv.lo = 2.0 * f_u / k;
    if (k == 1) {
      iv.unbounded = true;
      iv.hi = std::numeric_limits<double>::infinity();
    } else {
      iv.hi = 2.0 * f_l / (k - 1);
      if (iv.lo > iv.hi * (1.0 + 1e-12)) continue;
      iv.hi = std::max(iv.hi, iv.lo);  // collapse rounding noise on degenerate intervals
    }
    out.push_back(iv);
  }
  return out;
}

// ---------------------------------------------------------------------------
// T/H model

DenseSignal ideal_lowpass(const DenseSignal& x, double cutoff)
{
  ComplexSeq coeffs = dft::series_coefficients(x.samples());
  const std::size_t n = coeffs.size();
  const double duration = x.duration();
  for (std::size_t slot = 0; slot < n; ++slot) {
    const double f = static_cast<double>(dft::signed_bin(slot, n)) / duration;
    if (std::abs(f) > cutoff * (1.0 + 1e-12)) coeffs[slot] = 0.0;
  }
  ComplexSeq samples = dft::synthesize(coeffs);
  if (x.real_valued())
    for (auto& v : samples) v = Complex(v.real(), 0.0);
  return DenseSignal(std::move(samples), x.grid_rate(), x.real_valued());
}

ComplexSeq th_sample(const DenseSignal& x, double rate, std::optional<ThModel> th)
{
  require(rate > 0.0, Stage::sampler, "sampling rate must be positive");
  const std::size_t step = integer_ratio(x.grid_rate(), rate, "grid_rate must be an integer multiple of the rate");
  require(x.size() % step == 0, Stage::sampler, "duration must hold an integer number of samples");
  if (th) require(th->analog_bandwidth > 0.0, Stage::sampler, "T/H bandwidth must be > 0");
  const DenseSignal filtered = th ? ideal_lowpass(x, th->analog_bandwidth) : x;
  ComplexSeq out;
  out.reserve(x.size() / step);
  for (std::size_t n = 0; n < x.size(); n += step) out.push_back(filtered[n]);
  return out;
}

// ---------------------------------------------------------------------------
// PNS

void PnsConfig::validate() const
{
  require(interval > 0.0, Stage::sampler, "PNS interval must be positive");
  require(!offsets.empty(), Stage::sampler, "PNS needs at least one channel");
  std::set<double> seen;
  for (double phi : offsets) {
    require(phi >= 0.0 && phi < interval, Stage::sampler, "PNS offsets must lie in [0, T_s)");
    require(seen.insert(phi).second, Stage::sampler, "PNS offsets must be distinct");
  }
}

std::vector<ComplexSeq> pns_sample(const DenseSignal& x, const PnsConfig& cfg)
{
  cfg.validate();
  const std::size_t step = integer_ratio(cfg.interval * x.grid_rate(), 1.0, "grid_rate * T_s must be an integer");
  require(x.size() % step == 0, Stage::sampler, "duration must be a multiple of T_s");
  const std::size_t count = x.size() / step;
  std::vector<ComplexSeq> out;
  for (double phi : cfg.offsets) {
    const std::size_t shift = grid_offset(phi, x.grid_rate(), "PNS offset");
    ComplexSeq y(count);
    for (std::size_t n = 0; n < count; ++n) y[n] = x[(n * step + shift) % x.size()];
    out.push_back(std::move(y));
  }
  return out;
}

// ---------------------------------------------------------------------------
// MWC

void MwcConfig::validate() const
{
  require(channels >= 1, Stage::sampler, "MWC needs at least one channel");
  require(chips_per_period >= 1 && chips_per_period % 2 == 1, Stage::sampler, "chips per period M must be odd");
  require(aliasing_rate > 0.0 && channel_rate > 0.0, Stage::sampler, "f_p and f_s must be positive");
  require(sign_patterns.size() == static_cast<std::size_t>(channels), Stage::sampler, "one sign pattern per channel");
  for (const auto& row : sign_patterns) {
    require(row.size() == static_cast<std::size_t>(chips_per_period), Stage::sampler, "sign pattern length must equal M");
    for (int s : row) require(s == 1 || s == -1, Stage::sampler, "sign patterns hold +1/-1 only");
  }
}

std::vector<std::vector<int>> random_sign_patterns(int channels, int chips_per_period, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<std::vector<int>> patterns(static_cast<std::size_t>(channels));
  for (auto& row : patterns) {
    row.resize(static_cast<std::size_t>(chips_per_period));
    for (auto& s : row) s = rng.sign();
  }
  return patterns;
}

CMatrix mwc_matrix(const MwcConfig& cfg)
{
  cfg.validate();
  const int m = cfg.channels;
  const int chips = cfg.chips_per_period;
  const int half = cfg.harmonic_limit();
  CMatrix c(m, chips);
  for (int i = 0; i < m; ++i) {
    const auto& s = cfg.sign_patterns[static_cast<std::size_t>(i)];
    for (int l = -half; l <= half; ++l) {
      Complex entry;
      if (l == 0) {
        double sum = 0.0;
        for (int v : s) sum += v;
        entry = sum / chips;
      } else {
        Complex sum{};
        for (int k = 0; k < chips; ++k) sum += static_cast<double>(s[static_cast<std::size_t>(k)]) * expj(-kTwoPi * l * k / chips);
        const Complex d = (1.0 - expj(-kTwoPi * l / chips)) / (kJ * kTwoPi * static_cast<double>(l));
        entry = d * sum;
      }
      c(i, l + half) = entry;
    }
  }
  return c;
}

MwcSimulator::MwcSimulator(MwcConfig cfg, double grid_rate, double duration, MixingModel model)
    : cfg_(std::move(cfg)), grid_rate_(grid_rate)
{
  cfg_.validate();
  require(std::abs(cfg_.channel_rate - cfg_.aliasing_rate) <= 1e-12 * cfg_.aliasing_rate, Stage::sampler,
          "basic MWC configuration requires f_s = f_p");
  grid_points_ = grid_length(grid_rate, duration);
  samples_per_channel_ = integer_ratio(duration * cfg_.channel_rate, 1.0, "duration * f_s must be an integer");
  periods_ = integer_ratio(duration * cfg_.aliasing_rate, 1.0, "duration * f_p must be an integer");
  cells_per_period_ = integer_ratio(grid_rate, cfg_.aliasing_rate, "grid_rate must be a multiple of f_p");
  const auto chips = static_cast<std::size_t>(cfg_.chips_per_period);
  require(cells_per_period_ % chips == 0, Stage::sampler, "grid_rate must be a multiple of M * f_p");
  const std::size_t cells_per_chip = cells_per_period_ / chips;

  for (const auto& pattern : cfg_.sign_patterns) {
    ComplexSeq rendered(cells_per_period_);
    for (std::size_t n = 0; n < cells_per_period_; ++n) rendered[n] = static_cast<double>(pattern[n / cells_per_chip]);
    ComplexSeq series = dft::series_coefficients(rendered);
    if (model == MixingModel::analog_exact) {
      // Exact integral of e^{-j 2 pi h t / T_p} over each grid cell, relative to a point sample.
      for (std::size_t slot = 0; slot < cells_per_period_; ++slot) {
        const long h = dft::signed_bin(slot, cells_per_period_);
        if (h == 0) continue;
        const double theta = kTwoPi * static_cast<double>(h) / static_cast<double>(cells_per_period_);
        series[slot] *= (1.0 - expj(-theta)) / (kJ * theta);
      }
    }
    waveform_series_.push_back(std::move(series));
  }
}

CMatrix MwcSimulator::sample(const DenseSignal& x) const
{
  require(x.size() == grid_points_ && std::abs(x.grid_rate() - grid_rate_) <= 1e-12 * grid_rate_, Stage::sampler,
          "signal grid does not match the MWC simulator grid");
  const ComplexSeq spectrum = dft::series_coefficients(x.samples());
  const std::size_t t_len = samples_per_channel_;
  const long max_bin = static_cast<long>((t_len - 1) / 2);  // |nu| < T/2
  const auto period_bins = static_cast<long>(periods_);

  CMatrix out(cfg_.channels, static_cast<Eigen::Index>(t_len));
  ComplexSeq baseband(t_len);
  for (std::size_t ch = 0; ch < waveform_series_.size(); ++ch) {
    const auto& series = waveform_series_[ch];
    std::fill(baseband.begin(), baseband.end(), Complex{});
    // Baseband bins of x(t) p(t): circular convolution of the two Fourier series.
    for (long nu = -max_bin; nu <= max_bin; ++nu) {
      Complex acc{};
      for (std::size_t slot = 0; slot < cells_per_period_; ++slot) {
        const long h = dft::signed_bin(slot, cells_per_period_);
        acc += series[slot] * spectrum[dft::bin_index(nu - period_bins * h, grid_points_)];
      }
      baseband[dft::bin_index(nu, t_len)] = acc;
    }
    const ComplexSeq y = dft::synthesize(baseband);
    for (std::size_t n = 0; n < t_len; ++n) out(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(n)) = y[n];
  }
  return out;
}

CMatrix mwc_sample(const DenseSignal& x, const MwcConfig& cfg, MixingModel model)
{
  return MwcSimulator(cfg, x.grid_rate(), x.duration(), model).sample(x);
}

// ---------------------------------------------------------------------------
// Random demodulator

void RdConfig::validate() const
{
  require(tone_grid_size >= 2, Stage::sampler, "RD tone grid size W must be >= 2");
  require(rate >= 1 && tone_grid_size % rate == 0, Stage::sampler, "RD rate R must divide W");
  require(chips.size() == static_cast<std::size_t>(tone_grid_size), Stage::sampler, "RD needs W chips");
  for (int c : chips) require(c == 1 || c == -1, Stage::sampler, "RD chips hold +1/-1 only");
}

std::vector<int> random_chips(int tone_grid_size, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<int> chips(static_cast<std::size_t>(tone_grid_size));
  for (auto& c : chips) c = rng.sign();
  return chips;
}

Complex tone_dump(double freq, int n, int tone_grid_size)
{
  const double w = static_cast<double>(tone_grid_size);
  // W * int_{n/W}^{(n+1)/W} e^{j 2 pi f t} dt = e^{j 2 pi f (n + 1/2) / W} sinc(f / W)
  return expj(kTwoPi * freq * (n + 0.5) / w) * sinc(freq / w);
}

CVector rd_dumps(std::span<const double> freqs, std::span<const Complex> coefficients, int tone_grid_size)
{
  require(freqs.size() == coefficients.size(), Stage::sampler, "one coefficient per tone");
  CVector f = CVector::Zero(tone_grid_size);
  for (std::size_t t = 0; t < freqs.size(); ++t)
    for (int n = 0; n < tone_grid_size; ++n) f(n) += coefficients[t] * tone_dump(freqs[t], n, tone_grid_size);
  return f;
}

Eigen::MatrixXd rd_mixing_matrix(const RdConfig& cfg)
{
  cfg.validate();
  const int block = cfg.tone_grid_size / cfg.rate;
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(cfg.rate, cfg.tone_grid_size);
  for (int n = 0; n < cfg.tone_grid_size; ++n) phi(n / block, n) = cfg.chips[static_cast<std::size_t>(n)];
  return phi;
}

CMatrix rd_tone_matrix(int tone_grid_size)
{
  const auto w = static_cast<std::size_t>(tone_grid_size);
  CMatrix f(tone_grid_size, tone_grid_size);
  for (std::size_t slot = 0; slot < w; ++slot) {
    const double k = static_cast<double>(dft::signed_bin(slot, w));
    for (int n = 0; n < tone_grid_size; ++n) f(n, static_cast<Eigen::Index>(slot)) = tone_dump(k, n, tone_grid_size);
  }
  return f;
}

CVector harmonic_coefficient_vector(const HarmonicSpec& spec)
{
  spec.validate();
  CVector z = CVector::Zero(spec.tone_grid_size);
  const auto w = static_cast<std::size_t>(spec.tone_grid_size);
  for (std::size_t i = 0; i < spec.active_indices.size(); ++i)
    z(static_cast<Eigen::Index>(dft::bin_index(spec.active_indices[i], w))) = spec.coefficients[i];
  return z;
}

RdMeasurement rd_sample(const HarmonicSpec& spec, const RdConfig& cfg)
{
  spec.validate();
  cfg.validate();
  require(spec.tone_grid_size == cfg.tone_grid_size, Stage::sampler, "harmonic spec and RD disagree on W");
  std::vector<double> freqs(spec.active_indices.begin(), spec.active_indices.end());
  RdMeasurement m;
  m.dumps = rd_dumps(freqs, spec.coefficients, cfg.tone_grid_size);
  const Eigen::MatrixXd phi = rd_mixing_matrix(cfg);
  m.y = phi.cast<Complex>() * m.dumps;
  m.sensing = phi.cast<Complex>() * rd_tone_matrix(cfg.tone_grid_size);
  return m;
}

// ---------------------------------------------------------------------------
// Bounds

double landau_min_rate(double occupied_measure)
{
  require(occupied_measure >= 0.0, Stage::sampler, "occupied measure must be non-negative");
  return occupied_measure;
}

double blind_min_rate(double occupancy, double f_nyq)
{
  require(occupancy > 0.0 && occupancy < 1.0, Stage::sampler, "occupancy must lie in (0, 1)");
  require(f_nyq > 0.0, Stage::sampler, "Nyquist rate must be positive");
  return std::min(2.0 * occupancy * f_nyq, f_nyq);
}

double mwc_compute_load(int band_count, int channels, double channel_rate)
{
  require(band_count >= 0 && channels >= 0 && channel_rate >= 0.0, Stage::sampler,
          "compute load arguments must be non-negative");
  return 2.0 * band_count * channels * channel_rate;
}

}  // namespace subnyq
