#include "subnyq/signal_models.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "subnyq/dft.hpp"
#include "subnyq/error.hpp"
#include "subnyq/rng.hpp"

namespace subnyq {
namespace {

bool near_integer(double x, double rel_tol, long& rounded)
{
  const double r = std::round(x);
  rounded = static_cast<long>(r);
  return std::abs(x - r) <= rel_tol * std::max(1.0, std::abs(x));
}

/// Largest integer strictly below x (x > 0), treating values within 1e-9 of an integer as that integer.
long largest_below(double x)
{
  long r = 0;
  if (near_integer(x, 1e-9, r)) return r - 1;
  return static_cast<long>(std::floor(x));
}

}  // namespace

std::size_t grid_length(double grid_rate, double duration)
{
  require(grid_rate > 0.0 && std::isfinite(grid_rate), Stage::signal, "grid_rate must be positive");
  require(duration > 0.0 && std::isfinite(duration), Stage::signal, "duration must be positive");
  long n = 0;
  if (!near_integer(grid_rate * duration, 1e-9, n) || n < 1) {
    std::ostringstream msg;
    msg << "grid_rate * duration = " << grid_rate * duration << " is not a positive integer";
    fail(Stage::signal, ErrorKind::invalid_argument, msg.str());
  }
  return static_cast<std::size_t>(n);
}

// ---------------------------------------------------------------------------
// DenseSignal

DenseSignal::DenseSignal(ComplexSeq samples, double grid_rate, bool real_valued)
    : samples_(std::move(samples)), grid_rate_(grid_rate), real_valued_(real_valued)
{
  require(!samples_.empty(), Stage::signal, "a DenseSignal needs at least one sample");
  require(grid_rate_ > 0.0 && std::isfinite(grid_rate_), Stage::signal, "grid_rate must be positive");
}

DenseSignal DenseSignal::zeros(double grid_rate, double duration, bool real_valued)
{
  return DenseSignal(ComplexSeq(grid_length(grid_rate, duration)), grid_rate, real_valued);
}

double DenseSignal::conjugate_symmetry_defect() const
{
  const ComplexSeq spectrum = dft::forward(samples_);
  const std::size_t n = spectrum.size();
  double peak = 0.0;
  double defect = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    peak = std::max(peak, std::abs(spectrum[k]));
    const std::size_t mirror = (n - k) % n;
    defect = std::max(defect, std::abs(spectrum[k] - std::conj(spectrum[mirror])));
  }
  return peak == 0.0 ? 0.0 : defect / peak;
}

double DenseSignal::energy() const
{
  double sum = 0.0;
  for (const auto& v : samples_) sum += std::norm(v);
  return sum / grid_rate_;
}

DenseSignal& DenseSignal::operator+=(const DenseSignal& other)
{
  require(other.size() == size() && other.grid_rate() == grid_rate_, Stage::signal, "grid mismatch in signal sum");
  for (std::size_t n = 0; n < samples_.size(); ++n) samples_[n] += other.samples_[n];
  real_valued_ = real_valued_ && other.real_valued_;
  return *this;
}

DenseSignal& DenseSignal::operator*=(Complex scale)
{
  for (auto& v : samples_) v *= scale;
  real_valued_ = real_valued_ && scale.imag() == 0.0;
  return *this;
}

DenseSignal operator+(DenseSignal a, const DenseSignal& b)
{
  a += b;
  return a;
}

DenseSignal operator*(Complex scale, DenseSignal a)
{
  a *= scale;
  return a;
}

// ---------------------------------------------------------------------------
// Multiband signals

void MultibandSpec::validate() const
{
  require(band_count >= 2 && band_count % 2 == 0, Stage::signal,
          "band_count must be a positive even number (bands come in +- pairs)");
  require(band_width > 0.0, Stage::signal, "band_width must be positive");
  require(f_max > 0.0, Stage::signal, "f_max must be positive");
  if (carriers.empty()) return;
  require(carriers.size() == static_cast<std::size_t>(band_count / 2), Stage::signal,
          "carrier list must hold band_count/2 positive carriers");
  const double slack = 1e-9 * f_max;
  for (double f : carriers) {
    if (f < band_width / 2 - slack || f > f_max - band_width / 2 + slack) {
      std::ostringstream msg;
      msg << "carrier " << f << " outside [B/2, f_max - B/2]";
      fail(Stage::signal, ErrorKind::invalid_argument, msg.str());
    }
  }
  for (std::size_t i = 0; i < carriers.size(); ++i)
    for (std::size_t j = i + 1; j < carriers.size(); ++j)
      if (std::abs(carriers[i] - carriers[j]) < band_width - slack) {
        std::ostringstream msg;
        msg << "bands at " << carriers[i] << " and " << carriers[j] << " overlap";
        fail(Stage::signal, ErrorKind::invalid_argument, msg.str());
      }
}

std::vector<BandComponents> draw_band_content(const MultibandSpec& spec, double duration, std::uint64_t seed)
{
  spec.validate();
  require(!spec.carriers.empty(), Stage::signal, "carrier positions are required to generate a signal");
  const long half = largest_below(spec.band_width * duration / 2.0);
  require(half >= 0, Stage::signal, "band narrower than one DFT bin");

  Rng rng(seed);
  std::vector<BandComponents> out;
  for (std::size_t b = 0; b < spec.carriers.size(); ++b) {
    BandComponents comp;
    comp.half_width = half;
    comp.in_phase.assign(2 * half + 1, Complex{});
    comp.quadrature.assign(2 * half + 1, Complex{});
    switch (spec.content) {
      case BandContent::zero: break;
      case BandContent::constant:
        comp.in_phase[half] = spec.constant_i;
        comp.quadrature[half] = spec.constant_q;
        break;
      case BandContent::random_gaussian:
        // I(t), Q(t) real: Hermitian coefficient sequences.
        for (long k = 0; k <= half; ++k) {
          for (ComplexSeq* seq : {&comp.in_phase, &comp.quadrature}) {
            const Complex v = (k == 0) ? Complex(rng.normal(), 0.0) : rng.complex_normal();
            (*seq)[half + k] = v;
            (*seq)[half - k] = std::conj(v);
          }
        }
        break;
    }
    out.push_back(std::move(comp));
  }
  return out;
}

DenseSignal synthesize_multiband(const MultibandSpec& spec, double grid_rate, double duration,
                                 std::span<const BandComponents> contents)
{
  spec.validate();
  require(!spec.carriers.empty(), Stage::signal, "carrier positions are required to generate a signal");
  require(grid_rate >= spec.nyquist_rate() * (1.0 - 1e-12), Stage::signal, "grid_rate below 2 f_max");
  require(contents.size() == spec.carriers.size(), Stage::signal, "one BandComponents per carrier expected");
  const std::size_t n = grid_length(grid_rate, duration);

  ComplexSeq coeffs(n);
  const Complex half_inv_j = Complex(0.0, -0.5);  // 1 / (2j)
  for (std::size_t b = 0; b < contents.size(); ++b) {
    long carrier_bin = 0;
    if (!near_integer(spec.carriers[b] * duration, 1e-6, carrier_bin)) {
      std::ostringstream msg;
      msg << "carrier " << spec.carriers[b] << " is not on the DFT grid of duration " << duration;
      fail(Stage::signal, ErrorKind::invalid_argument, msg.str());
    }
    const auto& c = contents[b];
    require(c.in_phase.size() == static_cast<std::size_t>(2 * c.half_width + 1) &&
                c.quadrature.size() == c.in_phase.size(),
            Stage::signal, "malformed BandComponents");
    for (long k = -c.half_width; k <= c.half_width; ++k) {
      const Complex i_k = c.in_phase[k + c.half_width];
      const Complex q_k = c.quadrature[k + c.half_width];
      coeffs[dft::bin_index(carrier_bin + k, n)] += 0.5 * i_k + half_inv_j * q_k;
      coeffs[dft::bin_index(-carrier_bin + k, n)] += 0.5 * i_k - half_inv_j * q_k;
    }
  }
  ComplexSeq samples = dft::synthesize(coeffs);
  for (auto& v : samples) v = Complex(v.real(), 0.0);
  return DenseSignal(std::move(samples), grid_rate, true);
}

DenseSignal gen_multiband(const MultibandSpec& spec, double grid_rate, double duration, std::uint64_t seed)
{
  const auto contents = draw_band_content(spec, duration, seed);
  return synthesize_multiband(spec, grid_rate, duration, contents);
}

DenseSignal gen_bandpass(double f_l, double f_u, double grid_rate, double duration, std::uint64_t seed)
{
  require(0.0 <= f_l && f_l < f_u, Stage::signal, "bandpass edges must satisfy 0 <= f_l < f_u");
  require(grid_rate > 2.0 * f_u, Stage::signal, "grid_rate must exceed 2 f_u");
  const std::size_t n = grid_length(grid_rate, duration);
  const double lo = f_l * duration;
  const double hi = f_u * duration;
  long first = 0;
  first = near_integer(lo, 1e-9, first) ? first + 1 : static_cast<long>(std::ceil(lo));
  const long last = largest_below(hi);

  Rng rng(seed);
  ComplexSeq coeffs(n);
  for (long q = std::max(first, 1L); q <= last; ++q) {
    const Complex v = rng.complex_normal();
    coeffs[dft::bin_index(q, n)] = v;
    coeffs[dft::bin_index(-q, n)] = std::conj(v);
  }
  ComplexSeq samples = dft::synthesize(coeffs);
  for (auto& v : samples) v = Complex(v.real(), 0.0);
  return DenseSignal(std::move(samples), grid_rate, true);
}

// ---------------------------------------------------------------------------
// Pulse streams

PulseSpectrum::PulseSpectrum(std::string name, Function fn, std::vector<double> params)
    : name_(std::move(name)), fn_(std::move(fn)), params_(std::move(params))
{
}

PulseSpectrum PulseSpectrum::dirac()
{
  return PulseSpectrum("dirac", [](double) { return Complex(1.0, 0.0); });
}

PulseSpectrum PulseSpectrum::gaussian(double sigma)
{
  require(sigma > 0.0, Stage::signal, "gaussian pulse needs sigma > 0");
  return PulseSpectrum(
      "gaussian",
      [sigma](double omega) {
        return Complex(sigma * std::sqrt(kTwoPi) * std::exp(-0.5 * sigma * sigma * omega * omega), 0.0);
      },
      {sigma});
}

PulseSpectrum PulseSpectrum::raised_cosine(double cutoff, double rolloff)
{
  require(cutoff > 0.0 && rolloff > 0.0 && rolloff <= 1.0, Stage::signal,
          "raised cosine needs cutoff > 0 and rolloff in (0, 1]");
  return PulseSpectrum(
      "raised_cosine",
      [cutoff, rolloff](double omega) {
        const double w = std::abs(omega);
        const double flat = (1.0 - rolloff) * cutoff;
        const double stop = (1.0 + rolloff) * cutoff;
        if (w <= flat) return Complex(1.0, 0.0);
        if (w > stop) return Complex(0.0, 0.0);
        return Complex(0.5 * (1.0 + std::cos(kPi * (w - flat) / (2.0 * rolloff * cutoff))), 0.0);
      },
      {cutoff, rolloff});
}

void FriSpec::validate() const
{
  require(period > 0.0, Stage::signal, "FRI period must be positive");
  require(!delays.empty(), Stage::signal, "FRI stream needs at least one pulse");
  require(delays.size() == amplitudes.size(), Stage::signal, "delays and amplitudes differ in length");
  for (std::size_t i = 0; i < delays.size(); ++i) {
    require(delays[i] >= 0.0 && delays[i] < period, Stage::signal, "delays must lie in [0, period)");
    if (i > 0) require(delays[i] > delays[i - 1], Stage::signal, "delays must be strictly increasing");
    require(amplitudes[i] != Complex(0.0, 0.0), Stage::signal, "amplitudes must be nonzero");
  }
}

Complex fri_fourier_coefficient(const FriSpec& spec, long k)
{
  Complex sum{};
  for (std::size_t l = 0; l < spec.delays.size(); ++l)
    sum += spec.amplitudes[l] * expj(-kTwoPi * static_cast<double>(k) * spec.delays[l] / spec.period);
  return spec.pulse(kTwoPi * static_cast<double>(k) / spec.period) * sum / spec.period;
}

DenseSignal gen_fri_periodic(const FriSpec& spec, double grid_rate, int periods)
{
  spec.validate();
  require(periods >= 1, Stage::signal, "periods must be >= 1");
  const std::size_t n = grid_length(grid_rate, spec.period);

  ComplexSeq coeffs(n);
  for (std::size_t slot = 0; slot < n; ++slot) {
    const Complex x = fri_fourier_coefficient(spec, dft::signed_bin(slot, n));
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
      fail(Stage::signal, ErrorKind::invalid_argument, "pulse spectrum evaluated to a non-finite value");
    coeffs[slot] = x;
  }
  const ComplexSeq one_period = dft::synthesize(coeffs);
  ComplexSeq samples;
  samples.reserve(n * static_cast<std::size_t>(periods));
  for (int p = 0; p < periods; ++p) samples.insert(samples.end(), one_period.begin(), one_period.end());
  return DenseSignal(std::move(samples), grid_rate, false);
}

// ---------------------------------------------------------------------------
// Harmonic tones

void HarmonicSpec::validate() const
{
  require(tone_grid_size >= 2, Stage::signal, "tone grid size W must be >= 2");
  require(!active_indices.empty(), Stage::signal, "at least one active tone is required");
  require(active_indices.size() == coefficients.size(), Stage::signal, "indices and coefficients differ in length");
  require(active_count() <= tone_grid_size, Stage::signal, "more tones than grid positions");
  std::set<int> seen;
  for (std::size_t i = 0; i < active_indices.size(); ++i) {
    const int k = active_indices[i];
    require(k >= -(tone_grid_size / 2 - 1) && k <= tone_grid_size / 2, Stage::signal,
            "tone index outside [-(W/2-1), W/2]");
    require(seen.insert(k).second, Stage::signal, "tone indices must be distinct");
    require(coefficients[i] != Complex(0.0, 0.0), Stage::signal, "tone coefficients must be nonzero");
  }
}

DenseSignal gen_harmonic(const HarmonicSpec& spec)
{
  spec.validate();
  const auto w = static_cast<std::size_t>(spec.tone_grid_size);
  ComplexSeq samples(w);
  for (std::size_t n = 0; n < w; ++n) {
    Complex sum{};
    for (std::size_t i = 0; i < spec.active_indices.size(); ++i)
      sum += spec.coefficients[i] *
             expj(kTwoPi * static_cast<double>(spec.active_indices[i]) * static_cast<double>(n) / static_cast<double>(w));
    samples[n] = sum;
  }
  return DenseSignal(std::move(samples), static_cast<double>(w), false);
}

HarmonicSpec random_harmonic(int tone_grid_size, int active_count, std::uint64_t seed)
{
  require(active_count >= 1 && active_count <= tone_grid_size, Stage::signal, "need 1 <= K <= W");
  Rng rng(seed);
  std::set<int> picked;
  while (static_cast<int>(picked.size()) < active_count)
    picked.insert(static_cast<int>(rng.uniform_int(-(tone_grid_size / 2 - 1), tone_grid_size / 2)));
  HarmonicSpec spec;
  spec.tone_grid_size = tone_grid_size;
  spec.active_indices.assign(picked.begin(), picked.end());
  for (int i = 0; i < active_count; ++i) spec.coefficients.push_back(rng.complex_normal());
  return spec;
}

// ---------------------------------------------------------------------------
// Interpolation and error metrics

ComplexSeq shannon_interpolate(std::span<const Complex> samples, double rate, std::span<const double> query_times)
{
  require(!samples.empty(), Stage::signal, "cannot interpolate an empty sample list");
  require(rate > 0.0, Stage::signal, "rate must be positive");
  const auto n = static_cast<long>(samples.size());
  const double nd = static_cast<double>(n);
  const bool odd = (n % 2) == 1;

  // Sum over r of sinc(v - r n): sin(pi v) / (n sin(pi v / n)) for odd n,
  // sin(pi v) / (n tan(pi v / n)) for even n.
  auto periodic_sinc = [&](double v) {
    v = std::remainder(v, nd);
    const double nearest = std::round(v);
    if (std::abs(v - nearest) < 1e-12) return (static_cast<long>(nearest) % n == 0) ? 1.0 : 0.0;
    const double num = std::sin(kPi * v);
    return odd ? num / (nd * std::sin(kPi * v / nd)) : num / (nd * std::tan(kPi * v / nd));
  };

  ComplexSeq out;
  out.reserve(query_times.size());
  for (double t : query_times) {
    const double u = rate * t;
    Complex acc{};
    for (long k = 0; k < n; ++k) acc += samples[k] * periodic_sinc(u - static_cast<double>(k));
    out.push_back(acc);
  }
  return out;
}

double nmse(std::span<const Complex> a, std::span<const Complex> b)
{
  require(a.size() == b.size(), Stage::signal, "nmse operands differ in length");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(a[i]);
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / den;
}

double nmse(const DenseSignal& a, const DenseSignal& b)
{
  require(a.size() == b.size() && std::abs(a.grid_rate() - b.grid_rate()) <= 1e-12 * a.grid_rate(), Stage::signal,
          "nmse requires equal grid_rate and duration");
  return nmse(std::span<const Complex>(a.samples()), std::span<const Complex>(b.samples()));
}

}  // namespace subnyq
