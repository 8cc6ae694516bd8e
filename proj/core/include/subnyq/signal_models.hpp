#pragma once

// Ground-truth "analog" signals on a dense uniform grid.
//
// Every signal is treated as periodic with period equal to its duration, so an
// ideal brickwall filter is exact DFT masking and band-limited content is
// represented without truncation error.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "subnyq/types.hpp"

namespace subnyq {

/// Number of grid points for rate*duration; throws unless it is an integer (relative 1e-9).
std::size_t grid_length(double grid_rate, double duration);

/// Complex samples on a uniform grid of `grid_rate` points per second.
class DenseSignal {
public:
  DenseSignal(ComplexSeq samples, double grid_rate, bool real_valued = false);

  static DenseSignal zeros(double grid_rate, double duration, bool real_valued = false);

  const ComplexSeq& samples() const noexcept { return samples_; }
  ComplexSeq& samples() noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double grid_rate() const noexcept { return grid_rate_; }
  double duration() const noexcept { return static_cast<double>(samples_.size()) / grid_rate_; }
  double time(std::size_t n) const noexcept { return static_cast<double>(n) / grid_rate_; }
  bool real_valued() const noexcept { return real_valued_; }

  const Complex& operator[](std::size_t n) const { return samples_[n]; }

  /// Relative defect of conjugate symmetry of the DFT: max_k |X[k] - conj X[-k]| / max_k |X[k]|.
  double conjugate_symmetry_defect() const;

  double energy() const;  // integral of |x|^2 over the duration

  DenseSignal& operator+=(const DenseSignal& other);
  DenseSignal& operator*=(Complex scale);

private:
  ComplexSeq samples_;
  double grid_rate_;
  bool real_valued_;
};

DenseSignal operator+(DenseSignal a, const DenseSignal& b);
DenseSignal operator*(Complex scale, DenseSignal a);

/// Statistical model for the I/Q content of every band.
enum class BandContent {
  random_gaussian,  // unit-variance Gaussian Fourier coefficients within +-B/2
  constant,         // I(t) = constant_i, Q(t) = constant_q
  zero,
};

/// N bands of width B (counted on both spectral sides) at N/2 positive carriers.
/// An empty carrier list means the band positions are unknown (blind setting);
/// such a spec can feed rate bounds but not signal generation.
struct MultibandSpec {
  int band_count = 2;
  double band_width = 0.0;
  std::vector<double> carriers;
  double f_max = 0.0;
  BandContent content = BandContent::random_gaussian;
  double constant_i = 1.0;
  double constant_q = 0.0;

  void validate() const;
  double nyquist_rate() const { return 2.0 * f_max; }
  double occupied_measure() const { return band_count * band_width; }
};

/// Fourier coefficients of the baseband I and Q components of one transmission.
/// Index k in [-half_width, half_width] maps to slot k + half_width.
struct BandComponents {
  long half_width = 0;
  ComplexSeq in_phase;
  ComplexSeq quadrature;
};

/// Draws the per-band I/Q content for `spec` on a grid of the given duration.
std::vector<BandComponents> draw_band_content(const MultibandSpec& spec, double duration, std::uint64_t seed);

/// Sum over bands of I_i(t) cos(2 pi f_i t) + Q_i(t) sin(2 pi f_i t), built in the DFT domain.
/// Carriers must sit on the DFT grid (f_i * duration integer).
DenseSignal synthesize_multiband(const MultibandSpec& spec, double grid_rate, double duration,
                                 std::span<const BandComponents> contents);

DenseSignal gen_multiband(const MultibandSpec& spec, double grid_rate, double duration, std::uint64_t seed);

/// Real bandpass signal with random Gaussian content strictly inside (f_l, f_u) and its mirror.
DenseSignal gen_bandpass(double f_l, double f_u, double grid_rate, double duration, std::uint64_t seed);

/// Fourier transform H(omega) of a pulse shape h(t).
class PulseSpectrum {
public:
  using Function = std::function<Complex(double omega)>;

  PulseSpectrum(std::string name, Function fn, std::vector<double> params = {});

  static PulseSpectrum dirac();
  /// h(t) = exp(-t^2 / (2 sigma^2)), H(omega) = sigma sqrt(2 pi) exp(-sigma^2 omega^2 / 2).
  static PulseSpectrum gaussian(double sigma);
  /// Raised-cosine spectrum: flat up to (1-rolloff) * cutoff, zero beyond (1+rolloff) * cutoff (rad/s).
  static PulseSpectrum raised_cosine(double cutoff, double rolloff);

  Complex operator()(double omega) const { return fn_(omega); }
  const std::string& name() const noexcept { return name_; }
  const std::vector<double>& params() const noexcept { return params_; }

private:
  std::string name_;
  Function fn_;
  std::vector<double> params_;
};

/// Periodic stream of L pulses: x(t) = sum_l a_l h(t - t_l), x(t + period) = x(t).
struct FriSpec {
  double period = 1.0;
  std::vector<double> delays;
  ComplexSeq amplitudes;
  PulseSpectrum pulse = PulseSpectrum::dirac();

  int pulse_count() const { return static_cast<int>(delays.size()); }
  void validate() const;
};

/// X[k] = (1/tau) H(2 pi k / tau) sum_l a_l e^{-j 2 pi k t_l / tau}.
Complex fri_fourier_coefficient(const FriSpec& spec, long k);

/// Synthesizes `periods` periods from the Fourier series truncated to the grid band.
DenseSignal gen_fri_periodic(const FriSpec& spec, double grid_rate, int periods);

/// Sparse sum of harmonic tones on [0, 1): f(t) = sum a_k e^{j 2 pi k t}.
struct HarmonicSpec {
  int tone_grid_size = 0;  // W
  std::vector<int> active_indices;
  ComplexSeq coefficients;

  void validate() const;
  int active_count() const { return static_cast<int>(active_indices.size()); }
};

/// W-point unit-interval grid: samples f(n/W).
DenseSignal gen_harmonic(const HarmonicSpec& spec);

/// Random HarmonicSpec with K distinct indices in [-(W/2-1), W/2] and unit-variance coefficients.
HarmonicSpec random_harmonic(int tone_grid_size, int active_count, std::uint64_t seed);

/// Periodic Shannon interpolation: sum over all integers n of samples[n mod N] sinc(rate t - n).
/// The infinite sum is evaluated in closed form (Dirichlet kernel).
ComplexSeq shannon_interpolate(std::span<const Complex> samples, double rate, std::span<const double> query_times);

/// ||a - b||^2 / ||a||^2; zero when both vanish.
double nmse(const DenseSignal& a, const DenseSignal& b);
double nmse(std::span<const Complex> a, std::span<const Complex> b);

}  // namespace subnyq
