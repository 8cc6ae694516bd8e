#pragma once

// Acquisition front-ends: T/H-limited pointwise sampling, undersampling rate
// selection, periodic nonuniform sampling (PNS), the modulated wideband
// converter (MWC) and the random demodulator (RD), plus minimal-rate bounds.

#include <cstdint>
#include <optional>
#include <vector>

#include "subnyq/signal_models.hpp"
#include "subnyq/types.hpp"

namespace subnyq {

// ---------------------------------------------------------------------------
// Undersampling

/// Closed interval of valid uniform rates for one rate-reduction factor k.
struct RateInterval {
  int k = 1;
  double lo = 0.0;
  double hi = 0.0;         // meaningless when unbounded
  bool unbounded = false;  // k = 1: [2 f_u, inf)

  bool contains(double rate, double rel_tol = 1e-12) const;
};

/// Intervals [2 f_u / k, 2 f_l / (k - 1)] for k = 1 .. floor(f_u / (f_u - f_l)),
/// empty ones dropped, ordered by decreasing k (lowest rates first).
std::vector<RateInterval> undersample_valid_rates(double f_l, double f_u);

// ---------------------------------------------------------------------------
// Track-and-hold ADC model

struct ThModel {
  double analog_bandwidth = 0.0;  // b, ideal brickwall cutoff in Hz
};

/// Lowpass at the T/H bandwidth (if given), then pointwise decimation to `rate`.
ComplexSeq th_sample(const DenseSignal& x, double rate, std::optional<ThModel> th);

/// Ideal brickwall lowpass |f| <= cutoff applied by DFT masking.
DenseSignal ideal_lowpass(const DenseSignal& x, double cutoff);

// ---------------------------------------------------------------------------
// Periodic nonuniform sampling

struct PnsConfig {
  double interval = 0.0;        // T_s
  std::vector<double> offsets;  // phi_i, phi_1 = 0

  void validate() const;
};

/// y_i[n] = x(n T_s + phi_i) read off the simulation grid (periodic wrap).
std::vector<ComplexSeq> pns_sample(const DenseSignal& x, const PnsConfig& cfg);

// ---------------------------------------------------------------------------
// Modulated wideband converter

struct MwcConfig {
  int channels = 0;          // m
  int chips_per_period = 0;  // M = 2L + 1
  double aliasing_rate = 0.0;  // f_p
  double channel_rate = 0.0;   // f_s
  std::vector<std::vector<int>> sign_patterns;  // m rows of M values in {+1, -1}

  int harmonic_limit() const { return (chips_per_period - 1) / 2; }  // L
  void validate() const;
};

/// m random +-1 patterns of length M.
std::vector<std::vector<int>> random_sign_patterns(int channels, int chips_per_period, std::uint64_t seed);

/// m x M matrix of Fourier coefficients c_{il} of the sign waveforms; column j holds
/// harmonic l = j - L (ascending l = -L..L).
CMatrix mwc_matrix(const MwcConfig& cfg);

/// How the mixer product x(t) p_i(t) is evaluated on the simulation grid.
enum class MixingModel {
  /// The sign waveform is the continuous piecewise-constant function; its Fourier
  /// series is integrated exactly over every grid cell. Exact for any input that is
  /// band-limited to grid_rate/2 - f_s/2.
  analog_exact,
  /// Pointwise product of grid samples, i.e. the naive discretization whose error
  /// shrinks with the number of grid points per chip.
  grid_pointwise,
};

/// MWC front end prepared for a fixed simulation grid. Each channel output is
/// ideal-lowpass filtered at f_s/2 (strict) and decimated to rate f_s.
class MwcSimulator {
public:
  MwcSimulator(MwcConfig cfg, double grid_rate, double duration, MixingModel model = MixingModel::analog_exact);

  /// m x T block of samples y_i[n], T = duration * f_s.
  CMatrix sample(const DenseSignal& x) const;

  const MwcConfig& config() const noexcept { return cfg_; }
  std::size_t samples_per_channel() const noexcept { return samples_per_channel_; }

private:
  MwcConfig cfg_;
  double grid_rate_;
  std::size_t grid_points_;
  std::size_t samples_per_channel_;  // T
  std::size_t periods_;              // duration * f_p
  std::size_t cells_per_period_;     // grid points per T_p
  std::vector<ComplexSeq> waveform_series_;  // per channel, Fourier series of p_i over one period
};

CMatrix mwc_sample(const DenseSignal& x, const MwcConfig& cfg, MixingModel model = MixingModel::analog_exact);

// ---------------------------------------------------------------------------
// Random demodulator

struct RdConfig {
  int tone_grid_size = 0;  // W
  int rate = 0;            // R, divides W
  std::vector<int> chips;  // W values in {+1, -1}

  void validate() const;
};

std::vector<int> random_chips(int tone_grid_size, std::uint64_t seed);

struct RdMeasurement {
  CVector y;        // R measurements
  CMatrix sensing;  // R x W matrix A = Phi * F
  CVector dumps;    // integrate-and-dump vector f (length W)
};

/// Integrate-and-dump value W * integral over [n/W, (n+1)/W) of e^{j 2 pi freq t}.
Complex tone_dump(double freq, int n, int tone_grid_size);

/// Integrate-and-dump vector for tones at arbitrary (possibly off-grid) frequencies.
CVector rd_dumps(std::span<const double> freqs, std::span<const Complex> coefficients, int tone_grid_size);

/// R x W chip-and-sum matrix Phi.
Eigen::MatrixXd rd_mixing_matrix(const RdConfig& cfg);

/// W x W map from the coefficient vector z (tone k stored at slot k mod W) to the dump vector f.
CMatrix rd_tone_matrix(int tone_grid_size);

RdMeasurement rd_sample(const HarmonicSpec& spec, const RdConfig& cfg);

/// Coefficient vector z of a harmonic spec on the DFT index grid (slot k mod W).
CVector harmonic_coefficient_vector(const HarmonicSpec& spec);

// ---------------------------------------------------------------------------
// Rate bounds and computational load

/// Landau rate: the Lebesgue measure of the occupied spectrum.
double landau_min_rate(double occupied_measure);

/// Blind minimal rate min(2 * occupancy * f_nyq, f_nyq), occupancy in (0, 1).
double blind_min_rate(double occupancy, double f_nyq);

/// Real-time multiplications per second of MWC recovery on a fixed support: 2 N m f_s.
double mwc_compute_load(int band_count, int channels, double channel_rate);

}  // namespace subnyq
