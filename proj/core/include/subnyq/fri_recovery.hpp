#pragma once

// Finite-rate-of-innovation recovery of periodic pulse streams: sampling kernels,
// Fourier coefficients from uniform samples, annihilating filter, delay and
// amplitude estimation.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "subnyq/signal_models.hpp"
#include "subnyq/types.hpp"

namespace subnyq {

/// Ideal lowpass kernel passing the consecutive indices K = k_min..k_max unchanged.
struct LowpassKernel {
  int k_min = 0;
  int k_max = 0;
  double period = 1.0;

  int size() const { return k_max - k_min + 1; }
  void validate() const;
  static LowpassKernel symmetric(int half_width, double period) { return {-half_width, half_width, period}; }
};

/// Sum-of-sincs kernel g(t) = rect(t / tau) sum_{k in K} b_k e^{j 2 pi k t / tau}.
struct SosKernel {
  int k_min = 0;
  ComplexSeq weights;  // b_k for k = k_min .. k_min + |K| - 1
  double period = 1.0;

  int size() const { return static_cast<int>(weights.size()); }
  int k_max() const { return k_min + size() - 1; }
  Complex weight(int k) const { return weights[static_cast<std::size_t>(k - k_min)]; }
  /// True when b_{-k} = conj(b_k) on a symmetric K, i.e. g(t) is real.
  bool real_valued(double tol = 1e-12) const;
  void validate() const;

  /// b_k = 1 on -p..p: the periodic Dirichlet kernel inside one period.
  static SosKernel dirichlet(int p, double period);
};

using SamplingKernel = std::variant<LowpassKernel, SosKernel>;

int kernel_k_min(const SamplingKernel& kernel);
int kernel_size(const SamplingKernel& kernel);
double kernel_period(const SamplingKernel& kernel);

/// g(t); zero for |t| > tau / 2.
Complex sos_time_response(const SosKernel& kernel, double t);

/// G(omega) = integral g(t) e^{-j omega t} dt = tau sum_k b_k sinc(omega tau / (2 pi) - k).
Complex sos_frequency_response(const SosKernel& kernel, double omega);

/// S(2 pi k / tau) at an integer lattice point (exact zero off K).
Complex kernel_lattice_response(const SamplingKernel& kernel, int k);

struct Admissibility {
  bool admissible = false;
  std::optional<int> failing_index;  // lattice index k that broke a condition
  std::string diagnostics;

  explicit operator bool() const { return admissible; }
};

/// Checks S != 0 on K, S = 0 on the lattice outside K (over a window of |K| indices on each side)
/// and H != 0 on K, each against 1e-12. When pulse_count is given, also |K| >= 2L + 1.
Admissibility kernel_admissible(const SamplingKernel& kernel, const PulseSpectrum& pulse,
                                std::optional<int> pulse_count = std::nullopt);

/// c_n = <x, s(. - n tau / M)> for n = 0..M-1 over the first period of x, M = |K|.
/// Lowpass kernels are applied by DFT masking; SoS kernels by a grid inner product,
/// exact because the product of x with the periodized kernel is a trigonometric polynomial.
ComplexSeq kernel_sample(const DenseSignal& x, const SamplingKernel& kernel);

/// Fourier-series coefficients X[k] on consecutive indices k_min..k_min + size - 1.
struct FourierCoeffs {
  int k_min = 0;
  ComplexSeq values;
  double period = 1.0;

  int size() const { return static_cast<int>(values.size()); }
  int k_max() const { return k_min + size() - 1; }
  Complex operator[](int k) const { return values[static_cast<std::size_t>(k - k_min)]; }
};

/// X[k] = DFT{c}[k mod M] / (M conj(S(2 pi k / tau))), M = |K| = c.size().
FourierCoeffs coeffs_from_samples(std::span<const Complex> samples, const SamplingKernel& kernel);

/// Null vector of the Toeplitz system sum_i A[i] X[k - i] = 0, normalized to A[0] = 1.
ComplexSeq annihilating_filter(const FourierCoeffs& x, int pulse_count);

struct DelayEstimate {
  std::vector<double> delays;           // ascending in [0, tau)
  std::vector<double> root_magnitudes;  // aligned with delays
};

/// Roots u of A(z) via companion-matrix eigenvalues, t = -tau arg(u) / (2 pi) mod tau.
DelayEstimate delays_from_filter(std::span<const Complex> filter, double period);

/// Least-squares a from tau X[k] / H(2 pi k / tau) = sum_l a_l e^{-j 2 pi k t_l / tau}.
ComplexSeq amplitudes_from_delays(const FourierCoeffs& x, std::span<const double> delays, const PulseSpectrum& pulse);

/// Full pipeline: coefficients, annihilating filter on X / H, roots, amplitudes.
FriSpec fri_recover(std::span<const Complex> samples, const SamplingKernel& kernel, int pulse_count,
                    const PulseSpectrum& pulse);

}  // namespace subnyq
