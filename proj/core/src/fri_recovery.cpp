#include "subnyq/fri_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "subnyq/dft.hpp"
#include "subnyq/error.hpp"

namespace subnyq {

// ---------------------------------------------------------------------------
// Kernels

void LowpassKernel::validate() const
{
  require(k_max >= k_min, Stage::fri_coefficients, "lowpass index set is empty");
  require(period > 0.0, Stage::fri_coefficients, "period must be positive");
}

bool SosKernel::real_valued(double tol) const
{
  if (k_min != -k_max()) return false;
  for (int k = k_min; k <= k_max(); ++k)
    if (std::abs(weight(-k) - std::conj(weight(k))) > tol) return false;
  return true;
}

void SosKernel::validate() const
{
  require(!weights.empty(), Stage::fri_coefficients, "SoS index set is empty");
  require(period > 0.0, Stage::fri_coefficients, "period must be positive");
  for (int k = k_min; k <= k_max(); ++k)
    if (weight(k) == 0.0) {
      std::ostringstream msg;
      msg << "SoS weight b_" << k << " is zero";
      fail(Stage::fri_coefficients, ErrorKind::invalid_argument, msg.str());
    }
}

SosKernel SosKernel::dirichlet(int p, double period)
{
  require(p >= 0, Stage::fri_coefficients, "Dirichlet order must be non-negative");
  return SosKernel{-p, ComplexSeq(static_cast<std::size_t>(2 * p + 1), Complex(1.0, 0.0)), period};
}

int kernel_k_min(const SamplingKernel& kernel)
{
  return std::visit([](const auto& k) { return k.k_min; }, kernel);
}

int kernel_size(const SamplingKernel& kernel)
{
  return std::visit([](const auto& k) { return k.size(); }, kernel);
}

double kernel_period(const SamplingKernel& kernel)
{
  return std::visit([](const auto& k) { return k.period; }, kernel);
}

Complex sos_time_response(const SosKernel& kernel, double t)
{
  if (std::abs(t) > kernel.period / 2.0) return 0.0;
  Complex sum{};
  for (int k = kernel.k_min; k <= kernel.k_max(); ++k) sum += kernel.weight(k) * expj(kTwoPi * k * t / kernel.period);
  return sum;
}

Complex sos_frequency_response(const SosKernel& kernel, double omega)
{
  const double x = omega * kernel.period / kTwoPi;
  Complex sum{};
  for (int k = kernel.k_min; k <= kernel.k_max(); ++k) sum += kernel.weight(k) * sinc(x - k);
  return kernel.period * sum;
}

Complex kernel_lattice_response(const SamplingKernel& kernel, int k)
{
  if (const auto* lp = std::get_if<LowpassKernel>(&kernel)) return (k >= lp->k_min && k <= lp->k_max) ? 1.0 : 0.0;
  const auto& sos = std::get<SosKernel>(kernel);
  if (k < sos.k_min || k > sos.k_max()) return 0.0;
  return sos.period * sos.weight(k);
}

Admissibility kernel_admissible(const SamplingKernel& kernel, const PulseSpectrum& pulse, std::optional<int> pulse_count)
{
  Admissibility out;
  const int k_min = kernel_k_min(kernel);
  const int size = kernel_size(kernel);
  const int k_max = k_min + size - 1;
  const double tau = kernel_period(kernel);
  const auto reject = [&](int k, const std::string& why) {
    out.failing_index = k;
    std::ostringstream msg;
    msg << why << " at k = " << k;
    out.diagnostics = msg.str();
    return out;
  };

  if (pulse_count && size < 2 * *pulse_count + 1) {
    std::ostringstream msg;
    msg << "|K| = " << size << " is below 2L + 1 = " << 2 * *pulse_count + 1;
    out.diagnostics = msg.str();
    return out;
  }
  // SoS kernels are checked through their continuous response, lowpass kernels on the lattice.
  const auto response = [&](int k) -> Complex {
    if (const auto* sos = std::get_if<SosKernel>(&kernel)) return sos_frequency_response(*sos, kTwoPi * k / tau);
    return kernel_lattice_response(kernel, k);
  };
  for (int k = k_min; k <= k_max; ++k) {
    if (std::abs(response(k)) <= 1e-12) return reject(k, "kernel response vanishes inside K");
    const Complex h = pulse(kTwoPi * k / tau);
    if (!std::isfinite(h.real()) || !std::isfinite(h.imag()) || std::abs(h) <= 1e-12)
      return reject(k, "pulse spectrum vanishes inside K");
  }
  for (int k = k_min - size; k <= k_max + size; ++k) {
    if (k >= k_min && k <= k_max) continue;
    if (std::abs(response(k)) > 1e-12) return reject(k, "kernel response is nonzero outside K");
  }
  out.admissible = true;
  out.diagnostics = "admissible";
  return out;
}

ComplexSeq kernel_sample(const DenseSignal& x, const SamplingKernel& kernel)
{
  const double tau = kernel_period(kernel);
  const int k_min = kernel_k_min(kernel);
  const int m = kernel_size(kernel);
  const std::size_t per_period = grid_length(x.grid_rate(), tau);
  require(per_period <= x.size(), Stage::fri_coefficients, "signal shorter than one period");
  require(2 * std::max(std::abs(k_min), std::abs(k_min + m - 1)) < static_cast<int>(per_period), Stage::fri_coefficients,
          "simulation grid too coarse for the kernel bandwidth");
  const std::span<const Complex> first(x.samples().data(), per_period);
  ComplexSeq c(static_cast<std::size_t>(m));

  if (std::holds_alternative<LowpassKernel>(kernel)) {
    const ComplexSeq coeffs = dft::series_coefficients(first);
    for (int n = 0; n < m; ++n) {
      Complex sum{};
      for (int k = k_min; k < k_min + m; ++k)
        sum += coeffs[dft::bin_index(k, per_period)] * expj(kTwoPi * k * n / m);
      c[static_cast<std::size_t>(n)] = sum;  // S = 1 on K
    }
    return c;
  }

  const auto& sos = std::get<SosKernel>(kernel);
  const double dt = 1.0 / x.grid_rate();
  for (int n = 0; n < m; ++n) {
    const double shift = n * tau / m;
    Complex sum{};
    for (std::size_t p = 0; p < per_period; ++p) {
      // Periodized kernel: the rect spans exactly one period.
      Complex g{};
      const double t = static_cast<double>(p) * dt - shift;
      for (int k = sos.k_min; k <= sos.k_max(); ++k) g += sos.weight(k) * expj(kTwoPi * k * t / tau);
      sum += first[p] * std::conj(g);
    }
    c[static_cast<std::size_t>(n)] = sum * dt;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Recovery stages

FourierCoeffs coeffs_from_samples(std::span<const Complex> samples, const SamplingKernel& kernel)
{
  std::visit([](const auto& k) { k.validate(); }, kernel);
  const int m = kernel_size(kernel);
  require(static_cast<int>(samples.size()) == m, Stage::fri_coefficients, "sample count must equal |K|");
  const ComplexSeq spectrum = dft::forward(samples);
  FourierCoeffs out;
  out.k_min = kernel_k_min(kernel);
  out.period = kernel_period(kernel);
  out.values.resize(static_cast<std::size_t>(m));
  for (int k = out.k_min; k < out.k_min + m; ++k) {
    const Complex s = std::conj(kernel_lattice_response(kernel, k));
    if (std::abs(s) < 1e-12) {
      std::ostringstream msg;
      msg << "kernel response vanishes at k = " << k;
      fail(Stage::fri_coefficients, ErrorKind::numerical, msg.str());
    }
    out.values[static_cast<std::size_t>(k - out.k_min)] = spectrum[dft::bin_index(k, static_cast<std::size_t>(m))] / (static_cast<double>(m) * s);
  }
  return out;
}

ComplexSeq annihilating_filter(const FourierCoeffs& x, int pulse_count)
{
  const int big_l = pulse_count;
  require(big_l >= 1, Stage::fri_annihilation, "pulse count must be positive");
  require(x.size() >= 2 * big_l + 1, Stage::fri_annihilation, "need at least 2L + 1 Fourier coefficients");
  const int rows = x.size() - big_l;
  CMatrix toeplitz(rows, big_l + 1);
  for (int r = 0; r < rows; ++r) {
    const int k = x.k_min + big_l + r;
    for (int i = 0; i <= big_l; ++i) toeplitz(r, i) = x[k - i];
  }
  Eigen::JacobiSVD<CMatrix> svd(toeplitz, Eigen::ComputeFullV);
  const Eigen::VectorXd sigma = svd.singularValues();
  const double top = sigma.size() ? sigma(0) : 0.0;
  int detected = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > 1e-10 * top && top > 0.0) ++detected;
  if (detected < big_l) {
    std::ostringstream msg;
    msg << "coefficients hold " << detected << " exponential(s), fewer than L = " << big_l;
    fail(Stage::fri_annihilation, ErrorKind::numerical, msg.str());
  }
  const CVector null = svd.matrixV().col(big_l);
  if (std::abs(null(0)) < 1e-10)
    fail(Stage::fri_annihilation, ErrorKind::numerical, "annihilating filter has a vanishing leading coefficient");
  ComplexSeq a(static_cast<std::size_t>(big_l + 1));
  for (int i = 0; i <= big_l; ++i) a[static_cast<std::size_t>(i)] = null(i) / null(0);
  return a;
}

DelayEstimate delays_from_filter(std::span<const Complex> filter, double period)
{
  require(filter.size() >= 2, Stage::fri_roots, "filter must have degree >= 1");
  require(period > 0.0, Stage::fri_roots, "period must be positive");
  require(std::abs(filter[0]) > 0.0, Stage::fri_roots, "filter leading coefficient is zero");
  const auto degree = static_cast<Eigen::Index>(filter.size() - 1);

  // Companion matrix of z^L + A1 z^{L-1} + ... + AL.
  CMatrix companion = CMatrix::Zero(degree, degree);
  for (Eigen::Index i = 0; i < degree; ++i) companion(0, i) = -filter[static_cast<std::size_t>(i + 1)] / filter[0];
  for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<CMatrix> es(companion, false);
  if (es.info() != Eigen::Success) fail(Stage::fri_roots, ErrorKind::numerical, "companion eigenvalue solve failed");
  const CVector roots = es.eigenvalues();

  for (Eigen::Index i = 0; i < degree; ++i)
    for (Eigen::Index j = i + 1; j < degree; ++j)
      if (std::abs(roots(i) - roots(j)) < 1e-9) {
        std::ostringstream msg;
        msg << "repeated root " << roots(i) << ": delays are not distinct";
        fail(Stage::fri_roots, ErrorKind::numerical, msg.str());
      }

  std::vector<std::pair<double, double>> found;
  for (Eigen::Index i = 0; i < degree; ++i) {
    double t = -period * std::arg(roots(i)) / kTwoPi;
    t = std::fmod(t, period);
    if (t < 0.0) t += period;
    if (t >= period) t -= period;
    found.emplace_back(t, std::abs(roots(i)));
  }
  std::sort(found.begin(), found.end());
  DelayEstimate out;
  for (const auto& [t, mag] : found) {
    out.delays.push_back(t);
    out.root_magnitudes.push_back(mag);
  }
  return out;
}

ComplexSeq amplitudes_from_delays(const FourierCoeffs& x, std::span<const double> delays, const PulseSpectrum& pulse)
{
  require(!delays.empty(), Stage::fri_amplitudes, "no delays given");
  require(x.size() >= static_cast<int>(delays.size()), Stage::fri_amplitudes, "fewer coefficients than delays");
  const double tau = x.period;
  CMatrix v(x.size(), static_cast<Eigen::Index>(delays.size()));
  CVector rhs(x.size());
  for (int k = x.k_min; k <= x.k_max(); ++k) {
    const Complex h = pulse(kTwoPi * k / tau);
    if (!(std::abs(h) > 1e-12) || !std::isfinite(std::abs(h))) {
      std::ostringstream msg;
      msg << "pulse spectrum vanishes at k = " << k;
      fail(Stage::fri_amplitudes, ErrorKind::numerical, msg.str());
    }
    const int r = k - x.k_min;
    rhs(r) = tau * x[k] / h;
    for (std::size_t l = 0; l < delays.size(); ++l)
      v(r, static_cast<Eigen::Index>(l)) = expj(-kTwoPi * k * delays[l] / tau);
  }
  Eigen::JacobiSVD<CMatrix> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sigma = svd.singularValues();
  if (sigma(sigma.size() - 1) < 1e-12 * sigma(0))
    fail(Stage::fri_amplitudes, ErrorKind::numerical, "Vandermonde system is rank deficient (delays too close)");
  const CVector a = svd.solve(rhs);
  return ComplexSeq(a.data(), a.data() + a.size());
}

FriSpec fri_recover(std::span<const Complex> samples, const SamplingKernel& kernel, int pulse_count,
                    const PulseSpectrum& pulse)
{
  const FourierCoeffs x = coeffs_from_samples(samples, kernel);
  FourierCoeffs whitened = x;
  for (int k = x.k_min; k <= x.k_max(); ++k) {
    const Complex h = pulse(kTwoPi * k / x.period);
    if (!(std::abs(h) > 1e-12)) {
      std::ostringstream msg;
      msg << "pulse spectrum vanishes at k = " << k;
      fail(Stage::fri_annihilation, ErrorKind::numerical, msg.str());
    }
    whitened.values[static_cast<std::size_t>(k - x.k_min)] /= h;
  }
  const ComplexSeq filter = annihilating_filter(whitened, pulse_count);
  const DelayEstimate est = delays_from_filter(filter, x.period);
  FriSpec out;
  out.period = x.period;
  out.delays = est.delays;
  out.amplitudes = amplitudes_from_delays(x, est.delays, pulse);
  out.pulse = pulse;
  return out;
}

}  // namespace subnyq
