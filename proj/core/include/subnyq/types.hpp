#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace subnyq {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using ComplexSeq = std::vector<Complex>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr Complex kJ{0.0, 1.0};

/// e^{j*phase}
inline Complex expj(double phase) { return {std::cos(phase), std::sin(phase)}; }

/// Normalized sinc, sin(pi x) / (pi x).
inline double sinc(double x)
{
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

}  // namespace subnyq
