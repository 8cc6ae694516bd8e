#pragma once

// Discrete Fourier transform used throughout the library.
//
// Convention: forward X[k] = sum_n x[n] e^{-j 2 pi k n / N} (unnormalized),
// inverse x[n] = (1/N) sum_k X[k] e^{+j 2 pi k n / N}.
//
// A duration-D periodic signal sampled on N grid points has Fourier-series
// coefficients c_q = fft(x)[q mod N] / N, for signed bins q in (-N/2, N/2].

#include <cstddef>
#include <span>

#include "subnyq/types.hpp"

namespace subnyq::dft {

ComplexSeq forward(std::span<const Complex> x);
ComplexSeq inverse(std::span<const Complex> spectrum);

/// Fourier-series coefficients of a periodic grid signal: forward(x) / N.
ComplexSeq series_coefficients(std::span<const Complex> x);

/// Grid samples of a periodic signal from its coefficients: N * inverse(c).
ComplexSeq synthesize(std::span<const Complex> coefficients);

/// Signed frequency index of bin k in (-n/2, n/2].
inline long signed_bin(std::size_t k, std::size_t n)
{
  const auto sk = static_cast<long>(k);
  const auto sn = static_cast<long>(n);
  return (2 * sk > sn) ? sk - sn : sk;
}

/// Storage slot of signed frequency q (q taken modulo n).
inline std::size_t bin_index(long q, std::size_t n)
{
  const auto sn = static_cast<long>(n);
  long r = q % sn;
  if (r < 0) r += sn;
  return static_cast<std::size_t>(r);
}

}  // namespace subnyq::dft
