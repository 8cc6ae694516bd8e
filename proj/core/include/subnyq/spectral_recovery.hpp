#pragma once

// Support detection and reconstruction for multiband inputs: CTF over MWC
// samples, slice recovery and resynthesis, and second-order PNS reconstruction.

#include <vector>

#include "subnyq/samplers.hpp"
#include "subnyq/signal_models.hpp"
#include "subnyq/sparse_recovery.hpp"
#include "subnyq/types.hpp"

namespace subnyq {

// ---------------------------------------------------------------------------
// MWC

/// Recovered spectral slices. `support` holds column indices of C; slice l sits in
/// column l + L. Row i of `sequences` is z_l[n] for the i-th support entry.
struct SliceRecovery {
  SupportSet support;
  int harmonic_limit = 0;  // L
  CMatrix sequences;       // |S| x T

  std::vector<int> slice_indices() const;  // l values, ascending
  Eigen::Index length() const noexcept { return sequences.cols(); }
};

/// How the frame V with V V^H = Q is computed.
enum class FrameRoot {
  eigen,              // V = U sqrt(Lambda), eigenvalues below eig_tol * lambda_max dropped
  pivoted_cholesky,   // columns of a diagonally pivoted Cholesky factor, pivots below eig_tol * max diag(Q) dropped
};

struct CtfOptions {
  double eig_tol = 1e-12;
  double residual_tol = 0.0;  // handed to omp_mmv
  bool real_input = false;    // add slice -l whenever l is selected
  FrameRoot frame_root = FrameRoot::eigen;
};

/// Frame V of the measurement block (m x T), so that V V^H = y y^H up to the dropped spectrum.
CMatrix ctf_frame(const CMatrix& y, const CtfOptions& opts = {});

/// Continuous-to-finite support detection: frame construction followed by omp_mmv.
SupportSet ctf(const CMatrix& y, const CMatrix& c, int sparsity_bound, const CtfOptions& opts = {});

/// z_S[n] = pinv(C_S) y[n] for all n.
SliceRecovery recover_slices(const CMatrix& y, const CMatrix& c, const SupportSet& s);

/// Sum over recovered slices of the interpolated z_l shifted back to its spectral position
/// (slice l carries content near -l f_p, so it is modulated by e^{-j 2 pi l f_p t}).
DenseSignal mwc_resynthesize(const SliceRecovery& rec, double aliasing_rate, double grid_rate, double duration);

/// Slices touched by the spectral content of a multiband spec (column indices of C).
/// Slice l covers frequencies f with |f + l f_p| < f_s / 2.
SupportSet true_slice_support(const MultibandSpec& spec, const MwcConfig& cfg, double duration);

// ---------------------------------------------------------------------------
// Second-order PNS for a bandpass signal supported on (f_l, f_u) and its mirror

/// The integer l with f - l B in (-f_u, -f_l), B = f_u - f_l; beta(-f) = -beta(f).
int pns_beta(double f, double f_l, double f_u);

/// All values taken by beta over both spectral sides, ascending.
std::vector<int> pns_beta_values(double f_l, double f_u);

/// min over beta values of |1 - e^{-j 2 pi beta phi B}|.
double pns_phase_margin(double phi, double f_l, double f_u);

/// Best offset among phi_j = j T_s / (candidates + 1), j = 1..candidates.
double select_pns_phase(double f_l, double f_u, int candidates);

/// Reconstruction from y1[n] = x(n T_s), y2[n] = x(n T_s + phi), T_s = 1/(f_u - f_l),
/// returned on a uniform grid of `output_rate` (default 2 f_u) over the sampled duration.
DenseSignal pns_reconstruct(std::span<const Complex> y1, std::span<const Complex> y2, double f_l, double f_u,
                            double phi, double output_rate = 0.0);

}  // namespace subnyq
