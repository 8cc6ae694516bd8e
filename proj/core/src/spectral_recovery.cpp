#include "subnyq/spectral_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "subnyq/dft.hpp"
#include "subnyq/error.hpp"

namespace subnyq {
namespace {

long checked_integer(double x, const char* what)
{
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x))) {
    std::ostringstream msg;
    msg << what << " = " << x << " is not an integer";
    fail(Stage::spectral, ErrorKind::invalid_argument, msg.str());
  }
  return static_cast<long>(r);
}

// Same rule the band generator uses for its content half width.
long largest_below(double x)
{
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<long>(r) - 1;
  return static_cast<long>(std::floor(x));
}

}  // namespace

std::vector<int> SliceRecovery::slice_indices() const
{
  std::vector<int> out;
  for (int j : support) out.push_back(j - harmonic_limit);
  return out;
}

// ---------------------------------------------------------------------------
// CTF

CMatrix ctf_frame(const CMatrix& y, const CtfOptions& opts)
{
  require(y.rows() > 0 && y.cols() > 0, Stage::spectral, "empty measurement block");
  require(opts.eig_tol >= 0.0, Stage::spectral, "eig_tol must be non-negative");
  const CMatrix q = y * y.adjoint();

  if (opts.frame_root == FrameRoot::eigen) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(q);
    if (es.info() != Eigen::Success) fail(Stage::spectral, ErrorKind::numerical, "eigendecomposition of Q failed");
    const Eigen::VectorXd& lambda = es.eigenvalues();
    const double lambda_max = lambda.size() ? lambda.maxCoeff() : 0.0;
    std::vector<Eigen::Index> keep;
    if (lambda_max > 0.0)
      for (Eigen::Index i = lambda.size() - 1; i >= 0; --i)
        if (lambda(i) > opts.eig_tol * lambda_max) keep.push_back(i);
    CMatrix v(q.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
      v.col(static_cast<Eigen::Index>(k)) = es.eigenvectors().col(keep[k]) * std::sqrt(lambda(keep[k]));
    return v;
  }

  // Diagonally pivoted Cholesky in the original coordinates: each step peels off the
  // rank-one term v v^H of the largest remaining pivot. Stops once every remaining
  // pivot is below eig_tol times the largest diagonal entry of Q.
  CMatrix residual = q;
  const double d_max = q.diagonal().real().maxCoeff();
  std::vector<CVector> cols;
  while (d_max > 0.0 && static_cast<Eigen::Index>(cols.size()) < q.rows()) {
    Eigen::Index pivot = 0;
    const double d = residual.diagonal().real().maxCoeff(&pivot);
    if (!(d > opts.eig_tol * d_max)) break;
    CVector v = residual.col(pivot) / std::sqrt(d);
    residual -= v * v.adjoint();
    cols.push_back(std::move(v));
  }
  CMatrix v(q.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = cols[k];
  return v;
}

SupportSet ctf(const CMatrix& y, const CMatrix& c, int sparsity_bound, const CtfOptions& opts)
{
  require(y.rows() == c.rows(), Stage::spectral, "measurement block and C disagree on m");
  require(sparsity_bound >= 0 && sparsity_bound <= c.rows(), Stage::spectral, "sparsity bound must lie in [0, m]");
  const CMatrix v = ctf_frame(y, opts);
  SupportSet s = omp_mmv(v, c, sparsity_bound, opts.residual_tol);
  if (opts.real_input) {
    const int last = static_cast<int>(c.cols()) - 1;
    for (int j : std::vector<int>(s.indices())) s.insert(last - j);
  }
  return s;
}

SliceRecovery recover_slices(const CMatrix& y, const CMatrix& c, const SupportSet& s)
{
  require(c.cols() % 2 == 1, Stage::spectral, "C must have an odd number of columns (l = -L..L)");
  SliceRecovery rec;
  rec.support = s;
  rec.harmonic_limit = static_cast<int>((c.cols() - 1) / 2);
  rec.sequences = solve_on_support(y, c, s);
  return rec;
}

DenseSignal mwc_resynthesize(const SliceRecovery& rec, double aliasing_rate, double grid_rate, double duration)
{
  require(aliasing_rate > 0.0, Stage::spectral, "f_p must be positive");
  require(rec.sequences.rows() == static_cast<Eigen::Index>(rec.support.size()), Stage::spectral,
          "one sequence per support index expected");
  const std::size_t g = grid_length(grid_rate, duration);
  if (rec.support.empty()) return DenseSignal(ComplexSeq(g), grid_rate);
  const long period_bins = checked_integer(aliasing_rate * duration, "f_p * duration");
  const auto t_len = static_cast<std::size_t>(rec.length());
  require(t_len >= 1, Stage::spectral, "slice sequences are empty");

  ComplexSeq spectrum(g);
  ComplexSeq row(t_len);
  const std::vector<int> slices = rec.slice_indices();
  for (std::size_t i = 0; i < slices.size(); ++i) {
    for (std::size_t n = 0; n < t_len; ++n) row[n] = rec.sequences(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n));
    const ComplexSeq z = dft::series_coefficients(row);
    for (std::size_t slot = 0; slot < t_len; ++slot) {
      const long target = dft::signed_bin(slot, t_len) - slices[i] * period_bins;
      if (2 * std::abs(target) > static_cast<long>(g)) {
        std::ostringstream msg;
        msg << "slice " << slices[i] << " does not fit on a grid of rate " << grid_rate;
        fail(Stage::spectral, ErrorKind::invalid_argument, msg.str());
      }
      spectrum[dft::bin_index(target, g)] += z[slot];
    }
  }
  return DenseSignal(dft::synthesize(spectrum), grid_rate);
}

SupportSet true_slice_support(const MultibandSpec& spec, const MwcConfig& cfg, double duration)
{
  spec.validate();
  cfg.validate();
  require(!spec.carriers.empty(), Stage::spectral, "true support needs carrier positions");
  const long period_bins = checked_integer(cfg.aliasing_rate * duration, "f_p * duration");
  const double half_pass = cfg.channel_rate * duration / 2.0;  // slice half width in bins
  const int big_l = cfg.harmonic_limit();

  long half = 0;
  switch (spec.content) {
    case BandContent::zero: return {};
    case BandContent::constant:
      if (spec.constant_i == 0.0 && spec.constant_q == 0.0) return {};
      half = 0;
      break;
    case BandContent::random_gaussian: half = largest_below(spec.band_width * duration / 2.0); break;
  }

  SupportSet s;
  for (double f : spec.carriers) {
    const long carrier = checked_integer(f * duration, "carrier * duration");
    for (long sign : {1L, -1L})
      for (long k = -half; k <= half; ++k) {
        const long q = sign * carrier + k;
        const long centre = static_cast<long>(std::lround(-static_cast<double>(q) / static_cast<double>(period_bins)));
        for (long l = centre - 1; l <= centre + 1; ++l)
          if (l >= -big_l && l <= big_l && std::abs(static_cast<double>(q + l * period_bins)) < half_pass)
            s.insert(static_cast<int>(l + big_l));
      }
  }
  return s;
}

// ---------------------------------------------------------------------------
// PNS

int pns_beta(double f, double f_l, double f_u)
{
  require(f_l >= 0.0 && f_l < f_u, Stage::spectral, "band edges must satisfy 0 <= f_l < f_u");
  if (f < 0.0) return -pns_beta(-f, f_l, f_u);
  if (!(f > f_l && f < f_u)) {
    std::ostringstream msg;
    msg << "frequency " << f << " lies outside the band (" << f_l << ", " << f_u << ")";
    fail(Stage::spectral, ErrorKind::invalid_argument, msg.str());
  }
  const double b = f_u - f_l;
  const int limit = static_cast<int>(std::ceil(2.0 * f_u / b)) + 1;
  for (int l = -limit; l <= limit; ++l) {
    const double folded = f - l * b;
    if (folded > -f_u && folded < -f_l) return l;
  }
  std::ostringstream msg;
  msg << "no alias index folds the negative band onto " << f;
  fail(Stage::spectral, ErrorKind::invalid_argument, msg.str());
}

std::vector<int> pns_beta_values(double f_l, double f_u)
{
  require(f_l >= 0.0 && f_l < f_u, Stage::spectral, "band edges must satisfy 0 <= f_l < f_u");
  const double b = f_u - f_l;
  const double lo = 2.0 * f_l / b;
  const double hi = 2.0 * f_u / b;
  std::set<int> values;
  for (int l = static_cast<int>(std::floor(lo)); l <= static_cast<int>(std::ceil(hi)); ++l)
    if (l > lo + 1e-12 * hi && l < hi - 1e-12 * hi) {
      values.insert(l);
      values.insert(-l);
    }
  return {values.begin(), values.end()};
}

double pns_phase_margin(double phi, double f_l, double f_u)
{
  const double b = f_u - f_l;
  double margin = std::numeric_limits<double>::infinity();
  for (int beta : pns_beta_values(f_l, f_u)) margin = std::min(margin, std::abs(1.0 - expj(-kTwoPi * beta * phi * b)));
  return margin;
}

double select_pns_phase(double f_l, double f_u, int candidates)
{
  require(candidates >= 1, Stage::spectral, "need at least one candidate offset");
  require(f_l >= 0.0 && f_l < f_u, Stage::spectral, "band edges must satisfy 0 <= f_l < f_u");
  const double t_s = 1.0 / (f_u - f_l);
  double best_phi = 0.0;
  double best_margin = -1.0;
  for (int j = 1; j <= candidates; ++j) {
    const double phi = j * t_s / (candidates + 1);
    const double margin = pns_phase_margin(phi, f_l, f_u);
    if (margin > best_margin) {
      best_margin = margin;
      best_phi = phi;
    }
  }
  if (best_margin < 1e-6)
    fail(Stage::spectral, ErrorKind::numerical, "no candidate offset keeps the two PNS channels independent");
  return best_phi;
}

DenseSignal pns_reconstruct(std::span<const Complex> y1, std::span<const Complex> y2, double f_l, double f_u,
                            double phi, double output_rate)
{
  require(!y1.empty() && y1.size() == y2.size(), Stage::spectral, "PNS channels must be non-empty and equally long");
  require(f_l >= 0.0 && f_l < f_u, Stage::spectral, "band edges must satisfy 0 <= f_l < f_u");
  const double b = f_u - f_l;
  require(phi > 0.0 && phi < 1.0 / b, Stage::spectral, "offset phi must lie in (0, T_s)");
  const std::vector<int> betas = pns_beta_values(f_l, f_u);
  for (auto it = betas.rbegin(); it != betas.rend(); ++it) {  // positive values first
    const int beta = *it;
    if (std::abs(1.0 - expj(-kTwoPi * beta * phi * b)) < 1e-6) {
      std::ostringstream msg;
      msg << "offset " << phi << " makes the channels dependent for beta = " << beta;
      fail(Stage::spectral, ErrorKind::numerical, msg.str());
    }
  }
  const std::size_t n = y1.size();
  const double duration = static_cast<double>(n) / b;
  if (output_rate <= 0.0) output_rate = 2.0 * f_u;
  require(output_rate >= 2.0 * f_u * (1.0 - 1e-12), Stage::spectral, "output rate below 2 f_u");
  const std::size_t g = grid_length(output_rate, duration);

  const ComplexSeq c1 = dft::series_coefficients(y1);
  const ComplexSeq c2 = dft::series_coefficients(y2);

  // Group the band bins by residue modulo n: each class aliases onto one DFT bin.
  std::vector<std::vector<long>> classes(n);
  const long first = static_cast<long>(std::floor(f_l * duration)) + 1;
  const long last = static_cast<long>(std::ceil(f_u * duration)) - 1;
  for (long q = first; q <= last; ++q) {
    if (!(q > f_l * duration * (1 + 1e-12) && q < f_u * duration * (1 - 1e-12))) continue;
    if (q == 0) continue;
    classes[dft::bin_index(q, n)].push_back(q);
    classes[dft::bin_index(-q, n)].push_back(-q);
  }

  ComplexSeq spectrum(g);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& qs = classes[r];
    if (qs.empty()) continue;
    if (qs.size() == 1) {
      spectrum[dft::bin_index(qs[0], g)] = c1[r];
      continue;
    }
    require(qs.size() == 2, Stage::spectral, "band wider than 1/T_s");
    const Complex e0 = expj(kTwoPi * static_cast<double>(qs[0]) * phi / duration);
    const Complex e1 = expj(kTwoPi * static_cast<double>(qs[1]) * phi / duration);
    const Complex det = e1 - e0;
    spectrum[dft::bin_index(qs[0], g)] = (c1[r] * e1 - c2[r]) / det;
    spectrum[dft::bin_index(qs[1], g)] = (c2[r] - c1[r] * e0) / det;
  }
  return DenseSignal(dft::synthesize(spectrum), output_rate);
}

}  // namespace subnyq
