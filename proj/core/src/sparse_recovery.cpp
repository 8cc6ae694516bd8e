#include "subnyq/sparse_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "subnyq/error.hpp"

namespace subnyq {

SupportSet::SupportSet(std::vector<int> indices) : indices_(std::move(indices))
{
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
  require(indices_.empty() || indices_.front() >= 0, Stage::sparse, "support indices must be non-negative");
}

bool SupportSet::contains(int index) const { return std::binary_search(indices_.begin(), indices_.end(), index); }

void SupportSet::insert(int index)
{
  require(index >= 0, Stage::sparse, "support indices must be non-negative");
  const auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  if (it == indices_.end() || *it != index) indices_.insert(it, index);
}

void SupportSet::check_width(Eigen::Index width) const
{
  if (!indices_.empty() && indices_.back() >= width) {
    std::ostringstream msg;
    msg << "support index " << indices_.back() << " outside matrix width " << width;
    fail(Stage::sparse, ErrorKind::invalid_argument, msg.str());
  }
}

bool SupportSet::includes(const SupportSet& other) const
{
  return std::includes(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end());
}

double SupportSet::jaccard(const SupportSet& other) const
{
  std::vector<int> common;
  std::set_intersection(indices_.begin(), indices_.end(), other.indices_.begin(), other.indices_.end(),
                        std::back_inserter(common));
  const std::size_t unite = size() + other.size() - common.size();
  return unite == 0 ? 1.0 : static_cast<double>(common.size()) / static_cast<double>(unite);
}

CVector SparseSolution::dense(Eigen::Index width) const
{
  support.check_width(width);
  CVector z = CVector::Zero(width);
  for (std::size_t i = 0; i < support.size(); ++i) z(support[i]) = values(static_cast<Eigen::Index>(i));
  return z;
}

double mutual_coherence(const CMatrix& c)
{
  const Eigen::VectorXd norms = c.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    if (norms(j) == 0.0) {
      std::ostringstream msg;
      msg << "column " << j << " is zero";
      fail(Stage::sparse, ErrorKind::invalid_argument, msg.str());
    }
  const CMatrix gram = c.adjoint() * c;
  double mu = 0.0;
  for (Eigen::Index i = 0; i < c.cols(); ++i)
    for (Eigen::Index j = i + 1; j < c.cols(); ++j) mu = std::max(mu, std::abs(gram(i, j)) / (norms(i) * norms(j)));
  return std::min(mu, 1.0);
}

bool unique_if(int k, double mu)
{
  if (mu <= 0.0) return true;
  return k < (1.0 + 1.0 / mu) / 2.0;
}

int max_unique_sparsity(double mu)
{
  if (mu <= 0.0) return std::numeric_limits<int>::max();
  const double bound = (1.0 + 1.0 / mu) / 2.0;
  int k = static_cast<int>(std::ceil(bound)) - 1;
  while (k > 0 && !unique_if(k, mu)) --k;
  return std::max(k, 0);
}

CMatrix restrict_columns(const CMatrix& c, const SupportSet& s)
{
  s.check_width(c.cols());
  CMatrix out(c.rows(), static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = c.col(s[i]);
  return out;
}

CMatrix solve_on_support(const CMatrix& y, const CMatrix& c, const SupportSet& s)
{
  require(y.rows() == c.rows(), Stage::sparse, "measurement and matrix row counts differ");
  if (s.empty()) return CMatrix(0, y.cols());
  const CMatrix cs = restrict_columns(c, s);
  Eigen::ColPivHouseholderQR<CMatrix> qr(cs);
  qr.setThreshold(1e-12);
  if (qr.rank() < cs.cols()) {
    std::ostringstream msg;
    msg << "restricted matrix is rank deficient (rank " << qr.rank() << " < " << cs.cols() << " columns)";
    fail(Stage::sparse, ErrorKind::numerical, msg.str());
  }
  return qr.solve(y);
}

CVector solve_on_support(const CVector& y, const CMatrix& c, const SupportSet& s)
{
  const CMatrix z = solve_on_support(CMatrix(y), c, s);
  return z.col(0);
}

namespace {

struct GreedyResult {
  SupportSet support;
  CMatrix values;
  CMatrix residual;
  std::vector<double> history;
};

// Shared OMP / SOMP loop. A single measurement column reduces to plain OMP.
GreedyResult greedy_pursuit(const CMatrix& y, const CMatrix& c, int max_support, double residual_tol)
{
  require(y.rows() == c.rows(), Stage::sparse, "measurement and matrix row counts differ");
  require(max_support >= 0 && max_support <= c.rows(), Stage::sparse, "max_support must lie in [0, rows(C)]");
  require(residual_tol >= 0.0, Stage::sparse, "residual_tol must be non-negative");

  GreedyResult out;
  out.residual = y;
  out.values = CMatrix(0, y.cols());
  const double y_norm = y.norm();
  out.history.push_back(y_norm);
  if (y_norm == 0.0 || c.cols() == 0) return out;

  const Eigen::VectorXd col_norms = c.colwise().norm().transpose();
  const double numeric_zero = 64.0 * std::numeric_limits<double>::epsilon() * y_norm;

  while (static_cast<int>(out.support.size()) < max_support) {
    const double r_norm = out.residual.norm();
    if (r_norm <= residual_tol * y_norm || r_norm <= numeric_zero) break;

    const Eigen::VectorXd scores = (c.adjoint() * out.residual).rowwise().norm();
    double best = -1.0;
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      if (col_norms(j) == 0.0 || out.support.contains(static_cast<int>(j))) continue;
      best = std::max(best, scores(j) / col_norms(j));
    }
    if (best <= numeric_zero) break;  // residual orthogonal to every remaining column
    int pick = -1;
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      if (col_norms(j) == 0.0 || out.support.contains(static_cast<int>(j))) continue;
      if (scores(j) / col_norms(j) >= best - 1e-12 * best) {
        pick = static_cast<int>(j);
        break;
      }
    }
    out.support.insert(pick);
    out.values = solve_on_support(y, c, out.support);
    out.residual = y - restrict_columns(c, out.support) * out.values;
    out.history.push_back(out.residual.norm());
  }
  return out;
}

}  // namespace

SparseSolution omp(const CVector& y, const CMatrix& c, int max_support, double residual_tol)
{
  GreedyResult g = greedy_pursuit(CMatrix(y), c, max_support, residual_tol);
  SparseSolution s;
  s.support = std::move(g.support);
  s.values = g.values.rows() > 0 ? CVector(g.values.col(0)) : CVector(0);
  s.residual_norm = g.residual.norm();
  s.residual_history = std::move(g.history);
  return s;
}

SupportSet omp_mmv(const CMatrix& v, const CMatrix& c, int max_support, double residual_tol)
{
  return greedy_pursuit(v, c, max_support, residual_tol).support;
}

}  // namespace subnyq
