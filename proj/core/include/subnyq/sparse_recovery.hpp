#pragma once

// Sparse and jointly sparse solutions of underdetermined systems y = C z.

#include <initializer_list>
#include <vector>

#include "subnyq/types.hpp"

namespace subnyq {

/// Strictly increasing list of column indices.
class SupportSet {
public:
  SupportSet() = default;
  /// Sorts and deduplicates; negative indices are rejected.
  explicit SupportSet(std::vector<int> indices);
  SupportSet(std::initializer_list<int> indices) : SupportSet(std::vector<int>(indices)) {}

  const std::vector<int>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(int index) const;
  int operator[](std::size_t i) const { return indices_[i]; }

  void insert(int index);
  /// Throws unless every index is below `width`.
  void check_width(Eigen::Index width) const;

  bool includes(const SupportSet& other) const;  // other is a subset of this
  double jaccard(const SupportSet& other) const;  // 1 when both are empty

  auto begin() const noexcept { return indices_.begin(); }
  auto end() const noexcept { return indices_.end(); }

  friend bool operator==(const SupportSet&, const SupportSet&) = default;

private:
  std::vector<int> indices_;
};

struct SparseSolution {
  SupportSet support;
  CVector values;  // aligned with support.indices()
  double residual_norm = 0.0;
  std::vector<double> residual_history;  // ||r|| before the first and after every iteration

  /// Dense coefficient vector of the given length.
  CVector dense(Eigen::Index width) const;
};

/// max_{i != j} |<C_i, C_j>| / (||C_i|| ||C_j||); 0 for a single column.
double mutual_coherence(const CMatrix& c);

/// Coherence uniqueness guarantee k < (1 + 1/mu) / 2.
bool unique_if(int k, double mu);

/// Largest sparsity admitted by unique_if for coherence mu.
int max_unique_sparsity(double mu);

/// Orthogonal matching pursuit with normalized correlations. Stops after
/// max_support selections or once ||r|| <= residual_tol * ||y||.
SparseSolution omp(const CVector& y, const CMatrix& c, int max_support, double residual_tol = 0.0);

/// Simultaneous OMP over the columns of V; the score of column j is
/// || C_j^H R ||_2 / ||C_j||. Returns the shared row support.
SupportSet omp_mmv(const CMatrix& v, const CMatrix& c, int max_support, double residual_tol = 0.0);

/// Least squares on the columns of C in S via column-pivoted QR; one solution column
/// per column of y. Throws on rank deficiency.
CMatrix solve_on_support(const CMatrix& y, const CMatrix& c, const SupportSet& s);
CVector solve_on_support(const CVector& y, const CMatrix& c, const SupportSet& s);

/// Columns of C restricted to S.
CMatrix restrict_columns(const CMatrix& c, const SupportSet& s);

}  // namespace subnyq
