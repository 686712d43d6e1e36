#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace attmpc {

/// Up-looking sparse LDL^T factorization with approximate-minimum-degree
/// ordering, P A P^T = L D L^T. No pivoting: intended for quasi-definite
/// matrices (regularized KKT systems), where the factorization exists for any
/// symmetric permutation.
///
/// analyze() allocates everything; factorize() and solve_in_place() perform no
/// heap allocation, so values may be refreshed mid-solve (e.g. penalty
/// updates) without touching the allocator.
class SparseLdlt {
 public:
  /// `upper` holds the upper triangle (row <= col) of the symmetric matrix,
  /// compressed. Symbolic analysis + first numeric factorization.
  void analyze(const Eigen::SparseMatrix<double>& upper);

  /// Numeric refactorization. The matrix must have the identical nonzero
  /// pattern (same object layout) as the one given to analyze().
  void factorize(const Eigen::SparseMatrix<double>& upper);

  /// x <- (P^T L^-T D^-1 L^-1 P) x.
  void solve_in_place(Eigen::VectorXd& x) const;

  int dimension() const { return n_; }
  std::size_t factor_nonzeros() const { return lx_.size(); }
  std::size_t workspace_bytes() const;
  bool analyzed() const { return n_ > 0; }

 private:
  void numeric(const double* cx);
  void refresh_permuted_values(const Eigen::SparseMatrix<double>& upper);

  int n_ = 0;
  std::vector<int> old_of_new_;  // permutation: original index of permuted row
  std::vector<int> new_of_old_;

  // permuted upper-triangular matrix in CSC
  std::vector<int> cp_, ci_;
  std::vector<double> cx_;
  std::vector<int> value_map_;  // source nonzero position -> cx_ index

  // factor (strictly lower part of L, unit diagonal implicit), CSC
  std::vector<int> lp_, li_, lnz_;
  std::vector<double> lx_;
  std::vector<double> d_;
  std::vector<int> parent_, flag_, pattern_;
  mutable std::vector<double> y_;
  mutable Eigen::VectorXd work_;
};

}  // namespace attmpc
