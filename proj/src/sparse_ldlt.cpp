#include "attmpc/sparse_ldlt.hpp"

#include <stdexcept>

#include <Eigen/OrderingMethods>

namespace attmpc {

void SparseLdlt::analyze(const Eigen::SparseMatrix<double>& upper) {
  if (upper.rows() != upper.cols()) {
    throw std::invalid_argument("SparseLdlt: matrix must be square");
  }
  if (!upper.isCompressed()) {
    throw std::invalid_argument("SparseLdlt: matrix must be compressed");
  }
  n_ = static_cast<int>(upper.rows());

  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
  Eigen::AMDOrdering<int>()(upper, perm);
  // (P A P^T)(i, j) = A(idx[i], idx[j]) for Eigen permutation indices.
  old_of_new_.assign(perm.indices().data(), perm.indices().data() + n_);
  new_of_old_.resize(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) new_of_old_[static_cast<std::size_t>(old_of_new_[i])] = i;

  // Build the permuted upper triangle and remember where each source nonzero
  // lands so factorize() can refresh values without reallocating.
  const int nnz = static_cast<int>(upper.nonZeros());
  std::vector<int> rows(static_cast<std::size_t>(nnz));
  std::vector<int> cols(static_cast<std::size_t>(nnz));
  value_map_.assign(static_cast<std::size_t>(nnz), -1);
  std::vector<int> col_counts(static_cast<std::size_t>(n_), 0);
  {
    int p = 0;
    for (int k = 0; k < upper.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(upper, k); it; ++it, ++p) {
        if (it.row() > it.col()) {
          throw std::invalid_argument("SparseLdlt: input must contain only the upper triangle");
        }
        const int pi = new_of_old_[static_cast<std::size_t>(it.row())];
        const int pj = new_of_old_[static_cast<std::size_t>(it.col())];
        rows[static_cast<std::size_t>(p)] = std::min(pi, pj);
        cols[static_cast<std::size_t>(p)] = std::max(pi, pj);
        ++col_counts[static_cast<std::size_t>(std::max(pi, pj))];
      }
    }
  }
  cp_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int j = 0; j < n_; ++j) cp_[static_cast<std::size_t>(j) + 1] = cp_[static_cast<std::size_t>(j)] + col_counts[static_cast<std::size_t>(j)];
  ci_.assign(static_cast<std::size_t>(nnz), 0);
  cx_.assign(static_cast<std::size_t>(nnz), 0.0);
  {
    std::vector<int> next(cp_.begin(), cp_.end() - 1);
    for (int p = 0; p < nnz; ++p) {
      const int dst = next[static_cast<std::size_t>(cols[static_cast<std::size_t>(p)])]++;
      ci_[static_cast<std::size_t>(dst)] = rows[static_cast<std::size_t>(p)];
      value_map_[static_cast<std::size_t>(p)] = dst;
    }
  }

  // Symbolic: elimination tree and column counts of L.
  parent_.assign(static_cast<std::size_t>(n_), -1);
  flag_.assign(static_cast<std::size_t>(n_), -1);
  lnz_.assign(static_cast<std::size_t>(n_), 0);
  std::vector<int> counts(static_cast<std::size_t>(n_), 0);
  for (int k = 0; k < n_; ++k) {
    parent_[static_cast<std::size_t>(k)] = -1;
    flag_[static_cast<std::size_t>(k)] = k;
    for (int p = cp_[static_cast<std::size_t>(k)]; p < cp_[static_cast<std::size_t>(k) + 1]; ++p) {
      int i = ci_[static_cast<std::size_t>(p)];
      while (i < k && flag_[static_cast<std::size_t>(i)] != k) {
        if (parent_[static_cast<std::size_t>(i)] == -1) parent_[static_cast<std::size_t>(i)] = k;
        ++counts[static_cast<std::size_t>(i)];
        flag_[static_cast<std::size_t>(i)] = k;
        i = parent_[static_cast<std::size_t>(i)];
      }
    }
  }
  lp_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int j = 0; j < n_; ++j) lp_[static_cast<std::size_t>(j) + 1] = lp_[static_cast<std::size_t>(j)] + counts[static_cast<std::size_t>(j)];
  li_.assign(static_cast<std::size_t>(lp_[static_cast<std::size_t>(n_)]), 0);
  lx_.assign(li_.size(), 0.0);
  d_.assign(static_cast<std::size_t>(n_), 0.0);
  pattern_.assign(static_cast<std::size_t>(n_), 0);
  y_.assign(static_cast<std::size_t>(n_), 0.0);
  work_.resize(n_);

  numeric(cx_.data());
}

void SparseLdlt::refresh_permuted_values(const Eigen::SparseMatrix<double>& upper) {
  if (static_cast<std::size_t>(upper.nonZeros()) != value_map_.size()) {
    throw std::invalid_argument("SparseLdlt: pattern changed since analyze()");
  }
  const double* vals = upper.valuePtr();
  for (std::size_t p = 0; p < value_map_.size(); ++p) {
    cx_[static_cast<std::size_t>(value_map_[p])] = vals[p];
  }
}

void SparseLdlt::factorize(const Eigen::SparseMatrix<double>& upper) {
  refresh_permuted_values(upper);
  numeric(cx_.data());
}

void SparseLdlt::numeric(const double* cx) {
  // Up-looking LDL^T: row k of L by a sparse triangular solve whose pattern
  // is the elimination-tree reach of column k of the permuted matrix.
  // Visited marks must start clean: a stale mark from an earlier pass at the
  // same column index would cut the pattern walk short.
  std::fill(flag_.begin(), flag_.end(), -1);
  std::fill(lnz_.begin(), lnz_.end(), 0);
  for (int k = 0; k < n_; ++k) {
    y_[static_cast<std::size_t>(k)] = 0.0;
    int top = n_;
    flag_[static_cast<std::size_t>(k)] = k;
    for (int p = cp_[static_cast<std::size_t>(k)]; p < cp_[static_cast<std::size_t>(k) + 1]; ++p) {
      const int row = ci_[static_cast<std::size_t>(p)];
      if (row > k) continue;
      y_[static_cast<std::size_t>(row)] += cx[p];
      int len = 0;
      int i = row;
      while (flag_[static_cast<std::size_t>(i)] != k) {
        pattern_[static_cast<std::size_t>(len++)] = i;
        flag_[static_cast<std::size_t>(i)] = k;
        i = parent_[static_cast<std::size_t>(i)];
      }
      while (len > 0) pattern_[static_cast<std::size_t>(--top)] = pattern_[static_cast<std::size_t>(--len)];
    }
    d_[static_cast<std::size_t>(k)] = y_[static_cast<std::size_t>(k)];
    y_[static_cast<std::size_t>(k)] = 0.0;
    for (; top < n_; ++top) {
      const int i = pattern_[static_cast<std::size_t>(top)];
      const double yi = y_[static_cast<std::size_t>(i)];
      y_[static_cast<std::size_t>(i)] = 0.0;
      const int p2 = lp_[static_cast<std::size_t>(i)] + lnz_[static_cast<std::size_t>(i)];
      for (int p = lp_[static_cast<std::size_t>(i)]; p < p2; ++p) {
        y_[static_cast<std::size_t>(li_[static_cast<std::size_t>(p)])] -= lx_[static_cast<std::size_t>(p)] * yi;
      }
      const double l_ki = yi / d_[static_cast<std::size_t>(i)];
      d_[static_cast<std::size_t>(k)] -= l_ki * yi;
      li_[static_cast<std::size_t>(p2)] = k;
      lx_[static_cast<std::size_t>(p2)] = l_ki;
      ++lnz_[static_cast<std::size_t>(i)];
    }
    if (d_[static_cast<std::size_t>(k)] == 0.0) {
      throw std::runtime_error("SparseLdlt: zero pivot at column " + std::to_string(k));
    }
  }
}

void SparseLdlt::solve_in_place(Eigen::VectorXd& x) const {
  if (x.size() != n_) {
    throw std::invalid_argument("SparseLdlt: rhs dimension mismatch");
  }
  for (int i = 0; i < n_; ++i) work_[i] = x[old_of_new_[static_cast<std::size_t>(i)]];
  for (int j = 0; j < n_; ++j) {
    const double wj = work_[j];
    const int p2 = lp_[static_cast<std::size_t>(j) + 1];
    for (int p = lp_[static_cast<std::size_t>(j)]; p < p2; ++p) {
      work_[li_[static_cast<std::size_t>(p)]] -= lx_[static_cast<std::size_t>(p)] * wj;
    }
  }
  for (int j = 0; j < n_; ++j) work_[j] /= d_[static_cast<std::size_t>(j)];
  for (int j = n_ - 1; j >= 0; --j) {
    double wj = work_[j];
    const int p2 = lp_[static_cast<std::size_t>(j) + 1];
    for (int p = lp_[static_cast<std::size_t>(j)]; p < p2; ++p) {
      wj -= lx_[static_cast<std::size_t>(p)] * work_[li_[static_cast<std::size_t>(p)]];
    }
    work_[j] = wj;
  }
  for (int i = 0; i < n_; ++i) x[old_of_new_[static_cast<std::size_t>(i)]] = work_[i];
}

std::size_t SparseLdlt::workspace_bytes() const {
  auto vec_bytes = [](const auto& v) { return v.capacity() * sizeof(v[0]); };
  return vec_bytes(old_of_new_) + vec_bytes(new_of_old_) + vec_bytes(cp_) + vec_bytes(ci_) +
         vec_bytes(cx_) + vec_bytes(value_map_) + vec_bytes(lp_) + vec_bytes(li_) +
         vec_bytes(lnz_) + vec_bytes(lx_) + vec_bytes(d_) + vec_bytes(parent_) +
         vec_bytes(flag_) + vec_bytes(pattern_) + vec_bytes(y_) +
         static_cast<std::size_t>(work_.size()) * sizeof(double);
}

}  // namespace attmpc
