#include "attmpc/admm_solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace attmpc {

const char* to_string(QpStatus s) {
  switch (s) {
    case QpStatus::kSolved: return "solved";
    case QpStatus::kMaxIter: return "max_iter";
    case QpStatus::kInfeasible: return "infeasible";
    case QpStatus::kError: return "error";
  }
  return "unknown";
}

void SolverSettings::validate() const {
  if (!(eps_abs > 0.0) || !(eps_rel >= 0.0) || !(rho > 0.0)) {
    throw std::invalid_argument("SolverSettings: tolerances and rho must be positive");
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(const Clock::time_point& t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// y = S x for CSC S, into a preallocated vector (no temporaries).
void sparse_mul(const Eigen::SparseMatrix<double>& s, const Eigen::VectorXd& x,
                Eigen::VectorXd& y) {
  y.setZero();
  for (int k = 0; k < s.outerSize(); ++k) {
    const double xk = x[k];
    if (xk == 0.0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(s, k); it; ++it) {
      y[it.row()] += it.value() * xk;
    }
  }
}

// y = S^T x.
void sparse_tmul(const Eigen::SparseMatrix<double>& s, const Eigen::VectorXd& x,
                 Eigen::VectorXd& y) {
  for (int k = 0; k < s.outerSize(); ++k) {
    double acc = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(s, k); it; ++it) {
      acc += it.value() * x[it.row()];
    }
    y[k] = acc;
  }
}

bool is_equality_row(double lo, double up) { return up - lo <= 1e-12; }

}  // namespace

AdmmSolver::AdmmSolver(const QpProblem& qp, SolverSettings settings)
    : qp_(qp), settings_(settings) {
  settings_.validate();
  qp_.validate();
  if (!qp_.hessian.isCompressed()) qp_.hessian.makeCompressed();
  if (!qp_.a_ineq.isCompressed()) qp_.a_ineq.makeCompressed();
  n_ = qp_.num_vars();
  m_ = qp_.num_rows();
  rho_ = settings_.rho;

  rho_vec_.resize(m_);
  rho_inv_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    rho_vec_[i] = is_equality_row(qp_.lower[i], qp_.upper[i]) ? 1e3 * rho_ : rho_;
    rho_inv_[i] = 1.0 / rho_vec_[i];
  }

  // Upper triangle of [[H + sigma I, A^T], [A, -diag(1/rho)]].
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(qp_.hessian.nonZeros() + qp_.a_ineq.nonZeros() + n_ + m_));
  for (int k = 0; k < qp_.hessian.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp_.hessian, k); it; ++it) {
      if (it.row() < it.col()) trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  for (int i = 0; i < n_; ++i) trips.emplace_back(i, i, qp_.hessian.coeff(i, i) + kSigma);
  for (int k = 0; k < qp_.a_ineq.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp_.a_ineq, k); it; ++it) {
      // A(row, col) -> KKT(col, n + row), always upper triangle
      trips.emplace_back(static_cast<int>(it.col()), n_ + static_cast<int>(it.row()), it.value());
    }
  }
  for (int i = 0; i < m_; ++i) trips.emplace_back(n_ + i, n_ + i, -rho_inv_[i]);
  kkt_.resize(n_ + m_, n_ + m_);
  kkt_.setFromTriplets(trips.begin(), trips.end());
  kkt_.makeCompressed();

  rho_diag_pos_.resize(static_cast<std::size_t>(m_));
  for (int i = 0; i < m_; ++i) {
    const int col = n_ + i;
    int pos = -1;
    for (int p = kkt_.outerIndexPtr()[col]; p < kkt_.outerIndexPtr()[col + 1]; ++p) {
      if (kkt_.innerIndexPtr()[p] == col) pos = p;
    }
    rho_diag_pos_[static_cast<std::size_t>(i)] = pos;
  }

  ldlt_.analyze(kkt_);

  x_.setZero(n_);
  z_.setZero(m_);
  y_.setZero(m_);
  rhs_.setZero(n_ + m_);
  ztilde_.setZero(m_);
  zcand_.setZero(m_);
  ax_.setZero(m_);
  px_.setZero(n_);
  aty_.setZero(n_);
  x_chk_.setZero(n_);
  y_chk_.setZero(m_);
  dx_.setZero(n_);
  dy_.setZero(m_);
  adx_.setZero(m_);
  atdy_.setZero(n_);
  pdx_.setZero(n_);
}

void AdmmSolver::update(const QpProblem& qp) {
  if (qp.num_vars() != n_ || qp.num_rows() != m_ ||
      qp.hessian.nonZeros() != qp_.hessian.nonZeros() ||
      qp.a_ineq.nonZeros() != qp_.a_ineq.nonZeros()) {
    throw std::invalid_argument("AdmmSolver::update: structure mismatch");
  }
  std::copy(qp.hessian.valuePtr(), qp.hessian.valuePtr() + qp.hessian.nonZeros(),
            qp_.hessian.valuePtr());
  std::copy(qp.a_ineq.valuePtr(), qp.a_ineq.valuePtr() + qp.a_ineq.nonZeros(),
            qp_.a_ineq.valuePtr());
  qp_.grad = qp.grad;
  qp_.lower = qp.lower;
  qp_.upper = qp.upper;
  rho_ = settings_.rho;
  for (int i = 0; i < m_; ++i) {
    rho_vec_[i] = is_equality_row(qp_.lower[i], qp_.upper[i]) ? 1e3 * rho_ : rho_;
    rho_inv_[i] = 1.0 / rho_vec_[i];
  }
  build_kkt_values();
  ldlt_.factorize(kkt_);
}

void AdmmSolver::build_kkt_values() {
  // Rewrite all KKT values from current problem data; pattern is unchanged.
  double* v = kkt_.valuePtr();
  const int* outer = kkt_.outerIndexPtr();
  const int* inner = kkt_.innerIndexPtr();
  // zero, then scatter (cheap relative to factorization)
  std::fill(v, v + kkt_.nonZeros(), 0.0);
  for (int k = 0; k < qp_.hessian.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp_.hessian, k); it; ++it) {
      if (it.row() > it.col()) continue;
      for (int p = outer[it.col()]; p < outer[it.col() + 1]; ++p) {
        if (inner[p] == it.row()) { v[p] += it.value(); break; }
      }
    }
  }
  for (int i = 0; i < n_; ++i) {
    for (int p = outer[i]; p < outer[i + 1]; ++p) {
      if (inner[p] == i) { v[p] += kSigma; break; }
    }
  }
  for (int k = 0; k < qp_.a_ineq.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp_.a_ineq, k); it; ++it) {
      const int col = n_ + static_cast<int>(it.row());
      const int row = static_cast<int>(it.col());
      for (int p = outer[col]; p < outer[col + 1]; ++p) {
        if (inner[p] == row) { v[p] += it.value(); break; }
      }
    }
  }
  for (int i = 0; i < m_; ++i) v[rho_diag_pos_[static_cast<std::size_t>(i)]] = -rho_inv_[i];
}

QpSolution AdmmSolver::solve() {
  QpSolution sol;
  solve_into(nullptr, nullptr, sol);
  return sol;
}

QpSolution AdmmSolver::solve(const Eigen::VectorXd& warm_x, const Eigen::VectorXd& warm_y) {
  QpSolution sol;
  solve_into(&warm_x, &warm_y, sol);
  return sol;
}

void AdmmSolver::residuals(double& r_prim, double& eps_prim, double& r_dual, double& eps_dual) {
  sparse_mul(qp_.a_ineq, x_, ax_);
  sparse_mul(qp_.hessian, x_, px_);
  sparse_tmul(qp_.a_ineq, y_, aty_);
  r_prim = m_ > 0 ? (ax_ - z_).cwiseAbs().maxCoeff() : 0.0;
  double scale_p = 1e-30;
  if (m_ > 0) scale_p = std::max(ax_.cwiseAbs().maxCoeff(), z_.cwiseAbs().maxCoeff());
  eps_prim = settings_.eps_abs + settings_.eps_rel * scale_p;
  r_dual = (px_ + qp_.grad + aty_).cwiseAbs().maxCoeff();
  const double scale_d = std::max({px_.cwiseAbs().maxCoeff(), aty_.cwiseAbs().maxCoeff(),
                                   qp_.grad.size() > 0 ? qp_.grad.cwiseAbs().maxCoeff() : 0.0});
  eps_dual = settings_.eps_abs + settings_.eps_rel * scale_d;
}

bool AdmmSolver::primal_infeasible() const {
  if (m_ == 0) return false;
  const double norm_dy = dy_.cwiseAbs().maxCoeff();
  if (norm_dy <= 1e-12) return false;
  const double eps = 1e-8 * norm_dy;
  if (atdy_.cwiseAbs().maxCoeff() > eps) return false;
  double support = 0.0;
  for (int i = 0; i < m_; ++i) {
    if (dy_[i] > 0.0) {
      if (!is_finite_bound(qp_.upper[i])) return false;
      support += qp_.upper[i] * dy_[i];
    } else if (dy_[i] < 0.0) {
      if (!is_finite_bound(qp_.lower[i])) return false;
      support += qp_.lower[i] * dy_[i];
    }
  }
  return support < -eps;
}

bool AdmmSolver::dual_infeasible() const {
  if (n_ == 0) return false;
  const double norm_dx = dx_.cwiseAbs().maxCoeff();
  if (norm_dx <= 1e-12) return false;
  const double eps = 1e-8 * norm_dx;
  if (pdx_.cwiseAbs().maxCoeff() > eps) return false;
  if (qp_.grad.dot(dx_) >= -eps) return false;
  for (int i = 0; i < m_; ++i) {
    const double v = adx_[i];
    if (is_finite_bound(qp_.upper[i]) && v > eps) return false;
    if (is_finite_bound(qp_.lower[i]) && v < -eps) return false;
  }
  return true;
}

void AdmmSolver::solve_into(const Eigen::VectorXd* warm_x, const Eigen::VectorXd* warm_y,
                            QpSolution& sol) {
  const auto t0 = Clock::now();
  if (sol.x.size() != n_) sol.x.resize(n_);
  if (sol.duals.size() != m_) sol.duals.resize(m_);
  sol.setup_seconds = 0.0;

  if (warm_x && warm_y) {
    if (warm_x->size() != n_ || warm_y->size() != m_) {
      throw std::invalid_argument("AdmmSolver: warm start dimension mismatch");
    }
    x_ = *warm_x;
    y_ = *warm_y;
  } else {
    x_.setZero();
    y_.setZero();
  }
  sparse_mul(qp_.a_ineq, x_, ax_);
  z_ = ax_.cwiseMax(qp_.lower).cwiseMin(qp_.upper);
  x_chk_ = x_;
  y_chk_ = y_;

  sol.status = QpStatus::kMaxIter;
  int rho_adaptations = 0;
  int iter = 0;
  for (iter = 1; iter <= settings_.max_iter; ++iter) {
    rhs_.head(n_) = kSigma * x_ - qp_.grad;
    rhs_.tail(m_) = z_ - rho_inv_.cwiseProduct(y_);
    ldlt_.solve_in_place(rhs_);
    // rhs_ now holds (x_tilde, nu)
    ztilde_ = z_ + rho_inv_.cwiseProduct(rhs_.tail(m_) - y_);

    x_ = kAlpha * rhs_.head(n_) + (1.0 - kAlpha) * x_;
    zcand_ = kAlpha * ztilde_ + (1.0 - kAlpha) * z_;  // pre-projection z
    z_ = (zcand_ + rho_inv_.cwiseProduct(y_)).cwiseMax(qp_.lower).cwiseMin(qp_.upper);
    y_ += rho_vec_.cwiseProduct(zcand_ - z_);

    if (iter % kCheckInterval != 0) continue;

    double r_prim, eps_prim, r_dual, eps_dual;
    residuals(r_prim, eps_prim, r_dual, eps_dual);
    if (r_prim <= eps_prim && r_dual <= eps_dual) {
      sol.status = QpStatus::kSolved;
      break;
    }

    dx_ = x_ - x_chk_;
    dy_ = y_ - y_chk_;
    sparse_mul(qp_.a_ineq, dx_, adx_);
    sparse_tmul(qp_.a_ineq, dy_, atdy_);
    sparse_mul(qp_.hessian, dx_, pdx_);
    if (primal_infeasible() || dual_infeasible()) {
      sol.status = QpStatus::kInfeasible;
      break;
    }
    x_chk_ = x_;
    y_chk_ = y_;

    if (settings_.adaptive_rho && rho_adaptations < kMaxRhoAdaptations) {
      const double np = r_prim / std::max(eps_prim, 1e-30);
      const double nd = r_dual / std::max(eps_dual, 1e-30);
      const double ratio = np / std::max(nd, 1e-30);
      double factor = 0.0;
      if (ratio > 10.0) factor = 5.0;
      else if (ratio < 0.1) factor = 0.2;
      if (factor != 0.0) {
        rho_ *= factor;
        for (int i = 0; i < m_; ++i) {
          rho_vec_[i] = is_equality_row(qp_.lower[i], qp_.upper[i]) ? 1e3 * rho_ : rho_;
          rho_inv_[i] = 1.0 / rho_vec_[i];
        }
        double* v = kkt_.valuePtr();
        for (int i = 0; i < m_; ++i) v[rho_diag_pos_[static_cast<std::size_t>(i)]] = -rho_inv_[i];
        ldlt_.factorize(kkt_);
        ++rho_adaptations;
      }
    }

    if (settings_.time_limit_seconds > 0.0 && seconds_since(t0) > settings_.time_limit_seconds) {
      break;
    }
  }

  sol.iterations = std::min(iter, settings_.max_iter);
  sol.x = x_;
  sol.duals = y_;
  sparse_mul(qp_.hessian, x_, px_);
  sol.objective = 0.5 * x_.dot(px_) + qp_.grad.dot(x_);
  sol.solve_seconds = seconds_since(t0);
}

std::size_t AdmmSolver::workspace_bytes() const {
  const std::size_t vecs = static_cast<std::size_t>(
      x_.size() + z_.size() + y_.size() + rhs_.size() + ztilde_.size() + zcand_.size() +
      ax_.size() + px_.size() + aty_.size() + x_chk_.size() + y_chk_.size() + dx_.size() +
      dy_.size() + adx_.size() + atdy_.size() + pdx_.size() + rho_vec_.size() + rho_inv_.size());
  return vecs * sizeof(double) + static_cast<std::size_t>(kkt_.nonZeros()) * (sizeof(double) + sizeof(int)) +
         ldlt_.workspace_bytes();
}

QpSolution admm_solve(const QpProblem& qp, const SolverSettings& settings,
                      const Eigen::VectorXd* warm_x, const Eigen::VectorXd* warm_y) {
  const auto t0 = std::chrono::steady_clock::now();
  AdmmSolver solver(qp, settings);
  const double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  QpSolution sol;
  solver.solve_into(warm_x, warm_y, sol);
  sol.setup_seconds = setup;
  return sol;
}

}  // namespace attmpc
