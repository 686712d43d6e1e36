#include "attmpc/active_set_solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace attmpc {

namespace {

constexpr double kReg = 1e-10;
constexpr double kTolStat = 1e-11;
constexpr double kTolDir = 1e-11;
constexpr double kTolDep = 1e-12;

using Clock = std::chrono::steady_clock;

}  // namespace

ActiveSetSolver::ActiveSetSolver(const QpProblem& qp, SolverSettings settings)
    : settings_(settings) {
  settings_.validate();
  qp.validate();
  n_ = qp.num_vars();
  m_ = qp.num_rows();

  h_ = Eigen::MatrixXd(qp.hessian);
  h_.diagonal().array() += kReg;
  reg_total_ = kReg;
  g_ = qp.grad;
  a_ = Eigen::MatrixXd(qp.a_ineq);
  lo_ = qp.lower;
  up_ = qp.upper;

  double bump = kReg;
  hchol_.compute(h_);
  while (hchol_.info() != Eigen::Success && bump < 1e-4) {
    bump *= 100.0;
    h_.diagonal().array() += bump;
    reg_total_ += bump;
    hchol_.compute(h_);
  }
  if (hchol_.info() != Eigen::Success) {
    throw std::invalid_argument("ActiveSetSolver: hessian not positive definite after regularization");
  }

  double bound_scale = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (is_finite_bound(lo_[i])) bound_scale = std::max(bound_scale, std::abs(lo_[i]));
    if (is_finite_bound(up_[i])) bound_scale = std::max(bound_scale, std::abs(up_[i]));
  }
  feas_tol_ = 1e-9 * bound_scale;

  // Phase-1 problem over (x, t): minimize t subject to
  //   a_i x - t <= u_i,  a_i x + t >= l_i,  t >= 0.
  n1_ = n_ + 1;
  m1_ = 0;
  for (int i = 0; i < m_; ++i) {
    if (is_finite_bound(up_[i])) ++m1_;
    if (is_finite_bound(lo_[i])) ++m1_;
  }
  ++m1_;  // t >= 0
  h1_ = kReg * Eigen::MatrixXd::Identity(n1_, n1_);
  h1chol_.compute(h1_);
  g1_ = Eigen::VectorXd::Zero(n1_);
  g1_[n_] = 1.0;
  a1_.setZero(m1_, n1_);
  lo1_.setConstant(m1_, -kInfBound);
  up1_.setConstant(m1_, kInfBound);
  {
    int r = 0;
    for (int i = 0; i < m_; ++i) {
      if (is_finite_bound(up_[i])) {
        a1_.row(r).head(n_) = a_.row(i);
        a1_(r, n_) = -1.0;
        up1_[r] = up_[i];
        ++r;
      }
      if (is_finite_bound(lo_[i])) {
        a1_.row(r).head(n_) = a_.row(i);
        a1_(r, n_) = 1.0;
        lo1_[r] = lo_[i];
        ++r;
      }
    }
    a1_(r, n_) = 1.0;
    lo1_[r] = 0.0;
  }

  const int cap = n1_ + 1;
  w_rows_.assign(static_cast<std::size_t>(cap), -1);
  w_sides_.assign(static_cast<std::size_t>(cap), 0);
  in_w_.assign(static_cast<std::size_t>(std::max(m_, m1_)) + 1, 0);
  aw_.setZero(cap, n1_);
  hinv_aw_.setZero(n1_, cap);
  ls_.setZero(cap, cap);

  grad_.setZero(n1_);
  v_.setZero(n1_);
  p_.setZero(n1_);
  svec_.setZero(n1_);
  hinv_anew_.setZero(n1_);
  scol_.setZero(cap);
  lambda_.setZero(cap);
  rhsw_.setZero(cap);
  qw_.setZero(cap);
  cdep_.setZero(cap);
  x1_.setZero(n1_);
  xw_.setZero(n1_);
  upd_.setZero(cap);
}

void ActiveSetSolver::solve_schur(Eigen::VectorXd& b, int q) const {
  // forward then backward substitution with the q x q leading block of ls_
  for (int i = 0; i < q; ++i) {
    double s = b[i];
    for (int j = 0; j < i; ++j) s -= ls_(i, j) * b[j];
    b[i] = s / ls_(i, i);
  }
  for (int i = q - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < q; ++j) s -= ls_(j, i) * b[j];
    b[i] = s / ls_(i, i);
  }
}

bool ActiveSetSolver::grow_working_set(const Eigen::LLT<Eigen::MatrixXd>& hchol,
                                       const Eigen::MatrixXd& a, int n, int row, int side) {
  hinv_anew_.head(n) = a.row(row).transpose();
  hchol.matrixL().solveInPlace(hinv_anew_.head(n));
  hchol.matrixU().solveInPlace(hinv_anew_.head(n));
  const double diag = a.row(row).dot(hinv_anew_.head(n));
  scol_.head(q_).noalias() = aw_.topRows(q_).leftCols(n) * hinv_anew_.head(n);

  // w = L^-1 scol, delta^2 = diag - ||w||^2
  for (int i = 0; i < q_; ++i) {
    double s = scol_[i];
    for (int j = 0; j < i; ++j) s -= ls_(i, j) * scol_[j];
    scol_[i] = s / ls_(i, i);
  }
  const double delta_sq = diag - scol_.head(q_).squaredNorm();
  if (delta_sq <= kTolDep * std::max(1.0, diag)) {
    return false;  // dependent on the current working set
  }
  ls_.row(q_).head(q_) = scol_.head(q_).transpose();
  ls_(q_, q_) = std::sqrt(delta_sq);
  aw_.row(q_).head(n) = a.row(row);
  hinv_aw_.col(q_).head(n) = hinv_anew_.head(n);
  w_rows_[static_cast<std::size_t>(q_)] = row;
  w_sides_[static_cast<std::size_t>(q_)] = side;
  in_w_[static_cast<std::size_t>(row)] = 1;
  ++q_;
  return true;
}

void ActiveSetSolver::drop_working_set(int pos) {
  in_w_[static_cast<std::size_t>(w_rows_[static_cast<std::size_t>(pos)])] = 0;
  const int tail = q_ - pos - 1;
  // Rank-1 update of the trailing factor block: after deleting row/col `pos`,
  // L22' L22'^T = L22 L22^T + l21 l21^T.
  upd_.head(tail) = ls_.col(pos).segment(pos + 1, tail);
  for (int i = 0; i < tail; ++i) {
    ls_.row(pos + i).head(pos) = ls_.row(pos + 1 + i).head(pos);
    ls_.row(pos + i).segment(pos, i + 1) = ls_.row(pos + 1 + i).segment(pos + 1, i + 1);
  }
  for (int k = 0; k < tail; ++k) {
    const double lkk = ls_(pos + k, pos + k);
    const double vk = upd_[k];
    const double r = std::hypot(lkk, vk);
    const double c = r / lkk;
    const double s = vk / lkk;
    ls_(pos + k, pos + k) = r;
    for (int i = k + 1; i < tail; ++i) {
      const double lik = ls_(pos + i, pos + k);
      ls_(pos + i, pos + k) = (lik + s * upd_[i]) / c;
      upd_[i] = c * upd_[i] - s * ls_(pos + i, pos + k);
    }
  }
  for (int i = pos; i < q_ - 1; ++i) {
    aw_.row(i) = aw_.row(i + 1);
    hinv_aw_.col(i) = hinv_aw_.col(i + 1);
    w_rows_[static_cast<std::size_t>(i)] = w_rows_[static_cast<std::size_t>(i + 1)];
    w_sides_[static_cast<std::size_t>(i)] = w_sides_[static_cast<std::size_t>(i + 1)];
  }
  --q_;
}

ActiveSetSolver::CoreStatus ActiveSetSolver::run_core(
    const Eigen::MatrixXd& h, const Eigen::LLT<Eigen::MatrixXd>& hchol,
    const Eigen::VectorXd& g, const Eigen::MatrixXd& a, const Eigen::VectorXd& lo,
    const Eigen::VectorXd& up, int n, int m, Eigen::VectorXd& x, int max_iter, int& iters) {
  const int bland_after = 3 * n;
  int moves = 0;
  for (int pass = 0; pass < 3 * max_iter; ++pass) {
    if (moves >= max_iter) break;
    const bool bland = moves > bland_after;
    grad_.head(n).noalias() = h.selfadjointView<Eigen::Lower>() * x.head(n);
    grad_.head(n) += g.head(n);

    for (int i = 0; i < q_; ++i) {
      const int r = w_rows_[static_cast<std::size_t>(i)];
      const double bound = w_sides_[static_cast<std::size_t>(i)] > 0 ? up[r] : lo[r];
      rhsw_[i] = bound - a.row(r).dot(x.head(n));
    }

    v_.head(n) = grad_.head(n);
    hchol.matrixL().solveInPlace(v_.head(n));
    hchol.matrixU().solveInPlace(v_.head(n));
    qw_.head(q_).noalias() = aw_.topRows(q_).leftCols(n) * v_.head(n);
    qw_.head(q_) += rhsw_.head(q_);
    lambda_.head(q_) = qw_.head(q_);
    solve_schur(lambda_, q_);

    svec_.head(n) = -grad_.head(n);
    svec_.head(n).noalias() += aw_.topRows(q_).leftCols(n).transpose() * lambda_.head(q_);

    const double grad_scale = 1.0 + grad_.head(n).cwiseAbs().maxCoeff();
    const bool stationary = svec_.head(n).cwiseAbs().maxCoeff() <= kTolStat * grad_scale &&
                            (q_ == 0 || rhsw_.head(q_).cwiseAbs().maxCoeff() <= 10.0 * feas_tol_);
    if (stationary) {
      // wrong-signed multiplier: at upper lambda must be <= 0, at lower >= 0
      double lam_scale = 1.0;
      for (int i = 0; i < q_; ++i) lam_scale = std::max(lam_scale, std::abs(lambda_[i]));
      const double tol_mult = 1e-9 * lam_scale;
      int drop = -1;
      double worst = tol_mult;
      for (int i = 0; i < q_; ++i) {
        const int side = w_sides_[static_cast<std::size_t>(i)];
        if (side == 0) continue;
        const double viol = side > 0 ? lambda_[i] : -lambda_[i];
        if (bland) {
          if (viol > tol_mult) { drop = i; break; }
        } else if (viol > worst) {
          worst = viol;
          drop = i;
        }
      }
      if (drop < 0) {
        iters = moves;
        return CoreStatus::kOptimal;
      }
      drop_working_set(drop);
      ++moves;
      continue;
    }

    p_.head(n) = svec_.head(n);
    hchol.matrixL().solveInPlace(p_.head(n));
    hchol.matrixU().solveInPlace(p_.head(n));

    // ratio test; lowest row index wins ties
    double alpha = 1.0;
    int blocker = -1;
    int bside = 0;
    for (int r = 0; r < m; ++r) {
      if (in_w_[static_cast<std::size_t>(r)]) continue;
      const double ap = a.row(r).dot(p_.head(n));
      double cand;
      int side;
      if (ap > kTolDir && is_finite_bound(up[r])) {
        cand = (up[r] - a.row(r).dot(x.head(n))) / ap;
        side = 1;
      } else if (ap < -kTolDir && is_finite_bound(lo[r])) {
        cand = (lo[r] - a.row(r).dot(x.head(n))) / ap;
        side = -1;
      } else {
        continue;
      }
      cand = std::max(cand, 0.0);
      if (cand < alpha - 1e-15) {
        alpha = cand;
        blocker = r;
        bside = side;
      }
    }

    x.head(n) += alpha * p_.head(n);
    ++moves;
    if (blocker >= 0) {
      if (!grow_working_set(hchol, a, n, blocker, bside)) {
        // dependent blocking row: exchange against the strongest inequality
        // contributor, then retry once
        cdep_.head(q_) = scol_.head(q_);
        // scol_ currently holds L^-1 s; finish the solve to get S^-1 s
        for (int i = q_ - 1; i >= 0; --i) {
          double s = cdep_[i];
          for (int j = i + 1; j < q_; ++j) s -= ls_(j, i) * cdep_[j];
          cdep_[i] = s / ls_(i, i);
        }
        int out = -1;
        double best = 1e-9;
        for (int i = 0; i < q_; ++i) {
          if (w_sides_[static_cast<std::size_t>(i)] == 0) continue;
          if (std::abs(cdep_[i]) > best) {
            best = std::abs(cdep_[i]);
            out = i;
          }
        }
        if (out < 0) return CoreStatus::kNumericalFailure;
        drop_working_set(out);
        if (!grow_working_set(hchol, a, n, blocker, bside)) {
          return CoreStatus::kNumericalFailure;
        }
      }
    }
  }
  iters = moves;
  return CoreStatus::kMaxIter;
}

void ActiveSetSolver::solve_into(const Eigen::VectorXd* warm_x, QpSolution& out) {
  const auto t0 = Clock::now();
  if (warm_x && warm_x->size() != n_) {
    throw std::invalid_argument("ActiveSetSolver: warm start dimension mismatch");
  }
  if (out.x.size() != n_) out.x.resize(n_);
  if (out.duals.size() != m_) out.duals.resize(m_);
  out.duals.setZero();
  out.setup_seconds = 0.0;

  const int max_iter = std::max(200, 10 * n1_);

  q_ = 0;
  std::fill(in_w_.begin(), in_w_.end(), 0);
  if (warm_x) {
    xw_.head(n_) = *warm_x;
  } else {
    xw_.head(n_).setZero();
  }

  double violation = 0.0;
  for (int i = 0; i < m_; ++i) {
    const double ax = a_.row(i).dot(xw_.head(n_));
    if (is_finite_bound(up_[i])) violation = std::max(violation, ax - up_[i]);
    if (is_finite_bound(lo_[i])) violation = std::max(violation, lo_[i] - ax);
  }
  int iters1 = 0;
  if (violation > feas_tol_) {
    x1_.head(n_) = xw_.head(n_);
    x1_[n_] = violation + 1.0;
    const CoreStatus st1 = run_core(h1_, h1chol_, g1_, a1_, lo1_, up1_, n1_, m1_, x1_,
                                    max_iter, iters1);
    out.iterations = iters1;
    if (st1 == CoreStatus::kNumericalFailure) {
      out.status = QpStatus::kError;
      out.x = xw_.head(n_);
      out.solve_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      return;
    }
    if (st1 == CoreStatus::kMaxIter) {
      out.status = QpStatus::kMaxIter;
      out.x = x1_.head(n_);
      out.solve_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      return;
    }
    if (x1_[n_] > 100.0 * feas_tol_) {
      out.status = QpStatus::kInfeasible;
      out.x = x1_.head(n_);
      out.solve_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      return;
    }
    xw_.head(n_) = x1_.head(n_);
    q_ = 0;
    std::fill(in_w_.begin(), in_w_.end(), 0);
  }

  // phase 2: seed the working set with the equality rows
  for (int i = 0; i < m_; ++i) {
    if (up_[i] - lo_[i] <= 1e-12) {
      grow_working_set(hchol_, a_, n_, i, 0);  // dependent ones are skipped
    }
  }
  int iters2 = 0;
  const CoreStatus st = run_core(h_, hchol_, g_, a_, lo_, up_, n_, m_, xw_, max_iter, iters2);
  out.x = xw_.head(n_);
  out.iterations = iters1 + iters2;
  if (st == CoreStatus::kOptimal) {
    out.status = QpStatus::kSolved;
    for (int i = 0; i < q_; ++i) {
      out.duals[w_rows_[static_cast<std::size_t>(i)]] = -lambda_[i];
    }
  } else if (st == CoreStatus::kMaxIter) {
    out.status = QpStatus::kMaxIter;
  } else {
    out.status = QpStatus::kError;
  }
  grad_.head(n_).noalias() = h_.selfadjointView<Eigen::Lower>() * out.x;
  out.objective = 0.5 * out.x.dot(grad_.head(n_)) + g_.dot(out.x) -
                  0.5 * reg_total_ * out.x.squaredNorm();
  out.solve_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
}

QpSolution ActiveSetSolver::solve() {
  QpSolution sol;
  solve_into(nullptr, sol);
  return sol;
}

QpSolution ActiveSetSolver::solve(const Eigen::VectorXd& warm_x) {
  QpSolution sol;
  solve_into(&warm_x, sol);
  return sol;
}

std::size_t ActiveSetSolver::workspace_bytes() const {
  const auto mat = [](const Eigen::MatrixXd& m) { return static_cast<std::size_t>(m.size()) * sizeof(double); };
  const auto vec = [](const Eigen::VectorXd& v) { return static_cast<std::size_t>(v.size()) * sizeof(double); };
  return mat(h_) + mat(a_) + mat(h1_) + mat(a1_) + mat(aw_) + mat(hinv_aw_) + mat(ls_) +
         vec(g_) + vec(lo_) + vec(up_) + vec(g1_) + vec(lo1_) + vec(up1_) + vec(grad_) + vec(v_) +
         vec(p_) + vec(svec_) + vec(hinv_anew_) + vec(scol_) + vec(lambda_) + vec(rhsw_) +
         vec(qw_) + vec(cdep_) + vec(x1_) + vec(xw_) + vec(upd_) +
         w_rows_.size() * sizeof(int) + w_sides_.size() * sizeof(int) + in_w_.size();
}

QpSolution active_set_solve(const QpProblem& qp, const SolverSettings& settings,
                            const Eigen::VectorXd* warm_x) {
  const auto t0 = std::chrono::steady_clock::now();
  ActiveSetSolver solver(qp, settings);
  const double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  QpSolution sol;
  solver.solve_into(warm_x, sol);
  sol.setup_seconds = setup;
  return sol;
}

}  // namespace attmpc
