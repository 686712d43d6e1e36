#pragma once

#include "attmpc/qp_problem.hpp"
#include "attmpc/solver_types.hpp"

namespace attmpc {

/// Dense primal active-set solver for condensed QPs. Feasibility is
/// established by a phase-1 pass (minimizing a single violation slack with the
/// same iteration core); the working-set Schur complement A_W H^-1 A_W^T is
/// maintained by Cholesky grow/downdate.
///
/// The Hessian is regularized by +1e-10 on the diagonal, which also makes
/// linear programs (zero Hessian) solvable; blocking-constraint ties are
/// broken toward the lowest row index, and a Bland-style lowest-index rule
/// takes over after 3n iterations to prevent cycling.
///
/// All workspace is allocated at construction; solve_into() does not allocate
/// when the output buffers are already sized.
class ActiveSetSolver {
 public:
  ActiveSetSolver(const QpProblem& qp, SolverSettings settings);

  QpSolution solve();
  QpSolution solve(const Eigen::VectorXd& warm_x);

  /// Allocation-free variant: out.x / out.duals are resized only when needed.
  void solve_into(const Eigen::VectorXd* warm_x, QpSolution& out);

  std::size_t workspace_bytes() const;

 private:
  enum class CoreStatus { kOptimal, kMaxIter, kNumericalFailure };

  CoreStatus run_core(const Eigen::MatrixXd& h, const Eigen::LLT<Eigen::MatrixXd>& hchol,
                      const Eigen::VectorXd& g, const Eigen::MatrixXd& a,
                      const Eigen::VectorXd& lo, const Eigen::VectorXd& up, int n, int m,
                      Eigen::VectorXd& x, int max_iter, int& iters);

  bool grow_working_set(const Eigen::LLT<Eigen::MatrixXd>& hchol, const Eigen::MatrixXd& a,
                        int n, int row, int side);
  void drop_working_set(int pos);
  void solve_schur(Eigen::VectorXd& rhs_and_sol, int q) const;

  SolverSettings settings_;
  int n_ = 0, m_ = 0;
  double reg_total_ = 0.0;

  // phase-2 data
  Eigen::MatrixXd h_;
  Eigen::VectorXd g_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd lo_, up_;
  Eigen::LLT<Eigen::MatrixXd> hchol_;

  // phase-1 data ((x, t) variables; one-sided rows with a slack column)
  int n1_ = 0, m1_ = 0;
  Eigen::MatrixXd h1_;
  Eigen::VectorXd g1_;
  Eigen::MatrixXd a1_;
  Eigen::VectorXd lo1_, up1_;
  Eigen::LLT<Eigen::MatrixXd> h1chol_;

  // working set state (capacity n_+2)
  int q_ = 0;
  std::vector<int> w_rows_;
  std::vector<int> w_sides_;  // -1 lower, +1 upper, 0 equality
  std::vector<signed char> in_w_;
  Eigen::MatrixXd aw_;       // q x n rows
  Eigen::MatrixXd hinv_aw_;  // n x q columns H^-1 a_i
  Eigen::MatrixXd ls_;       // lower Cholesky of A_W H^-1 A_W^T

  // scratch
  Eigen::VectorXd grad_, v_, p_, svec_, hinv_anew_, scol_, lambda_, rhsw_, qw_, cdep_, x1_, xw_;
  Eigen::VectorXd upd_;

  double feas_tol_ = 1e-9;
};

/// One-shot convenience wrapper.
QpSolution active_set_solve(const QpProblem& qp, const SolverSettings& settings,
                            const Eigen::VectorXd* warm_x = nullptr);

}  // namespace attmpc
