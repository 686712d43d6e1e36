#pragma once

#include "attmpc/qp_problem.hpp"
#include "attmpc/solver_types.hpp"
#include "attmpc/sparse_ldlt.hpp"

namespace attmpc {

/// Operator-splitting (ADMM) solver for box/two-sided-row QPs, suited to the
/// sparse and partially condensed MPC formulations. The regularized KKT
/// system is factorized once at setup; solve() performs no heap allocation
/// (penalty adaptations refactorize in place).
///
/// Not thread-safe; one instance per thread.
class AdmmSolver {
 public:
  AdmmSolver(const QpProblem& qp, SolverSettings settings);

  /// Refreshes matrix/vector values of a structurally identical problem
  /// (same dimensions and sparsity patterns) without reallocating.
  void update(const QpProblem& qp);

  QpSolution solve();
  QpSolution solve(const Eigen::VectorXd& warm_x, const Eigen::VectorXd& warm_y);

  /// Allocation-free variant: out.x / out.duals are resized only when needed.
  void solve_into(const Eigen::VectorXd* warm_x, const Eigen::VectorXd* warm_y,
                  QpSolution& out);

  std::size_t workspace_bytes() const;
  std::size_t kkt_factor_nonzeros() const { return ldlt_.factor_nonzeros(); }

 private:
  void build_kkt_values();
  void residuals(double& r_prim, double& eps_prim, double& r_dual, double& eps_dual);
  bool primal_infeasible() const;
  bool dual_infeasible() const;

  // problem data (copies; the instance owns its lifetime)
  QpProblem qp_;
  SolverSettings settings_;
  int n_ = 0, m_ = 0;

  static constexpr double kSigma = 1e-6;
  static constexpr double kAlpha = 1.6;          // over-relaxation
  static constexpr int kCheckInterval = 25;
  static constexpr int kMaxRhoAdaptations = 10;

  double rho_ = 0.1;
  Eigen::VectorXd rho_vec_, rho_inv_;  // per-row (equality rows get 1e3 rho)

  Eigen::SparseMatrix<double> kkt_;  // upper triangle
  std::vector<int> rho_diag_pos_;    // value positions of the -1/rho diagonal
  SparseLdlt ldlt_;

  // iterates and scratch (fixed size after setup)
  Eigen::VectorXd x_, z_, y_, rhs_, ztilde_, zcand_, ax_, px_, aty_;
  Eigen::VectorXd x_chk_, y_chk_, dx_, dy_, adx_, atdy_, pdx_;
};

/// One-shot convenience wrapper.
QpSolution admm_solve(const QpProblem& qp, const SolverSettings& settings,
                      const Eigen::VectorXd* warm_x = nullptr,
                      const Eigen::VectorXd* warm_y = nullptr);

}  // namespace attmpc
