#pragma once

#include "attmpc/qp_problem.hpp"

namespace attmpc {

struct KktReport {
  double stationarity = 0.0;    // ||H x + g + A^T y||_inf
  double primal_violation = 0.0;  // max bound violation
  double complementarity = 0.0;   // max |y_i| * distance-to-pushed-bound
  bool ok = false;
};

/// Independent first-order optimality check; deliberately shares no code with
/// the solvers. Thresholds: stationarity <= 1e-5 (1 + ||g||_inf), primal
/// violation <= 1e-6 scale, complementarity <= 1e-6 scale, where
/// scale = (1 + ||A x||_inf + ||y||_inf).
KktReport check_kkt(const QpProblem& qp, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace attmpc
