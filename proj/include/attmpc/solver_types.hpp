#pragma once

#include <Eigen/Dense>

namespace attmpc {

enum class QpStatus { kSolved, kMaxIter, kInfeasible, kError };

const char* to_string(QpStatus s);

struct SolverSettings {
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  /// ADMM iteration cap. The active-set solver uses max(200, 10 n) when this
  /// is left at 0 for it.
  int max_iter = 20000;
  double rho = 0.1;          // ADMM penalty (adapted unless disabled)
  bool adaptive_rho = true;
  double time_limit_seconds = 0.0;  // 0 = no limit

  void validate() const;
};

struct QpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd duals;  // one per row; >= 0 pushing on upper, <= 0 on lower
  QpStatus status = QpStatus::kError;
  int iterations = 0;
  double objective = 0.0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
};

}  // namespace attmpc
