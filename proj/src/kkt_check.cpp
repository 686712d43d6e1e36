#include "attmpc/kkt_check.hpp"

#include <cmath>

namespace attmpc {

KktReport check_kkt(const QpProblem& qp, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  KktReport rep;
  const int m = qp.num_rows();

  Eigen::VectorXd stat = qp.grad;
  for (int k = 0; k < qp.hessian.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp.hessian, k); it; ++it) {
      stat[it.row()] += it.value() * x[k];
    }
  }
  Eigen::VectorXd ax = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < qp.a_ineq.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp.a_ineq, k); it; ++it) {
      ax[it.row()] += it.value() * x[k];
      stat[k] += it.value() * y[it.row()];
    }
  }
  rep.stationarity = stat.cwiseAbs().maxCoeff();

  double ax_scale = 0.0;
  double y_scale = 0.0;
  for (int i = 0; i < m; ++i) {
    ax_scale = std::max(ax_scale, std::abs(ax[i]));
    y_scale = std::max(y_scale, std::abs(y[i]));
    if (is_finite_bound(qp.upper[i])) {
      rep.primal_violation = std::max(rep.primal_violation, ax[i] - qp.upper[i]);
    }
    if (is_finite_bound(qp.lower[i])) {
      rep.primal_violation = std::max(rep.primal_violation, qp.lower[i] - ax[i]);
    }
    // skip complementarity on equality rows: any multiplier is valid there
    if (qp.upper[i] - qp.lower[i] <= 1e-12) continue;
    if (y[i] > 0.0 && is_finite_bound(qp.upper[i])) {
      rep.complementarity = std::max(rep.complementarity, y[i] * std::abs(qp.upper[i] - ax[i]));
    } else if (y[i] < 0.0 && is_finite_bound(qp.lower[i])) {
      rep.complementarity = std::max(rep.complementarity, -y[i] * std::abs(ax[i] - qp.lower[i]));
    } else if (y[i] > 0.0 || y[i] < 0.0) {
      // multiplier pushing on an infinite bound is always wrong
      rep.complementarity = std::max(rep.complementarity, std::abs(y[i]) * 1.0);
    }
  }

  const double g_scale = 1.0 + (qp.grad.size() > 0 ? qp.grad.cwiseAbs().maxCoeff() : 0.0);
  const double scale = 1.0 + ax_scale + y_scale;
  rep.ok = rep.stationarity <= 1e-5 * g_scale && rep.primal_violation <= 1e-6 * scale &&
           rep.complementarity <= 1e-6 * scale;
  return rep;
}

}  // namespace attmpc
