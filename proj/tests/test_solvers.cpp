#include <doctest.h>

#include "attmpc/active_set_solver.hpp"
#include "attmpc/admm_solver.hpp"
#include "attmpc/kkt_check.hpp"
#include "alloc_counter.hpp"
#include "qp_test_problems.hpp"

using namespace attmpc;
using attmpc::testing::random_feasible_qp;

namespace {

QpProblem tiny_box_qp() {
  // min 1/2 x^2 - x  s.t. 0 <= x <= 0.5  -> x = 0.5
  QpProblem qp;
  qp.hessian.resize(1, 1);
  qp.hessian.insert(0, 0) = 1.0;
  qp.hessian.makeCompressed();
  qp.grad.resize(1);
  qp.grad << -1.0;
  qp.a_ineq.resize(1, 1);
  qp.a_ineq.insert(0, 0) = 1.0;
  qp.a_ineq.makeCompressed();
  qp.lower.resize(1);
  qp.upper.resize(1);
  qp.lower << 0.0;
  qp.upper << 0.5;
  return qp;
}

QpProblem unconstrained_qp(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd gm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gm(i, j) = g(rng);
  Eigen::MatrixXd h = gm.transpose() * gm + Eigen::MatrixXd::Identity(n, n);
  QpProblem qp;
  qp.hessian = h.sparseView();
  qp.grad.resize(n);
  for (int i = 0; i < n; ++i) qp.grad[i] = g(rng);
  qp.a_ineq.resize(0, n);
  qp.a_ineq.makeCompressed();
  qp.lower.resize(0);
  qp.upper.resize(0);
  return qp;
}

}  // namespace

TEST_CASE("admm solves the clipped 1-d problem") {
  const QpProblem qp = tiny_box_qp();
  SolverSettings st;
  AdmmSolver solver(qp, st);
  const QpSolution sol = solver.solve();
  CHECK(sol.status == QpStatus::kSolved);
  CHECK(sol.x[0] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(check_kkt(qp, sol.x, sol.duals).ok);
}

TEST_CASE("active set solves the clipped 1-d problem") {
  const QpProblem qp = tiny_box_qp();
  SolverSettings st;
  const QpSolution sol = active_set_solve(qp, st);
  CHECK(sol.status == QpStatus::kSolved);
  CHECK(sol.x[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(check_kkt(qp, sol.x, sol.duals).ok);
}

TEST_CASE("unconstrained problems reduce to the normal equations") {
  std::mt19937_64 rng(101);
  const QpProblem qp = unconstrained_qp(8, rng);
  const Eigen::VectorXd expected =
      Eigen::MatrixXd(qp.hessian).ldlt().solve(-qp.grad);

  SolverSettings st;
  AdmmSolver admm(qp, st);
  const QpSolution a = admm.solve();
  CHECK(a.status == QpStatus::kSolved);
  CHECK((a.x - expected).cwiseAbs().maxCoeff() < 1e-6);

  const QpSolution b = active_set_solve(qp, st);
  CHECK(b.status == QpStatus::kSolved);
  CHECK((b.x - expected).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("active set: single active constraint") {
  // min 1/2 ||x||^2 s.t. x_1 >= 1
  QpProblem qp;
  const int n = 4;
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  qp.hessian = h.sparseView();
  qp.grad = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(1, n);
  a(0, 0) = 1.0;
  qp.a_ineq = a.sparseView();
  qp.lower.resize(1);
  qp.upper.resize(1);
  qp.lower << 1.0;
  qp.upper << kInfBound;
  const QpSolution sol = active_set_solve(qp, SolverSettings{});
  CHECK(sol.status == QpStatus::kSolved);
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.x.tail(n - 1).norm() < 1e-9);
  CHECK(sol.duals[0] == doctest::Approx(-1.0));  // pushing on the lower bound
}

TEST_CASE("cross-solver agreement on 500 random feasible QPs with KKT certification") {
  std::mt19937_64 rng(2024);
  SolverSettings st;
  int admm_solved = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const QpProblem qp = random_feasible_qp(rng);
    const QpSolution a = admm_solve(qp, st);
    const QpSolution b = active_set_solve(qp, st);
    REQUIRE(b.status == QpStatus::kSolved);
    REQUIRE(a.status == QpStatus::kSolved);
    ++admm_solved;

    const double scale = std::max(1.0, std::abs(b.objective));
    CHECK(std::abs(a.objective - b.objective) / scale < 1e-5);

    const KktReport ra = check_kkt(qp, a.x, a.duals);
    CHECK(ra.ok);
    const KktReport rb = check_kkt(qp, b.x, b.duals);
    CHECK(rb.ok);
  }
  CHECK(admm_solved == 500);
}

TEST_CASE("admm detects primal infeasibility") {
  // x <= -1 and x >= 1 simultaneously
  QpProblem qp;
  qp.hessian.resize(1, 1);
  qp.hessian.insert(0, 0) = 1.0;
  qp.grad.resize(1);
  qp.grad << 0.0;
  Eigen::MatrixXd a(2, 1);
  a << 1.0, 1.0;
  qp.a_ineq = a.sparseView();
  qp.lower.resize(2);
  qp.upper.resize(2);
  qp.lower << -kInfBound, 1.0;
  qp.upper << -1.0, kInfBound;
  const QpSolution sol = admm_solve(qp, SolverSettings{});
  CHECK(sol.status == QpStatus::kInfeasible);

  const QpSolution as = active_set_solve(qp, SolverSettings{});
  CHECK(as.status == QpStatus::kInfeasible);
}

TEST_CASE("warm start monotonicity under small gradient perturbations") {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> pert(-1e-3, 1e-3);
  SolverSettings st;
  int admm_ok = 0, as_ok = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    QpProblem qp = random_feasible_qp(rng, 20, 40);
    AdmmSolver admm(qp, st);
    const QpSolution cold = admm.solve();
    if (cold.status != QpStatus::kSolved) continue;

    QpProblem qp2 = qp;
    for (int i = 0; i < qp2.grad.size(); ++i) qp2.grad[i] += pert(rng);
    AdmmSolver admm2(qp2, st);
    const QpSolution warm = admm2.solve(cold.x, cold.duals);
    if (warm.iterations <= cold.iterations) ++admm_ok;

    ActiveSetSolver as2(qp2, st);
    const QpSolution as_cold = active_set_solve(qp2, st);
    const QpSolution as_warm = as2.solve(cold.x);
    if (as_warm.iterations <= as_cold.iterations) ++as_ok;
  }
  CHECK(admm_ok >= 90);
  CHECK(as_ok >= 90);
}

TEST_CASE("solvers are deterministic") {
  std::mt19937_64 rng(31337);
  const QpProblem qp = random_feasible_qp(rng, 25, 50);
  SolverSettings st;
  const QpSolution a1 = admm_solve(qp, st);
  const QpSolution a2 = admm_solve(qp, st);
  REQUIRE(a1.x.size() == a2.x.size());
  CHECK(a1.iterations == a2.iterations);
  CHECK(std::memcmp(a1.x.data(), a2.x.data(), sizeof(double) * a1.x.size()) == 0);
  CHECK(std::memcmp(a1.duals.data(), a2.duals.data(), sizeof(double) * a1.duals.size()) == 0);

  const QpSolution b1 = active_set_solve(qp, st);
  const QpSolution b2 = active_set_solve(qp, st);
  CHECK(b1.iterations == b2.iterations);
  CHECK(std::memcmp(b1.x.data(), b2.x.data(), sizeof(double) * b1.x.size()) == 0);
}

TEST_CASE("kkt factor size is stable across repeated setups") {
  std::mt19937_64 rng(404);
  const QpProblem qp = random_feasible_qp(rng, 30, 60);
  SolverSettings st;
  AdmmSolver s1(qp, st);
  AdmmSolver s2(qp, st);
  CHECK(s1.kkt_factor_nonzeros() == s2.kkt_factor_nonzeros());
  CHECK(s1.kkt_factor_nonzeros() > 0);
}

TEST_CASE("rank-deficient PSD hessian is handled by both solvers") {
  // H = diag(1, 0): PSD only; regularization must carry the active set solver
  QpProblem qp;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
  h(0, 0) = 1.0;
  qp.hessian = h.sparseView();
  qp.grad.resize(2);
  qp.grad << -1.0, -0.2;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  qp.a_ineq = a.sparseView();
  qp.lower = Eigen::VectorXd::Constant(2, -2.0);
  qp.upper = Eigen::VectorXd::Constant(2, 2.0);

  const QpSolution s1 = admm_solve(qp, SolverSettings{});
  CHECK(s1.status == QpStatus::kSolved);
  CHECK(s1.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(s1.x[1] == doctest::Approx(2.0).epsilon(1e-4));  // pushed to the bound

  const QpSolution s2 = active_set_solve(qp, SolverSettings{});
  CHECK(s2.status == QpStatus::kSolved);
  CHECK(s2.x[1] == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("solve paths perform no heap allocation after setup") {
  std::mt19937_64 rng(555);
  const QpProblem qp = random_feasible_qp(rng, 25, 45);
  SolverSettings st;

  AdmmSolver admm(qp, st);
  QpSolution out;
  admm.solve_into(nullptr, nullptr, out);  // sizes the output buffers
  REQUIRE(out.status == QpStatus::kSolved);
  attmpc::testing::reset_alloc_counters();
  admm.solve_into(nullptr, nullptr, out);
  CHECK(attmpc::testing::allocation_count() == 0);

  ActiveSetSolver as(qp, st);
  as.solve_into(nullptr, out);
  REQUIRE(out.status == QpStatus::kSolved);
  attmpc::testing::reset_alloc_counters();
  as.solve_into(nullptr, out);
  CHECK(attmpc::testing::allocation_count() == 0);

  CHECK(admm.workspace_bytes() > 0);
  CHECK(as.workspace_bytes() > 0);
}

TEST_CASE("admm update reuses the factorization pattern") {
  std::mt19937_64 rng(606);
  QpProblem qp = random_feasible_qp(rng, 15, 30);
  SolverSettings st;
  AdmmSolver admm(qp, st);
  const QpSolution before = admm.solve();
  REQUIRE(before.status == QpStatus::kSolved);

  // same pattern, shifted gradient
  qp.grad.array() += 0.01;
  admm.update(qp);
  const QpSolution after = admm.solve();
  CHECK(after.status == QpStatus::kSolved);
  CHECK(check_kkt(qp, after.x, after.duals).ok);
}
