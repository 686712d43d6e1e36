#pragma once

#include <iosfwd>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace attmpc {

/// Bounds with magnitude >= 1e29 are treated as infinite.
inline constexpr double kInfBound = 1e30;

inline bool is_finite_bound(double b) { return std::abs(b) < 1e29; }

/// Convex quadratic program
///   min 0.5 x^T H x + g^T x   s.t.   lower <= A x <= upper
/// with two-sided rows; equality rows have lower == upper.
struct QpProblem {
  Eigen::SparseMatrix<double> hessian;  // n x n, symmetric, PSD
  Eigen::VectorXd grad;                 // n
  Eigen::SparseMatrix<double> a_ineq;   // m x n
  Eigen::VectorXd lower, upper;         // m

  int num_vars() const { return static_cast<int>(grad.size()); }
  int num_rows() const { return static_cast<int>(lower.size()); }

  double objective(const Eigen::VectorXd& x) const {
    return 0.5 * x.dot(hessian * x) + grad.dot(x);
  }

  /// Shape and invariant checks (dims, lower <= upper, finite H/g/A entries).
  /// Throws std::invalid_argument on violation.
  void validate() const;
};

/// Serializes to the plain-text exchange format:
///   line 1: "qpt 1"
///   line 2: n m hessian_nnz aineq_nnz
///   hessian_nnz lines "i j v" (0-based, upper triangle including diagonal)
///   aineq_nnz lines "i j v"
///   n lines: gradient entries
///   m lines: "lower upper"  (+-1e30 for infinite)
/// Values are written round-trip exact (%.17g).
void write_qp_text(std::ostream& out, const QpProblem& qp);
void write_qp_text_file(const std::string& path, const QpProblem& qp);

/// Parses the exchange format. Throws QpParseError (with the byte offset of
/// the offending token) on malformed input.
QpProblem read_qp_text(std::istream& in);
QpProblem read_qp_text_file(const std::string& path);

class QpParseError : public std::runtime_error {
 public:
  QpParseError(const std::string& what, long byte_offset);
  long byte_offset() const { return byte_offset_; }

 private:
  long byte_offset_;
};

}  // namespace attmpc
