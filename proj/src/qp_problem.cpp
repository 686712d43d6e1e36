#include "attmpc/qp_problem.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace attmpc {

void QpProblem::validate() const {
  const int n = num_vars();
  const int m = num_rows();
  if (hessian.rows() != n || hessian.cols() != n) {
    throw std::invalid_argument("QpProblem: hessian must be n x n");
  }
  if (a_ineq.rows() != m || a_ineq.cols() != n) {
    throw std::invalid_argument("QpProblem: a_ineq must be m x n");
  }
  if (upper.size() != m) {
    throw std::invalid_argument("QpProblem: lower/upper size mismatch");
  }
  for (int i = 0; i < m; ++i) {
    if (!(lower[i] <= upper[i])) {
      throw std::invalid_argument("QpProblem: lower > upper at row " + std::to_string(i));
    }
  }
  if (!grad.allFinite()) {
    throw std::invalid_argument("QpProblem: gradient has non-finite entries");
  }
  for (int k = 0; k < hessian.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(hessian, k); it; ++it) {
      if (!std::isfinite(it.value())) {
        throw std::invalid_argument("QpProblem: hessian has non-finite entries");
      }
    }
  }
  for (int k = 0; k < a_ineq.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_ineq, k); it; ++it) {
      if (!std::isfinite(it.value())) {
        throw std::invalid_argument("QpProblem: a_ineq has non-finite entries");
      }
    }
  }
}

namespace {

void write_value(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

void write_qp_text(std::ostream& out, const QpProblem& qp) {
  const int n = qp.num_vars();
  const int m = qp.num_rows();

  std::vector<Eigen::Triplet<double>> h_upper;
  for (int k = 0; k < qp.hessian.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp.hessian, k); it; ++it) {
      if (it.row() <= it.col()) {
        h_upper.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
      }
    }
  }

  out << "qpt 1\n";
  out << n << ' ' << m << ' ' << h_upper.size() << ' ' << qp.a_ineq.nonZeros() << '\n';
  for (const auto& t : h_upper) {
    out << t.row() << ' ' << t.col() << ' ';
    write_value(out, t.value());
    out << '\n';
  }
  for (int k = 0; k < qp.a_ineq.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(qp.a_ineq, k); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ';
      write_value(out, it.value());
      out << '\n';
    }
  }
  for (int i = 0; i < n; ++i) {
    write_value(out, qp.grad[i]);
    out << '\n';
  }
  for (int i = 0; i < m; ++i) {
    write_value(out, qp.lower[i]);
    out << ' ';
    write_value(out, qp.upper[i]);
    out << '\n';
  }
}

void write_qp_text_file(const std::string& path, const QpProblem& qp) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_qp_text(f, qp);
}

QpParseError::QpParseError(const std::string& what, long byte_offset)
    : std::runtime_error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
      byte_offset_(byte_offset) {}

namespace {

// Whitespace-delimited token reader that tracks byte offsets for diagnostics.
class TokenReader {
 public:
  explicit TokenReader(std::istream& in) : in_(in) {}

  std::string next(const char* what) {
    std::string tok;
    int c = in_.get();
    while (c != EOF && std::isspace(c)) {
      ++offset_;
      c = in_.get();
    }
    if (c == EOF) {
      throw QpParseError(std::string("unexpected end of input while reading ") + what, offset_);
    }
    token_offset_ = offset_;
    while (c != EOF && !std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
      ++offset_;
      c = in_.get();
    }
    if (c != EOF) in_.unget();
    return tok;
  }

  long parse_long(const char* what) {
    const std::string tok = next(what);
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(tok, &pos);
    } catch (const std::exception&) {
      throw QpParseError(std::string("expected integer for ") + what + ", got '" + tok + "'",
                         token_offset_);
    }
    if (pos != tok.size()) {
      throw QpParseError(std::string("trailing characters in integer for ") + what, token_offset_);
    }
    return v;
  }

  double parse_double(const char* what) {
    const std::string tok = next(what);
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      throw QpParseError(std::string("expected number for ") + what + ", got '" + tok + "'",
                         token_offset_);
    }
    if (pos != tok.size()) {
      throw QpParseError(std::string("trailing characters in number for ") + what, token_offset_);
    }
    return v;
  }

  long token_offset() const { return token_offset_; }

 private:
  std::istream& in_;
  long offset_ = 0;
  long token_offset_ = 0;
};

}  // namespace

QpProblem read_qp_text(std::istream& in) {
  TokenReader r(in);
  if (r.next("format tag") != "qpt") {
    throw QpParseError("not a qpt file (expected 'qpt' magic)", r.token_offset());
  }
  const long version = r.parse_long("format version");
  if (version != 1) {
    throw QpParseError("unsupported qpt version " + std::to_string(version), r.token_offset());
  }
  const long n = r.parse_long("variable count n");
  const long m = r.parse_long("row count m");
  const long hnnz = r.parse_long("hessian nnz");
  const long annz = r.parse_long("a_ineq nnz");
  if (n < 0 || m < 0 || hnnz < 0 || annz < 0) {
    throw QpParseError("negative dimension in header", r.token_offset());
  }

  std::vector<Eigen::Triplet<double>> h_triplets;
  h_triplets.reserve(static_cast<std::size_t>(2 * hnnz));
  for (long k = 0; k < hnnz; ++k) {
    const long i = r.parse_long("hessian row index");
    const long j = r.parse_long("hessian col index");
    const double v = r.parse_double("hessian value");
    if (i < 0 || i >= n || j < 0 || j >= n || i > j) {
      throw QpParseError("hessian triplet out of range (upper triangle expected)",
                         r.token_offset());
    }
    h_triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
    if (i != j) h_triplets.emplace_back(static_cast<int>(j), static_cast<int>(i), v);
  }
  std::vector<Eigen::Triplet<double>> a_triplets;
  a_triplets.reserve(static_cast<std::size_t>(annz));
  for (long k = 0; k < annz; ++k) {
    const long i = r.parse_long("a_ineq row index");
    const long j = r.parse_long("a_ineq col index");
    const double v = r.parse_double("a_ineq value");
    if (i < 0 || i >= m || j < 0 || j >= n) {
      throw QpParseError("a_ineq triplet out of range", r.token_offset());
    }
    a_triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
  }

  QpProblem qp;
  qp.grad.resize(n);
  for (long i = 0; i < n; ++i) qp.grad[i] = r.parse_double("gradient entry");
  qp.lower.resize(m);
  qp.upper.resize(m);
  for (long i = 0; i < m; ++i) {
    qp.lower[i] = r.parse_double("lower bound");
    qp.upper[i] = r.parse_double("upper bound");
    if (qp.lower[i] > qp.upper[i]) {
      throw QpParseError("lower > upper at row " + std::to_string(i), r.token_offset());
    }
  }
  qp.hessian.resize(n, n);
  qp.hessian.setFromTriplets(h_triplets.begin(), h_triplets.end());
  qp.a_ineq.resize(m, n);
  qp.a_ineq.setFromTriplets(a_triplets.begin(), a_triplets.end());
  return qp;
}

QpProblem read_qp_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  return read_qp_text(f);
}

}  // namespace attmpc
