#include "attmpc/so3.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace attmpc {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kSmallAngle = 1e-4;  // switch to series below this

// sin(th)/th and (1-cos(th))/th^2 with 4th-order series fallbacks.
double sinc(double th) {
  if (th < kSmallAngle) {
    const double t2 = th * th;
    return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
  }
  return std::sin(th) / th;
}

double one_minus_cos_over_sq(double th) {
  if (th < kSmallAngle) {
    const double t2 = th * th;
    return 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  }
  return (1.0 - std::cos(th)) / (th * th);
}

Vec3 vee_antisymmetric(const Mat3& m) {
  // vee of (m - m^T)/2
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

}  // namespace

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return s;
}

RotationMatrix RotationMatrix::from_matrix(const Mat3& m) {
  const double err = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det_err = std::abs(m.determinant() - 1.0);
  if (!(err <= 1e-9) || !(det_err <= 1e-9)) {
    throw std::invalid_argument("RotationMatrix: matrix is not in SO(3) (orthonormality error " +
                                std::to_string(err) + ", det error " + std::to_string(det_err) + ")");
  }
  return RotationMatrix(m);
}

double RotationMatrix::orthonormality_error() const {
  const double err = (m_.transpose() * m_ - Mat3::Identity()).cwiseAbs().maxCoeff();
  return std::max(err, std::abs(m_.determinant() - 1.0));
}

RotationMatrix RotationMatrix::orthonormalized() const {
  Eigen::JacobiSVD<Mat3> svd(m_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return RotationMatrix(r);
}

RotationMatrix exp_so3(const RotationVector& phi) {
  const double th = phi.norm();
  const Mat3 s = skew(phi);
  const Mat3 r = Mat3::Identity() + sinc(th) * s + one_minus_cos_over_sq(th) * (s * s);
  return RotationMatrix::from_matrix_unchecked(r);
}

RotationVector log_so3(const RotationMatrix& r, const RotationVector& hint) {
  if (!hint.allFinite()) {
    throw std::invalid_argument("log_so3: hint must be finite");
  }
  const Mat3& m = r.matrix();
  const double cos_th = std::min(1.0, std::max(-1.0, 0.5 * (m.trace() - 1.0)));
  const Vec3 w = vee_antisymmetric(m);  // = sin(th) * axis
  const double sin_th = w.norm();
  // acos of the trace is ill-conditioned near 0 and pi; switch to the
  // antisymmetric part there.
  double th;
  if (cos_th >= M_SQRT1_2) {
    th = std::asin(std::min(1.0, sin_th));
  } else if (cos_th <= -M_SQRT1_2) {
    th = M_PI - std::asin(std::min(1.0, sin_th));
  } else {
    th = std::acos(cos_th);
  }

  // Principal axis. Three regimes: generic, near zero, near pi.
  Vec3 axis;
  bool axis_sign_known = true;
  if (th < 1e-9) {
    // Angle numerically zero: axis indeterminate. Prefer the hint direction
    // so that 2*pi*k candidates line up with it.
    axis = hint.norm() > 1e-12 ? Vec3(hint.normalized()) : Vec3::UnitX();
    axis_sign_known = false;
  } else if (sin_th >= 1e-8 && th < M_PI - 1e-4) {
    axis = w / sin_th;
  } else {
    // Near pi the antisymmetric part degenerates; recover the axis from the
    // symmetric part: (m + m^T)/2 = I*cos + (1-cos) a a^T.
    const Mat3 b = 0.5 * (m + m.transpose());
    int imax = 0;
    b.diagonal().maxCoeff(&imax);
    const double denom = 1.0 - cos_th;
    Vec3 a;
    a[imax] = std::sqrt(std::max(0.0, (b(imax, imax) - cos_th) / denom));
    for (int j = 0; j < 3; ++j) {
      if (j != imax) a[j] = b(imax, j) / (denom * a[imax]);
    }
    a.normalize();
    if (sin_th >= 1e-8) {
      if (w.dot(a) < 0.0) a = -a;
    } else {
      axis_sign_known = false;  // exactly at pi: both signs map to r
    }
    axis = a;
  }

  // Branch search: candidates (th + 2*pi*k) * axis, k in {-2..2}; when the
  // axis sign is ambiguous, the mirrored axis as well. Small-step hints never
  // need |k| > 2.
  RotationVector best = th * axis;
  double best_dist = std::numeric_limits<double>::infinity();
  const int n_signs = axis_sign_known ? 1 : 2;
  for (int s = 0; s < n_signs; ++s) {
    const Vec3 a = (s == 0) ? axis : Vec3(-axis);
    const double th_s = th;
    for (int k = -2; k <= 2; ++k) {
      const RotationVector cand = (th_s + kTwoPi * k) * a;
      const double dist = (cand - hint).norm();
      if (dist < best_dist - 1e-15) {
        best_dist = dist;
        best = cand;
      }
    }
  }
  return best;
}

Vec3 bortz_rate(const RotationVector& phi, const Vec3& omega) {
  const double th = phi.norm();
  const double k = std::round(th / kTwoPi);
  if (k >= 1.0 && std::abs(th - kTwoPi * k) < 1e-6) {
    throw std::domain_error("bortz_rate: ||phi|| within 1e-6 of 2*pi*k, rate is singular");
  }
  // coeff = (1 - th*sin(th)/(2 - 2*cos(th))) / th^2 -> 1/12 + th^2/720 + ...
  double coeff;
  if (th < kSmallAngle) {
    const double t2 = th * th;
    coeff = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  } else {
    coeff = (1.0 - th * std::sin(th) / (2.0 - 2.0 * std::cos(th))) / (th * th);
  }
  const Vec3 pxo = phi.cross(omega);
  return omega + phi.cross(0.5 * omega) + coeff * phi.cross(pxo);
}

}  // namespace attmpc
