#pragma once

#include <Eigen/Dense>

namespace attmpc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;

/// Axis-angle attitude parametrization: direction = rotation axis, norm =
/// angle in radians. Deliberately not restricted to norms below pi; branch
/// selection is handled by log_so3().
using RotationVector = Vec3;

/// Maps a vector to its skew-symmetric cross-product matrix,
/// skew(v) * w == v x w.
Mat3 skew(const Vec3& v);

/// Proper rotation (body -> reference frame by convention of the caller).
/// Construction through from_matrix() enforces orthonormality and det +1.
class RotationMatrix {
 public:
  RotationMatrix() : m_(Mat3::Identity()) {}

  /// Validates the SO(3) invariants (tolerance 1e-9); throws
  /// std::invalid_argument on failure.
  static RotationMatrix from_matrix(const Mat3& m);

  /// Skips validation. For internal composition of already-valid rotations.
  static RotationMatrix from_matrix_unchecked(const Mat3& m) {
    return RotationMatrix(m);
  }

  const Mat3& matrix() const { return m_; }

  RotationMatrix transposed() const { return RotationMatrix(m_.transpose()); }

  RotationMatrix operator*(const RotationMatrix& rhs) const {
    return RotationMatrix(m_ * rhs.m_);
  }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  /// max(||m^T m - I||_inf, |det(m) - 1|)
  double orthonormality_error() const;

  /// Polar projection onto SO(3) (nearest rotation in Frobenius norm).
  RotationMatrix orthonormalized() const;

 private:
  explicit RotationMatrix(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// Rodrigues exponential map. Uses a 4th-order series for the trigonometric
/// coefficients below ||phi|| = 1e-4 to avoid cancellation.
RotationMatrix exp_so3(const RotationVector& phi);

/// Branch-aware logarithm. Among all rotation vectors mapping to r
/// (2*pi-periodic candidates along the principal axis, plus the sign-flipped
/// axis when the angle is numerically at pi), returns the one closest to
/// `hint` in the 2-norm. With hint = 0 this is the principal branch.
///
/// Near angle pi the axis is recovered from the symmetric part of r (the
/// antisymmetric part vanishes there).
RotationVector log_so3(const RotationMatrix& r, const RotationVector& hint);

/// Rotation-vector kinematic rate: dphi/dt as a function of phi and the body
/// angular velocity omega. Throws std::domain_error when ||phi|| is within
/// 1e-6 of a nonzero multiple of 2*pi, where the coefficient
/// (1 - th*sin(th)/(2-2*cos(th)))/th^2 is singular.
Vec3 bortz_rate(const RotationVector& phi, const Vec3& omega);

}  // namespace attmpc
