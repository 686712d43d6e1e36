#pragma once

#include <memory>
#include <vector>

#include "attmpc/so3.hpp"

namespace attmpc {

/// Kinematically consistent reference triple at one instant:
/// d/dt R_d = R_d * skew(omega_d).
struct ReferenceSample {
  double t = 0.0;
  RotationMatrix attitude_d;
  Vec3 omega_d = Vec3::Zero();   // rad/s, reference body frame
  Vec3 domega_d = Vec3::Zero();  // rad/s^2
};

/// Uniform sampling of a reference over one prediction horizon: n+1 samples
/// at t0 + k*dt, k = 0..n.
struct ReferenceGrid {
  double dt = 0.0;
  std::vector<ReferenceSample> samples;
};

/// Pure function of time; controllers re-sample shifted grids each step.
class ReferenceTrajectory {
 public:
  virtual ~ReferenceTrajectory() = default;
  virtual ReferenceSample at(double t) const = 0;
};

/// Constant body-frame rate: R_d(t) = R_d(0) * exp(t * omega_d),
/// omega_d constant, domega_d = 0.
class ConstantRateReference : public ReferenceTrajectory {
 public:
  ConstantRateReference(const RotationMatrix& attitude0, const Vec3& omega_d)
      : attitude0_(attitude0), omega_d_(omega_d) {}

  ReferenceSample at(double t) const override;

 private:
  RotationMatrix attitude0_;
  Vec3 omega_d_;
};

/// Reference with per-component polynomial omega_d(t); the attitude is
/// integrated on the manifold (RK4 on the rotation-vector increment) at a
/// fine internal step and cached, so at() stays cheap and deterministic.
/// Intended for tests with nonzero reference acceleration.
class PolynomialRateReference : public ReferenceTrajectory {
 public:
  /// coefficients[j] multiplies t^j (vector-valued). t must stay within
  /// [0, t_max] when sampling.
  PolynomialRateReference(const RotationMatrix& attitude0,
                          std::vector<Vec3> coefficients, double t_max,
                          double cache_dt = 1e-3);

  ReferenceSample at(double t) const override;

 private:
  Vec3 omega_at(double t) const;
  Vec3 domega_at(double t) const;
  RotationMatrix integrate(const RotationMatrix& from, double t0, double dt) const;

  std::vector<Vec3> coefficients_;
  double t_max_;
  double cache_dt_;
  std::vector<RotationMatrix> knots_;
};

ReferenceGrid sample_grid(const ReferenceTrajectory& ref, double t0, double dt, int n);

}  // namespace attmpc
