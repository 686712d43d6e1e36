#pragma once

#include "attmpc/dynamics.hpp"
#include "attmpc/reference.hpp"

namespace attmpc {

/// Tracking-error state x = (dphi, domega) built from the reversed-order
/// attitude deviation dR = R * R_d^T and domega = R_d * (omega - omega_d).
struct ErrorState {
  Vec3 dphi = Vec3::Zero();    // rad
  Vec3 domega = Vec3::Zero();  // rad/s

  Vec6 stacked() const {
    Vec6 x;
    x << dphi, domega;
    return x;
  }
  static ErrorState from_stacked(const Vec6& x) {
    return ErrorState{x.head<3>(), x.tail<3>()};
  }
};

/// Feedback gains of the stabilizing torque. The critically damped coupling
/// 4 k_c = k_omega^2 places both closed-loop poles at -k_omega/2.
struct Gains {
  double k_c = 0.36;      // 1/s^2
  double k_omega = 1.2;   // 1/s

  static Gains critically_damped(double k_omega) {
    return Gains{0.25 * k_omega * k_omega, k_omega};
  }
  void validate() const;
};

struct ContinuousAffineModel {
  Mat6 a = Mat6::Zero();
  Mat63 b = Mat63::Zero();
  Vec6 c = Vec6::Zero();
};

struct ContinuousLtiModel {
  Mat6 a = Mat6::Zero();
  Mat63 b = Mat63::Zero();
};

/// One zero-order-hold step: x_next = a x + b u + c.
struct DiscreteAffineModel {
  Mat6 a = Mat6::Zero();
  Mat63 b = Mat63::Zero();
  Vec6 c = Vec6::Zero();
};

/// dphi = log(R R_d^T, hint), domega = R_d (omega - omega_d). The hint selects
/// the rotation-vector branch; pass the previous step's dphi for continuity.
ErrorState compute_error(const BodyState& state, const ReferenceSample& ref,
                         const RotationVector& hint);

/// Inverse of the domega definition: omega = omega_d + R_d^T domega.
Vec3 reconstruct_omega(const Vec3& domega, const ReferenceSample& ref);

/// Stabilizing control torque
///   tau = omega x L + J (domega_d - omega_d x omega)
///         - J R_d^T (k_c dphi + k_omega domega) + J R_d^T dalpha
/// which reduces the error dynamics to
///   d(domega)/dt = -k_c dphi - k_omega domega + dalpha.
Vec3 stabilizer_torque(const SpacecraftParams& params, const BodyState& state,
                       const ReferenceSample& ref, const Gains& gains,
                       const Vec3& dalpha,
                       const RotationVector& hint = Vec3::Zero());

/// Affine expansion of the stabilizer torque in the error coordinates at one
/// reference sample, with the body-frame momentum frozen:
///   tau = wrt_dphi * dphi + wrt_domega * domega + wrt_dalpha * dalpha + offset.
struct TorqueAffineMap {
  Mat3 wrt_dphi = Mat3::Zero();
  Mat3 wrt_domega = Mat3::Zero();
  Mat3 wrt_dalpha = Mat3::Zero();
  Vec3 offset = Vec3::Zero();

  Vec3 eval(const Vec3& dphi, const Vec3& domega, const Vec3& dalpha) const {
    return wrt_dphi * dphi + wrt_domega * domega + wrt_dalpha * dalpha + offset;
  }
};

TorqueAffineMap stabilizer_torque_map(const SpacecraftParams& params,
                                      const ReferenceSample& ref,
                                      const Vec3& l_body, const Gains& gains);

/// Continuous-time error model with torque input (frozen momentum):
///   d(dphi)/dt   = domega
///   d(domega)/dt = R_d (omega_d x omega + J^-1 (tau - omega x L) - domega_d)
/// with omega = omega_d + R_d^T domega substituted. Affine in (domega, tau).
ContinuousAffineModel lpv_continuous(const SpacecraftParams& params,
                                     const ReferenceSample& ref,
                                     const Vec3& l_body);

/// Stabilized inner loop: a = [[0, I], [-k_c I, -k_omega I]], b = [0; I].
ContinuousLtiModel lti_continuous(const Gains& gains);

/// Exact ZOH discretization via the matrix exponential of the augmented block
/// [[a, b, c], [0, 0, 0]]. Pass c = nullptr for a linear (offset-free) model.
DiscreteAffineModel zoh_discretize(const Mat6& a_c, const Mat63& b_c,
                                   const Vec6* c_c, double dt);

}  // namespace attmpc
