#pragma once

#include "attmpc/so3.hpp"

namespace attmpc {

/// Rigid spacecraft with momentum-exchange actuation. Reaction wheels are
/// abstracted to a body torque with box limits; only the torque and the total
/// angular momentum enter the dynamics.
struct SpacecraftParams {
  Mat3 inertia = Mat3::Identity();  // kg m^2, symmetric positive definite
  Vec3 tau_min = Vec3::Constant(-1.0);   // N m
  Vec3 tau_max = Vec3::Constant(1.0);
  Vec3 omega_min = Vec3::Constant(-1.0);  // rad/s
  Vec3 omega_max = Vec3::Constant(1.0);

  /// Throws std::invalid_argument if the inertia is not symmetric positive
  /// definite (tolerance 1e-12) or any bound pair is not strictly ordered.
  void validate() const;

  Mat3 inertia_inverse() const { return inertia.inverse(); }
};

/// Simulated plant state. Attitude maps body to inertial coordinates; the
/// total angular momentum is stored in the inertial frame, where it is
/// constant under torque-only (momentum-exchange) actuation.
struct BodyState {
  RotationMatrix attitude;
  Vec3 omega = Vec3::Zero();              // rad/s, body frame
  Vec3 momentum_inertial = Vec3::Zero();  // N m s
};

/// Total angular momentum expressed in the body frame: L = R^T l.
Vec3 momentum_body(const BodyState& state);

/// J^-1 (tau - omega x L).
Vec3 angular_accel(const SpacecraftParams& params, const Vec3& omega,
                   const Vec3& l_body, const Vec3& tau);

/// One RK4 step of size dt with tau held constant. Integrates the pair
/// (attitude increment, omega) where the increment follows the Bortz rate and
/// the momentum used in the gyroscopic term is recomputed exactly at each
/// substage. The inertial momentum is unchanged.
BodyState step_plant(const SpacecraftParams& params, const BodyState& state,
                     const Vec3& tau, double dt);

/// Long simulations should re-project the attitude every this many steps to
/// bound orthonormality drift.
inline constexpr int kReorthonormalizeInterval = 100;

}  // namespace attmpc
