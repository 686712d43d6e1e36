#include "attmpc/dynamics.hpp"

#include <stdexcept>

namespace attmpc {

void SpacecraftParams::validate() const {
  if ((inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("SpacecraftParams: inertia must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("SpacecraftParams: inertia must be positive definite");
  }
  for (int i = 0; i < 3; ++i) {
    if (!(tau_min[i] < tau_max[i]) || !(omega_min[i] < omega_max[i])) {
      throw std::invalid_argument("SpacecraftParams: bounds must be strictly ordered componentwise");
    }
  }
}

Vec3 momentum_body(const BodyState& state) {
  return state.attitude.matrix().transpose() * state.momentum_inertial;
}

Vec3 angular_accel(const SpacecraftParams& params, const Vec3& omega,
                   const Vec3& l_body, const Vec3& tau) {
  return params.inertia.ldlt().solve(tau - omega.cross(l_body));
}

namespace {

struct Derivative {
  Vec3 dphi;
  Vec3 domega;
};

// State within the step: attitude = r0 * exp(dphi), so the body-frame
// momentum is exp(dphi)^T * (r0^T l).
Derivative plant_rate(const Mat3& inertia_inv, const Vec3& l_body0,
                      const Vec3& dphi, const Vec3& omega, const Vec3& tau) {
  const Vec3 l_body = exp_so3(dphi).matrix().transpose() * l_body0;
  Derivative d;
  d.dphi = bortz_rate(dphi, omega);
  d.domega = inertia_inv * (tau - omega.cross(l_body));
  return d;
}

}  // namespace

BodyState step_plant(const SpacecraftParams& params, const BodyState& state,
                     const Vec3& tau, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step_plant: dt must be positive");
  }
  const Mat3 inertia_inv = params.inertia_inverse();
  const Vec3 l_body0 = momentum_body(state);

  const Vec3 phi0 = Vec3::Zero();
  const Derivative k1 = plant_rate(inertia_inv, l_body0, phi0, state.omega, tau);
  const Derivative k2 = plant_rate(inertia_inv, l_body0, phi0 + 0.5 * dt * k1.dphi,
                                   state.omega + 0.5 * dt * k1.domega, tau);
  const Derivative k3 = plant_rate(inertia_inv, l_body0, phi0 + 0.5 * dt * k2.dphi,
                                   state.omega + 0.5 * dt * k2.domega, tau);
  const Derivative k4 = plant_rate(inertia_inv, l_body0, phi0 + dt * k3.dphi,
                                   state.omega + dt * k3.domega, tau);

  const Vec3 dphi = dt / 6.0 * (k1.dphi + 2.0 * k2.dphi + 2.0 * k3.dphi + k4.dphi);
  const Vec3 domega = dt / 6.0 * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);

  BodyState next;
  next.attitude = state.attitude * exp_so3(dphi);
  next.omega = state.omega + domega;
  next.momentum_inertial = state.momentum_inertial;
  return next;
}

}  // namespace attmpc
