#include "attmpc/error_tracking.hpp"

#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace attmpc {

void Gains::validate() const {
  if (!(k_c > 0.0) || !(k_omega > 0.0)) {
    throw std::invalid_argument("Gains: k_c and k_omega must be strictly positive");
  }
}

ErrorState compute_error(const BodyState& state, const ReferenceSample& ref,
                         const RotationVector& hint) {
  const RotationMatrix delta_r = state.attitude * ref.attitude_d.transposed();
  ErrorState e;
  e.dphi = log_so3(delta_r, hint);
  e.domega = ref.attitude_d * (state.omega - ref.omega_d);
  return e;
}

Vec3 reconstruct_omega(const Vec3& domega, const ReferenceSample& ref) {
  return ref.omega_d + ref.attitude_d.matrix().transpose() * domega;
}

Vec3 stabilizer_torque(const SpacecraftParams& params, const BodyState& state,
                       const ReferenceSample& ref, const Gains& gains,
                       const Vec3& dalpha, const RotationVector& hint) {
  gains.validate();
  const ErrorState e = compute_error(state, ref, hint);
  const Vec3 l_body = momentum_body(state);
  const Mat3& j = params.inertia;
  const Mat3 rd_t = ref.attitude_d.matrix().transpose();
  return state.omega.cross(l_body) + j * (ref.domega_d - ref.omega_d.cross(state.omega)) -
         j * (rd_t * (gains.k_c * e.dphi + gains.k_omega * e.domega)) +
         j * (rd_t * dalpha);
}

TorqueAffineMap stabilizer_torque_map(const SpacecraftParams& params,
                                      const ReferenceSample& ref,
                                      const Vec3& l_body, const Gains& gains) {
  gains.validate();
  const Mat3& j = params.inertia;
  const Mat3 rd_t = ref.attitude_d.matrix().transpose();
  // omega = omega_d + R_d^T domega and omega x L = -skew(L) omega give
  //   gyro + feedforward = omega_d x L + J domega_d
  //                        + (-skew(L) - J skew(omega_d)) R_d^T domega.
  TorqueAffineMap map;
  map.wrt_dphi = -gains.k_c * j * rd_t;
  map.wrt_domega = (-skew(l_body) - j * skew(ref.omega_d) - gains.k_omega * j) * rd_t;
  map.wrt_dalpha = j * rd_t;
  map.offset = ref.omega_d.cross(l_body) + j * ref.domega_d;
  return map;
}

ContinuousAffineModel lpv_continuous(const SpacecraftParams& params,
                                     const ReferenceSample& ref,
                                     const Vec3& l_body) {
  const Mat3 rd = ref.attitude_d.matrix();
  const Mat3 rd_t = rd.transpose();
  const Mat3 j_inv = params.inertia_inverse();
  // d(domega)/dt = R_d (skew(omega_d) + J^-1 skew(L)) omega + R_d J^-1 tau
  //                - R_d domega_d, with omega = omega_d + R_d^T domega.
  const Mat3 gyro = skew(ref.omega_d) + j_inv * skew(l_body);
  ContinuousAffineModel m;
  m.a.topRightCorner<3, 3>() = Mat3::Identity();
  m.a.bottomRightCorner<3, 3>() = rd * gyro * rd_t;
  m.b.bottomRows<3>() = rd * j_inv;
  m.c.tail<3>() = rd * (gyro * ref.omega_d - ref.domega_d);
  return m;
}

ContinuousLtiModel lti_continuous(const Gains& gains) {
  gains.validate();
  ContinuousLtiModel m;
  m.a.topRightCorner<3, 3>() = Mat3::Identity();
  m.a.bottomLeftCorner<3, 3>() = -gains.k_c * Mat3::Identity();
  m.a.bottomRightCorner<3, 3>() = -gains.k_omega * Mat3::Identity();
  m.b.bottomRows<3>() = Mat3::Identity();
  return m;
}

DiscreteAffineModel zoh_discretize(const Mat6& a_c, const Mat63& b_c,
                                   const Vec6* c_c, double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("zoh_discretize: dt must be positive");
  }
  const int naug = c_c ? 10 : 9;
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(naug, naug);
  aug.topLeftCorner<6, 6>() = a_c;
  aug.block<6, 3>(0, 6) = b_c;
  if (c_c) aug.block<6, 1>(0, 9) = *c_c;
  const Eigen::MatrixXd expm = (aug * dt).exp();

  DiscreteAffineModel d;
  d.a = expm.topLeftCorner<6, 6>();
  d.b = expm.block<6, 3>(0, 6);
  if (c_c) d.c = expm.block<6, 1>(0, 9);
  return d;
}

}  // namespace attmpc
