#include "attmpc/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace attmpc {

ReferenceSample ConstantRateReference::at(double t) const {
  ReferenceSample s;
  s.t = t;
  s.attitude_d = attitude0_ * exp_so3(t * omega_d_);
  s.omega_d = omega_d_;
  s.domega_d = Vec3::Zero();
  return s;
}

PolynomialRateReference::PolynomialRateReference(const RotationMatrix& attitude0,
                                                 std::vector<Vec3> coefficients,
                                                 double t_max, double cache_dt)
    : coefficients_(std::move(coefficients)), t_max_(t_max), cache_dt_(cache_dt) {
  if (coefficients_.empty()) {
    throw std::invalid_argument("PolynomialRateReference: need at least one coefficient");
  }
  if (!(t_max > 0.0) || !(cache_dt > 0.0)) {
    throw std::invalid_argument("PolynomialRateReference: t_max and cache_dt must be positive");
  }
  const int n = static_cast<int>(std::ceil(t_max / cache_dt)) + 1;
  knots_.reserve(static_cast<std::size_t>(n));
  knots_.push_back(attitude0);
  for (int i = 1; i < n; ++i) {
    knots_.push_back(integrate(knots_.back(), (i - 1) * cache_dt_, cache_dt_));
  }
}

Vec3 PolynomialRateReference::omega_at(double t) const {
  Vec3 w = Vec3::Zero();
  double p = 1.0;
  for (const Vec3& c : coefficients_) {
    w += p * c;
    p *= t;
  }
  return w;
}

Vec3 PolynomialRateReference::domega_at(double t) const {
  Vec3 dw = Vec3::Zero();
  double p = 1.0;
  for (std::size_t j = 1; j < coefficients_.size(); ++j) {
    dw += static_cast<double>(j) * p * coefficients_[j];
    p *= t;
  }
  return dw;
}

RotationMatrix PolynomialRateReference::integrate(const RotationMatrix& from,
                                                  double t0, double dt) const {
  // RK4 on the right-increment rotation vector: d(phi)/dt = bortz(phi, omega(t)).
  const Vec3 k1 = bortz_rate(Vec3::Zero(), omega_at(t0));
  const Vec3 k2 = bortz_rate(0.5 * dt * k1, omega_at(t0 + 0.5 * dt));
  const Vec3 k3 = bortz_rate(0.5 * dt * k2, omega_at(t0 + 0.5 * dt));
  const Vec3 k4 = bortz_rate(dt * k3, omega_at(t0 + dt));
  const Vec3 dphi = dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return from * exp_so3(dphi);
}

ReferenceSample PolynomialRateReference::at(double t) const {
  if (t < -1e-12 || t > t_max_ + 1e-9) {
    throw std::invalid_argument("PolynomialRateReference: t outside [0, t_max]");
  }
  t = std::max(0.0, std::min(t, t_max_));
  const int i = std::min(static_cast<int>(t / cache_dt_),
                         static_cast<int>(knots_.size()) - 1);
  ReferenceSample s;
  s.t = t;
  const double rem = t - i * cache_dt_;
  s.attitude_d = rem > 1e-14 ? integrate(knots_[static_cast<std::size_t>(i)], i * cache_dt_, rem)
                             : knots_[static_cast<std::size_t>(i)];
  s.omega_d = omega_at(t);
  s.domega_d = domega_at(t);
  return s;
}

ReferenceGrid sample_grid(const ReferenceTrajectory& ref, double t0, double dt, int n) {
  if (!(dt > 0.0) || n < 1) {
    throw std::invalid_argument("sample_grid: need dt > 0 and n >= 1");
  }
  ReferenceGrid grid;
  grid.dt = dt;
  grid.samples.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    grid.samples.push_back(ref.at(t0 + k * dt));
  }
  return grid;
}

}  // namespace attmpc
