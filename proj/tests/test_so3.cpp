#include "attmpc/so3.hpp"

#include <doctest.h>

#include "test_support.hpp"

using namespace attmpc;
using attmpc::testing::random_ball;
using attmpc::testing::random_vec3;

TEST_CASE("skew matches the cross product definition") {
  Mat3 expected;
  expected << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  CHECK((skew(Vec3(1, 2, 3)) - expected).norm() == 0.0);

  CHECK((skew(Vec3::UnitX()) * Vec3::UnitY() - Vec3::UnitZ()).norm() == 0.0);
  CHECK(skew(Vec3::Zero()).norm() == 0.0);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const Vec3 v = random_vec3(rng, 5.0);
    const Vec3 w = random_vec3(rng, 5.0);
    CHECK((skew(v) * w - v.cross(w)).norm() < 1e-14);
    CHECK((skew(v) * w + skew(w) * v).norm() < 1e-14);
    CHECK((skew(v) + skew(v).transpose()).norm() == 0.0);
  }
}

TEST_CASE("exp_so3 basic values") {
  CHECK((exp_so3(Vec3::Zero()).matrix() - Mat3::Identity()).norm() == 0.0);

  Mat3 quarter_x;
  quarter_x << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK((exp_so3(Vec3(M_PI_2, 0, 0)).matrix() - quarter_x).norm() < 1e-15);
}

TEST_CASE("exp_so3 is orthonormal with trace 1 + 2 cos") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const Vec3 phi = random_ball(rng, 3.0);
    const RotationMatrix r = exp_so3(phi);
    CHECK(r.orthonormality_error() < 1e-12);
    CHECK(r.matrix().trace() == doctest::Approx(1.0 + 2.0 * std::cos(phi.norm())).epsilon(1e-12));
    // the axis is a fixed vector
    CHECK((r.matrix() * phi - phi).norm() < 1e-12 * (1.0 + phi.norm()));
  }
}

TEST_CASE("exp_so3 small-angle series is smooth across the threshold") {
  for (double th : {1e-5, 9.9e-5, 1.0001e-4, 1e-3}) {
    const Vec3 phi = th * Vec3(1, 2, 2).normalized();
    const RotationMatrix r = exp_so3(phi);
    CHECK(r.orthonormality_error() < 1e-13);
    CHECK((log_so3(r, Vec3::Zero()) - phi).norm() < 1e-12);
  }
}

TEST_CASE("log_so3 identity and roundtrip") {
  CHECK(log_so3(RotationMatrix(), Vec3::Zero()).norm() == 0.0);

  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 phi = random_ball(rng, M_PI - 1e-3);
    const Vec3 back = log_so3(exp_so3(phi), phi);
    CHECK((back - phi).norm() < 1e-9);
  }
}

TEST_CASE("log_so3 near pi uses the symmetric part") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    std::uniform_real_distribution<double> u(M_PI - 1e-4, M_PI - 1e-9);
    Vec3 axis = random_vec3(rng, 1.0);
    if (axis.norm() < 1e-9) axis = Vec3::UnitZ();
    axis.normalize();
    const Vec3 phi = u(rng) * axis;
    const Vec3 back = log_so3(exp_so3(phi), phi);
    CHECK((exp_so3(back).matrix() - exp_so3(phi).matrix()).norm() < 1e-9);
    CHECK((back - phi).norm() < 1e-6);
  }
}

TEST_CASE("log_so3 hint keeps a slow rotation continuous past pi") {
  // r(t) = exp(t * a * e_x) sampled at dt = 0.01 with the angle crossing pi;
  // with the previous output as hint the returned angle keeps growing.
  const double rate = 1.0;
  Vec3 hint = Vec3::Zero();
  double prev_angle = 0.0;
  for (double t = 0.0; t <= 4.5; t += 0.01) {
    const Vec3 phi_true(rate * t, 0.0, 0.0);
    const Vec3 got = log_so3(exp_so3(phi_true), hint);
    CHECK((got - phi_true).norm() < 1e-9);
    CHECK(got.x() >= prev_angle - 1e-12);  // no flip at pi
    prev_angle = got.x();
    hint = got;
  }
  CHECK(prev_angle > M_PI);
}

TEST_CASE("log_so3 selects the 2 pi branch nearest to the hint") {
  const Vec3 axis = Vec3(1, 1, 0).normalized();
  const Vec3 phi = 0.3 * axis;
  const RotationMatrix r = exp_so3(phi);
  const Vec3 shifted = log_so3(r, (0.3 + 2 * M_PI) * axis);
  CHECK((shifted - (0.3 + 2 * M_PI) * axis).norm() < 1e-9);
  const Vec3 mirrored = log_so3(r, (0.3 - 2 * M_PI) * axis);
  CHECK((mirrored - (0.3 - 2 * M_PI) * axis).norm() < 1e-9);
}

TEST_CASE("conjugation identity skew(R^T v) = R^T skew(v) R") {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 200; ++i) {
    const RotationMatrix r = attmpc::testing::random_rotation(rng);
    const Vec3 v = random_vec3(rng, 2.0);
    const Mat3 lhs = skew(r.matrix().transpose() * v);
    const Mat3 rhs = r.matrix().transpose() * skew(v) * r.matrix();
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("bortz_rate limits") {
  const Vec3 omega(0.3, -0.2, 0.1);
  CHECK((bortz_rate(Vec3::Zero(), omega) - omega).norm() == 0.0);
  // parallel phi and omega: both cross terms vanish
  CHECK((bortz_rate(2.0 * omega, omega) - omega).norm() < 1e-15);
}

TEST_CASE("bortz_rate signals the 2 pi singularity") {
  const Vec3 axis = Vec3::UnitY();
  CHECK_THROWS_AS(bortz_rate(2.0 * M_PI * axis, Vec3(0.1, 0, 0)), std::domain_error);
  CHECK_THROWS_AS(bortz_rate((4.0 * M_PI + 5e-7) * axis, Vec3(0.1, 0, 0)), std::domain_error);
  CHECK_NOTHROW(bortz_rate((2.0 * M_PI - 1e-3) * axis, Vec3(0.1, 0, 0)));
}

TEST_CASE("bortz_rate matches the finite-difference oracle") {
  // d/dh log(exp(phi) * exp(omega h), hint=phi) at h -> 0
  std::mt19937_64 rng(23);
  auto oracle = [](const Vec3& phi, const Vec3& omega) {
    const double h = 1e-7;
    const RotationMatrix r0 = exp_so3(phi);
    const Vec3 plus = log_so3(r0 * exp_so3(h * omega), phi);
    const Vec3 minus = log_so3(r0 * exp_so3(-h * omega), phi);
    return Vec3((plus - minus) / (2.0 * h));
  };
  for (int i = 0; i < 1000; ++i) {
    const Vec3 phi = random_ball(rng, 3.0);
    const Vec3 omega = random_ball(rng, 1.0);
    const Vec3 rate = bortz_rate(phi, omega);
    CHECK((rate - oracle(phi, omega)).norm() < 1e-6);
  }
}

TEST_CASE("rotation matrix validation rejects junk") {
  Mat3 bad = Mat3::Identity();
  bad(0, 1) = 1e-6;
  CHECK_THROWS_AS(RotationMatrix::from_matrix(bad), std::invalid_argument);
  CHECK_THROWS_AS(RotationMatrix::from_matrix(-Mat3::Identity()), std::invalid_argument);
  CHECK_NOTHROW(RotationMatrix::from_matrix(Mat3::Identity()));
}

TEST_CASE("orthonormalized projects back to SO(3)") {
  std::mt19937_64 rng(29);
  const RotationMatrix r = attmpc::testing::random_rotation(rng);
  Mat3 drifted = r.matrix();
  drifted(1, 2) += 1e-7;
  const RotationMatrix fixed = RotationMatrix::from_matrix_unchecked(drifted).orthonormalized();
  CHECK(fixed.orthonormality_error() < 1e-14);
  CHECK((fixed.matrix() - r.matrix()).norm() < 1e-6);
}
