#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "geom3d.hpp"

using namespace swarmloc;

namespace {

// Independent oracle: rotation matrix from the unit quaternion
// q = (cos(t/2), sin(t/2) a), written out without reusing library code.
Mat3 quaternion_rotation(const Vec3& phi) {
  const double theta = phi.norm();
  double w, sx, sy, sz;
  if (theta < 1e-12) {
    w = 1.0;
    sx = 0.5 * phi.x();
    sy = 0.5 * phi.y();
    sz = 0.5 * phi.z();
  } else {
    const double h = 0.5 * theta;
    const double s = std::sin(h) / theta;
    w = std::cos(h);
    sx = s * phi.x();
    sy = s * phi.y();
    sz = s * phi.z();
  }
  Mat3 r;
  r << 1 - 2 * (sy * sy + sz * sz), 2 * (sx * sy - sz * w), 2 * (sx * sz + sy * w),
      2 * (sx * sy + sz * w), 1 - 2 * (sx * sx + sz * sz), 2 * (sy * sz - sx * w),
      2 * (sx * sz - sy * w), 2 * (sy * sz + sx * w), 1 - 2 * (sx * sx + sy * sy);
  return r;
}

Vec3 random_vec(std::mt19937_64& g, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(g), u(g), u(g));
}

}  // namespace

TEST_CASE("skew basics") {
  const Vec3 v(0.3, -1.2, 2.5);
  const Vec3 w(-0.7, 0.4, 1.1);
  const Mat3 m = skew(v);
  CHECK((m + m.transpose()).norm() == 0.0);
  CHECK((m * w - v.cross(w)).norm() == 0.0);
  CHECK((unskew(m) - v).norm() == 0.0);
  // Linearity.
  CHECK((skew(2.0 * v + w) - (2.0 * skew(v) + skew(w))).norm() == 0.0);
}

TEST_CASE("exp_so3 matches quaternion oracle") {
  const Vec3 cases[] = {
      {0.1, -0.2, 0.3},   {1.0, 0.0, 0.0},       {0.0, 0.0, M_PI - 1e-3},
      {-2.0, 1.5, 0.7},   {1e-9, -2e-9, 3e-9},   {0.0, 0.0, 0.0},
      {3.0, -0.4, 0.25},
  };
  for (const Vec3& phi : cases) {
    const Mat3 got = exp_so3(phi).matrix();
    const Mat3 want = quaternion_rotation(phi);
    CHECK((got - want).norm() < 1e-14);
  }
}

TEST_CASE("exp_so3 output is in SO(3)") {
  const Rotation c = exp_so3(Vec3(0.1, -0.2, 0.3));
  CHECK((c.matrix() * c.matrix().transpose() - Mat3::Identity()).norm() < 1e-12);
  CHECK(c.matrix().determinant() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((log_so3(c) - Vec3(0.1, -0.2, 0.3)).norm() < 1e-10);
}

TEST_CASE("log/exp round trip over random rotation vectors") {
  std::mt19937_64 g(42);
  std::uniform_real_distribution<double> ang(0.0, M_PI - 1e-6);
  for (int i = 0; i < 1000; ++i) {
    Vec3 axis = random_vec(g, 1.0);
    while (axis.norm() < 1e-3) axis = random_vec(g, 1.0);
    axis.normalize();
    const Vec3 phi = ang(g) * axis;
    const Vec3 back = log_so3(exp_so3(phi));
    CHECK((back - phi).norm() < 1e-10);
    CHECK(back.norm() <= M_PI + 1e-12);
  }
}

TEST_CASE("log near pi") {
  const Vec3 phi(0.0, 0.0, M_PI - 1e-3);
  CHECK((log_so3(exp_so3(phi)) - phi).norm() < 1e-8);

  // Inside the symmetric-part branch the rotation must still reconstruct.
  std::mt19937_64 g(7);
  for (int i = 0; i < 100; ++i) {
    Vec3 axis = random_vec(g, 1.0);
    while (axis.norm() < 1e-3) axis = random_vec(g, 1.0);
    axis.normalize();
    std::uniform_real_distribution<double> eps(0.0, 1e-6);
    const Vec3 p = (M_PI - eps(g)) * axis;
    const Rotation c = exp_so3(p);
    const Vec3 back = log_so3(c);
    CHECK(back.norm() <= M_PI + 1e-12);
    CHECK((exp_so3(back).matrix() - c.matrix()).norm() < 1e-9);
  }
}

TEST_CASE("log angle stays principal for wrapped inputs") {
  const Vec3 phi = 1.5 * M_PI * Vec3(0.0, 1.0, 0.0);
  const Vec3 back = log_so3(exp_so3(phi));
  CHECK(back.norm() == doctest::Approx(0.5 * M_PI).epsilon(1e-10));
  CHECK((back.normalized() + Vec3(0.0, 1.0, 0.0)).norm() < 1e-10);
}

TEST_CASE("small-angle branch of exp") {
  const Vec3 phi(1e-9, -2e-9, 1.5e-9);
  const Mat3 c = exp_so3(phi).matrix();
  CHECK((c - (Mat3::Identity() + skew(phi))).norm() < 1e-17);
  CHECK((log_so3(exp_so3(phi)) - phi).norm() < 1e-15);
}

TEST_CASE("from_matrix rejects invalid input") {
  Mat3 bad = exp_so3(Vec3(0.2, 0.1, -0.4)).matrix();
  bad(0, 1) += 1e-6;
  CHECK_THROWS_AS(Rotation::from_matrix(bad), GeomError);

  Mat3 reflect = Mat3::Identity();
  reflect(2, 2) = -1.0;
  CHECK_THROWS_AS(Rotation::from_matrix(reflect), GeomError);
}

TEST_CASE("adjoint identity ties skew and rotation conventions") {
  std::mt19937_64 g(3);
  for (int i = 0; i < 100; ++i) {
    const Rotation c = exp_so3(random_vec(g, 2.0));
    const Vec3 v = random_vec(g, 5.0);
    const Mat3 want = skew(c * v);
    const Mat3 got = c.matrix() * skew(v) * c.matrix().transpose();
    CHECK((got - want).norm() < 1e-12);
  }
}

TEST_CASE("right Jacobian against finite differences") {
  std::mt19937_64 g(11);
  const double h = 1e-5;
  for (int i = 0; i < 50; ++i) {
    const Vec3 phi = random_vec(g, 1.2);
    const Mat3 jr = so3_right_jacobian(phi);
    for (int k = 0; k < 3; ++k) {
      Vec3 d = Vec3::Zero();
      d(k) = 1.0;
      const Rotation base = exp_so3(phi);
      const Vec3 plus = log_so3(base.inverse() * exp_so3(phi + h * d));
      const Vec3 minus = log_so3(base.inverse() * exp_so3(phi - h * d));
      const Vec3 fd = (plus - minus) / (2.0 * h);
      CHECK((fd - jr * d).norm() < 1e-8);
    }
  }

  const Vec3 tiny(1e-9, 0, 0);
  CHECK((so3_right_jacobian(tiny) - (Mat3::Identity() - 0.5 * skew(tiny))).norm() <
        1e-15);
}

TEST_CASE("rotation composition and inverse") {
  const Rotation a = exp_so3(Vec3(0.4, -0.1, 0.9));
  const Rotation b = exp_so3(Vec3(-1.1, 0.3, 0.2));
  const Vec3 v(1.0, 2.0, -0.5);
  CHECK(((a * b) * v - a * (b * v)).norm() < 1e-13);
  CHECK(((a * a.inverse()).matrix() - Mat3::Identity()).norm() < 1e-14);
  CHECK(a.is_valid());
}
