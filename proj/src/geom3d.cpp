#include "geom3d.hpp"

#include <cmath>

namespace swarmloc {

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

Vec3 unskew(const Mat3& m) {
  return Vec3(m(2, 1), m(0, 2), m(1, 0));
}

Rotation Rotation::from_matrix(const Mat3& m) {
  const double ortho = (m.transpose() * m - Mat3::Identity()).norm();
  if (!(ortho <= kRotationTol)) {
    throw GeomError("rotation matrix fails orthonormality tolerance");
  }
  if (m.determinant() < 0.0) {
    throw GeomError("rotation matrix has negative determinant");
  }
  return Rotation(m, 0);
}

bool Rotation::is_valid(double tol) const {
  return (c_.transpose() * c_ - Mat3::Identity()).norm() <= tol &&
         c_.determinant() > 0.0;
}

Rotation exp_so3(const RotationVector& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a, b;  // sin(t)/t, (1-cos(t))/t^2
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 px = skew(phi);
  const Mat3 c = Mat3::Identity() + a * px + b * px * px;
  return Rotation::from_matrix(c);
}

RotationVector log_so3(const Rotation& rot) {
  const Mat3& c = rot.matrix();
  const double cos_theta =
      std::min(1.0, std::max(-1.0, (c.trace() - 1.0) * 0.5));
  const double theta = std::acos(cos_theta);

  if (theta < kSmallAngle) {
    // log(C) ~ vee(C - C^T)/2 to first order.
    return 0.5 * unskew(c - c.transpose());
  }

  if (theta < M_PI - 1e-6) {
    return (theta / (2.0 * std::sin(theta))) * unskew(c - c.transpose());
  }

  // Near pi: vee(C - C^T) ~ 2 sin(theta) a vanishes; recover the axis from
  // the symmetric part, C + C^T ~ 2 cos(theta) I + 2 (1 - cos(theta)) a a^T.
  const Mat3 aat =
      (0.5 * (c + c.transpose()) - cos_theta * Mat3::Identity()) /
      (1.0 - cos_theta);
  int k = 0;
  aat.diagonal().maxCoeff(&k);
  Vec3 axis = aat.col(k);
  axis /= std::sqrt(std::max(aat(k, k), 0.0));
  // acos is ill-conditioned here; sin(theta) from the antisymmetric part is
  // exact to roundoff and pins the angle.
  const Vec3 w = unskew(c - c.transpose());
  const double sin_theta = std::min(1.0, 0.5 * w.norm());
  const double theta_refined = M_PI - std::asin(sin_theta);
  if (w.dot(axis) < 0.0) axis = -axis;
  return theta_refined * axis.normalized();
}

Mat3 so3_right_jacobian(const RotationVector& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  double b, e;  // (1-cos(t))/t^2, (t - sin(t))/t^3
  if (theta < kSmallAngle) {
    b = 0.5 - theta2 / 24.0;
    e = 1.0 / 6.0 - theta2 / 120.0;
  } else {
    b = (1.0 - std::cos(theta)) / theta2;
    e = (theta - std::sin(theta)) / (theta2 * theta);
  }
  const Mat3 px = skew(phi);
  return Mat3::Identity() - b * px + e * px * px;
}

}  // namespace swarmloc
