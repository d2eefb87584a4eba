#ifndef SWARMLOC_GEOM3D_HPP
#define SWARMLOC_GEOM3D_HPP

#include <Eigen/Dense>

#include "error.hpp"

namespace swarmloc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Rotation vectors use the axis-angle parameterization phi = theta * axis.
using RotationVector = Vec3;

// Below this angle (rad) closed-form SO(3) coefficients switch to series.
inline constexpr double kSmallAngle = 1e-7;

// Orthonormality tolerance accepted by Rotation::from_matrix.
inline constexpr double kRotationTol = 1e-9;

class GeomError : public Error {
 public:
  explicit GeomError(const std::string& what)
      : Error(ErrorCode::kInvalidArgument, what) {}
};

Mat3 skew(const Vec3& v);
Vec3 unskew(const Mat3& m);

// Member of SO(3). Construction through from_matrix validates; all other
// paths (identity, exp_so3, composition) preserve orthonormality up to
// floating-point drift well inside kRotationTol.
class Rotation {
 public:
  Rotation() : c_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  // Rejects inputs with ||C^T C - I|| > kRotationTol or det < 0.
  static Rotation from_matrix(const Mat3& m);

  const Mat3& matrix() const { return c_; }

  Vec3 operator*(const Vec3& v) const { return c_ * v; }
  Rotation operator*(const Rotation& o) const { return Rotation(c_ * o.c_, 0); }

  Rotation inverse() const { return Rotation(c_.transpose(), 0); }

  bool is_valid(double tol = kRotationTol) const;

 private:
  Rotation(const Mat3& m, int) : c_(m) {}
  Mat3 c_;
};

// Rodrigues formula; series expansion below kSmallAngle.
Rotation exp_so3(const RotationVector& phi);

// Principal logarithm, angle in [0, pi]. At angle pi the axis sign is
// chosen deterministically (either sign satisfies exp(log(C)) = C).
RotationVector log_so3(const Rotation& c);

// Right Jacobian of exp_so3: exp(phi + d) ~ exp(phi) exp(Jr(phi) d).
Mat3 so3_right_jacobian(const RotationVector& phi);

}  // namespace swarmloc

#endif
