#pragma once

// SO(3), its Lie algebra so(3) ~ (R^3, x) and the dual so(3)* ~ R^3.

#include <Eigen/Dense>

#include "cotred/error.hpp"

namespace cotred {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Reduce an angle to (-pi, pi].
double wrap_angle(double angle);

/// Element of SO(3) stored as an orthonormal matrix.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  /// Validates R^T R = 1 and det R = +1 within `tol`.
  static Rotation from_matrix(const Mat3& m, double tol = 1e-12);
  /// Wraps a matrix produced by integration; no validation.
  static Rotation unchecked(const Mat3& m) { return Rotation(m); }
  /// Smallest rotation taking unit vector `from` onto unit vector `to`.
  static Rotation aligning(const Vec3& from, const Vec3& to);

  const Mat3& matrix() const { return m_; }
  Rotation inverse() const { return Rotation(m_.transpose()); }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  /// max(||R^T R - 1||_F, |det R - 1|)
  double orthonormality_error() const;
  /// Nearest rotation in the Frobenius norm (polar factor).
  Rotation orthonormalized() const;

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// Principal moments I1 >= I2 >= I3 > 0 in the body frame.
class InertiaTensor {
 public:
  InertiaTensor(double i1, double i2, double i3);

  double i1() const { return d_(0); }
  double i2() const { return d_(1); }
  double i3() const { return d_(2); }
  const Vec3& diagonal() const { return d_; }
  Mat3 matrix() const { return d_.asDiagonal(); }
  double trace() const { return d_.sum(); }

  Vec3 apply(const Vec3& v) const { return d_.cwiseProduct(v); }
  Vec3 solve(const Vec3& v) const { return v.cwiseQuotient(d_); }

 private:
  Vec3 d_;
};

/// Angular momentum expressed in the body frame.
struct BodyMomentum {
  Vec3 value = Vec3::Zero();
  BodyMomentum() = default;
  explicit BodyMomentum(const Vec3& v) : value(v) {}
};

/// Angular momentum expressed in the spatial (inertial) frame.
struct SpatialMomentum {
  Vec3 value = Vec3::Zero();
  SpatialMomentum() = default;
  explicit SpatialMomentum(const Vec3& v) : value(v) {}
};

inline SpatialMomentum to_spatial(const Rotation& r, const BodyMomentum& pi) {
  return SpatialMomentum(r * pi.value);
}
inline BodyMomentum to_body(const Rotation& r, const SpatialMomentum& mu) {
  return BodyMomentum(r.inverse() * mu.value);
}

Mat3 hat(const Vec3& v);
/// Inverse of hat; throws NotSkew when ||M + M^T|| >= 1e-9.
Vec3 vee(const Mat3& m);

/// Rodrigues formula; second-order series below |v| = 1e-8.
Rotation exp_so3(const Vec3& v);
/// Rotation vector with norm in [0, pi].
Vec3 log_so3(const Rotation& r);

/// Angle phi in (-pi, pi] with R = exp(phi * axis), right-hand rule.
/// Throws AxisNotFixed if ||R axis - axis|| >= tol.
double angle_about_axis(const Rotation& r, const Vec3& axis, double tol = 1e-6);

}  // namespace cotred
