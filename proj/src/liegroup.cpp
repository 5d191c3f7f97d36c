#include "cotred/liegroup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cotred {

namespace {
constexpr double kSmallAngle = 1e-8;
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSkew: return "NotSkew";
    case ErrorCode::NotRotation: return "NotRotation";
    case ErrorCode::InvalidInertia: return "InvalidInertia";
    case ErrorCode::AxisNotFixed: return "AxisNotFixed";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NoReturn: return "NoReturn";
    case ErrorCode::LoopNotClosed: return "LoopNotClosed";
    case ErrorCode::PoleOnLoop: return "PoleOnLoop";
    case ErrorCode::NotTangent: return "NotTangent";
    case ErrorCode::ProjectionMismatch: return "ProjectionMismatch";
    case ErrorCode::DriftExceeded: return "DriftExceeded";
    case ErrorCode::DegenerateGenerator: return "DegenerateGenerator";
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::DegenerateInertia: return "DegenerateInertia";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::NoPrecessionRoot: return "NoPrecessionRoot";
    case ErrorCode::ZeroMomentum: return "ZeroMomentum";
  }
  return "Unknown";
}

double wrap_angle(double angle) {
  double a = std::remainder(angle, kTwoPi);  // [-pi, pi]
  if (a <= -kPi) a += kTwoPi;
  return a;
}

Rotation Rotation::from_matrix(const Mat3& m, double tol) {
  Rotation r(m);
  if (!m.allFinite() || r.orthonormality_error() > tol) {
    std::ostringstream os;
    os << "matrix is not in SO(3) (error " << r.orthonormality_error() << ")";
    throw Error(ErrorCode::NotRotation, os.str());
  }
  return r;
}

Rotation Rotation::aligning(const Vec3& from, const Vec3& to) {
  const Vec3 a = from.normalized();
  const Vec3 b = to.normalized();
  const Vec3 axis = a.cross(b);
  const double s = axis.norm();
  const double c = a.dot(b);
  if (s < 1e-12) {
    if (c > 0) return Rotation();
    // Antiparallel: half turn about any axis perpendicular to a.
    Vec3 perp = a.cross(Vec3::UnitX());
    if (perp.norm() < 1e-6) perp = a.cross(Vec3::UnitY());
    return exp_so3(kPi * perp.normalized());
  }
  return exp_so3(std::atan2(s, c) * axis / s);
}

double Rotation::orthonormality_error() const {
  const double orth = (m_.transpose() * m_ - Mat3::Identity()).norm();
  return std::max(orth, std::abs(m_.determinant() - 1.0));
}

Rotation Rotation::orthonormalized() const {
  Eigen::JacobiSVD<Mat3> svd(m_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0) u.col(2) *= -1.0;
  return Rotation(u * v.transpose());
}

InertiaTensor::InertiaTensor(double i1, double i2, double i3) : d_(i1, i2, i3) {
  if (!(i3 > 0.0) || i2 < i3 || i1 < i2 || !d_.allFinite()) {
    std::ostringstream os;
    os << "principal moments must satisfy I1 >= I2 >= I3 > 0, got (" << i1 << ", " << i2
       << ", " << i3 << ")";
    throw Error(ErrorCode::InvalidInertia, os.str());
  }
}

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) {
  const double asym = (m + m.transpose()).norm();
  if (!(asym < 1e-9)) {
    std::ostringstream os;
    os << "||M + M^T|| = " << asym;
    throw Error(ErrorCode::NotSkew, os.str());
  }
  return Vec3(0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)),
              0.5 * (m(1, 0) - m(0, 1)));
}

Rotation exp_so3(const Vec3& v) {
  const double theta = v.norm();
  const Mat3 k = hat(v);
  if (theta < kSmallAngle) {
    return Rotation::unchecked(Mat3::Identity() + k + 0.5 * k * k);
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Rotation::unchecked(Mat3::Identity() + a * k + b * k * k);
}

Vec3 log_so3(const Rotation& r) {
  const Mat3& m = r.matrix();
  const Vec3 s2(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));  // 2 sin(theta) a
  const double c = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const double s = 0.5 * s2.norm();
  const double theta = std::atan2(s, c);

  if (theta < kSmallAngle) return 0.5 * s2;
  if (c > -0.99) return theta / (2.0 * s) * s2;

  // Near pi the antisymmetric part loses the axis; recover it from the
  // symmetric part a a^T = (sym(R) - cos(theta) 1) / (1 - cos(theta)),
  // using the column with the largest diagonal entry.
  const Mat3 aat = (0.5 * (m + m.transpose()) - c * Mat3::Identity()) / (1.0 - c);
  Eigen::Index k = 0;
  aat.diagonal().maxCoeff(&k);
  Vec3 axis = aat.col(k) / std::sqrt(aat(k, k));
  axis.normalize();
  if (axis.dot(s2) < 0.0) axis = -axis;
  return theta * axis;
}

double angle_about_axis(const Rotation& r, const Vec3& axis, double tol) {
  const Vec3 a = axis.normalized();
  const double moved = (r * a - a).norm();
  if (!(moved < tol)) {
    std::ostringstream os;
    os << "rotation moves the axis by " << moved << " (tolerance " << tol << ")";
    throw Error(ErrorCode::AxisNotFixed, os.str());
  }
  const Mat3& m = r.matrix();
  const Vec3 s2(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  const double phi = std::atan2(0.5 * a.dot(s2), 0.5 * (m.trace() - 1.0));
  return wrap_angle(phi);
}

}  // namespace cotred
