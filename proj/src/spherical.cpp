#include "cotred/spherical.hpp"

#include <array>
#include <cmath>
#include <sstream>

namespace cotred {

namespace {

constexpr double kPoleClearance = 1e-6;

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half).
constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

bool clear_of_loop(const SphericalLoop& loop, const Vec3& axis) {
  for (const Vec3& p : loop.samples()) {
    if ((p - axis).norm() <= kPoleClearance || (p + axis).norm() <= kPoleClearance) return false;
  }
  return true;
}

void require_clear(const SphericalLoop& loop, const Vec3& axis) {
  if (!clear_of_loop(loop, axis)) {
    throw Error(ErrorCode::PoleOnLoop, "area axis lies on the loop or its antipode");
  }
}

// Orthonormal frame (e1, e2, axis).
std::pair<Vec3, Vec3> tangent_frame(const Vec3& axis) {
  Vec3 seed = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 e1 = (seed - seed.dot(axis) * axis).normalized();
  return {e1, axis.cross(e1)};
}

}  // namespace

SphericalLoop::SphericalLoop(std::vector<Vec3> samples, double closure_tol)
    : samples_(std::move(samples)), closure_tol_(closure_tol) {
  if (samples_.size() < 3) {
    throw Error(ErrorCode::TooFewSamples, "a spherical loop needs at least 3 samples");
  }
  for (const Vec3& p : samples_) {
    if (!p.allFinite() || std::abs(p.norm() - 1.0) >= 1e-9) {
      throw Error(ErrorCode::InvalidArgument, "loop samples must be unit vectors");
    }
  }
  const double gap = (samples_.front() - samples_.back()).norm();
  if (!(gap < closure_tol_)) {
    std::ostringstream os;
    os << "||first - last|| = " << gap << " exceeds closure tolerance " << closure_tol_;
    throw Error(ErrorCode::LoopNotClosed, os.str());
  }
}

SphericalLoop SphericalLoop::reversed() const {
  return SphericalLoop(std::vector<Vec3>(samples_.rbegin(), samples_.rend()), closure_tol_);
}

Vec3 choose_area_axis(const SphericalLoop& loop) {
  Vec3 mean = Vec3::Zero();
  Vec3 vector_area = Vec3::Zero();
  const auto& s = loop.samples();
  for (std::size_t k = 0; k < s.size(); ++k) {
    mean += s[k];
    vector_area += s[k].cross(s[(k + 1) % s.size()]);
  }
  mean /= static_cast<double>(s.size());

  std::vector<Vec3> candidates;
  // A near-zero mean (great-circle-like loops) carries no direction.
  if (mean.norm() > 1e-3) {
    candidates.push_back(mean.normalized());
    candidates.push_back(-mean.normalized());
  }
  if (vector_area.norm() > 1e-12) {
    candidates.push_back(vector_area.normalized());
    candidates.push_back(-vector_area.normalized());
  }
  for (const Vec3& c : candidates) {
    if (clear_of_loop(loop, c)) return c;
  }
  throw Error(ErrorCode::PoleOnLoop, "every candidate area axis lies on the loop");
}

double spherical_signed_area(const SphericalLoop& loop, const Vec3& axis_in) {
  const Vec3 n = axis_in.normalized();
  require_clear(loop, n);
  const auto& s = loop.samples();
  double total = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Vec3& p = s[k];
    const Vec3& q = s[(k + 1) % s.size()];
    // Signed solid angle of the geodesic triangle (n, p, q).
    const double num = n.dot(p.cross(q));
    const double den = 1.0 + n.dot(p) + p.dot(q) + q.dot(n);
    total += 2.0 * std::atan2(num, den);
  }
  return total;
}

double spherical_signed_area(const SphericalLoop& loop) {
  return spherical_signed_area(loop, choose_area_axis(loop));
}

double spherical_cap_integral(const SphericalLoop& loop,
                              const std::function<double(const Vec3&)>& f,
                              std::optional<Vec3> axis_in) {
  const Vec3 n = axis_in ? axis_in->normalized() : choose_area_axis(loop);
  require_clear(loop, n);
  const Vec3 e1 = tangent_frame(n).first;
  const auto& s = loop.samples();

  // Gauss-Legendre in arclength along each geodesic edge, with the exact
  // azimuth rate dphi/ds = n.(x cross x') / sin^2(theta).
  auto radial = [&](const Vec3& x) {
    const double theta = std::acos(std::clamp(x.dot(n), -1.0, 1.0));
    const Vec3 planar = x - x.dot(n) * n;
    const Vec3 dir = planar.norm() > 0.0 ? Vec3(planar.normalized()) : e1;
    double sum = 0.0;
    const double half = 0.5 * theta;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        const double th = half * (1.0 + sign * kGlNodes[i]);
        sum += kGlWeights[i] * f(std::cos(th) * n + std::sin(th) * dir) * std::sin(th);
      }
    }
    return sum * half;
  };

  double total = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Vec3& p = s[k];
    const Vec3& q = s[(k + 1) % s.size()];
    const Vec3 chord = q - p.dot(q) * p;
    if (chord.norm() == 0.0) continue;
    const Vec3 u = chord.normalized();
    const double length = std::atan2(chord.norm(), p.dot(q));
    const double half = 0.5 * length;
    double edge = 0.0;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        const double t = half * (1.0 + sign * kGlNodes[i]);
        const Vec3 x = std::cos(t) * p + std::sin(t) * u;
        const Vec3 dx = -std::sin(t) * p + std::cos(t) * u;
        const double c = x.dot(n);
        const double rate = n.dot(x.cross(dx)) / (1.0 - c * c);
        edge += kGlWeights[i] * radial(x) * rate;
      }
    }
    total += edge * half;
  }
  return total;
}

}  // namespace cotred
