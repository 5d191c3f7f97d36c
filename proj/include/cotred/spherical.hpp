#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cotred/liegroup.hpp"

namespace cotred {

/// Closed loop of unit vectors on S^2, joined by geodesic segments. The last
/// sample repeats the first (a polygon a, b, c is given as a, b, c, a).
class SphericalLoop {
 public:
  /// Throws InvalidArgument for non-unit samples (1e-9) and LoopNotClosed
  /// when ||first - last|| >= closure_tol.
  explicit SphericalLoop(std::vector<Vec3> samples, double closure_tol = 1e-6);

  const std::vector<Vec3>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  SphericalLoop reversed() const;

 private:
  std::vector<Vec3> samples_;
  double closure_tol_;
};

/// Chart axis used for the area computation: normalised mean of the samples,
/// then its antipode, then the loop's vector area and its antipode; the first
/// candidate further than 1e-6 from every sample and every antipodal sample
/// wins. Throws PoleOnLoop if none qualifies.
Vec3 choose_area_axis(const SphericalLoop& loop);

/// Signed solid angle of the cap containing the chosen axis, in (-4pi, 4pi):
/// the integral of (1 - cos theta) d phi about that axis, exact along the
/// great-circle segments joining consecutive samples. Positive when the loop
/// runs counterclockwise around the cap seen from outside.
double spherical_signed_area(const SphericalLoop& loop);
/// Same, about a caller-supplied axis (must avoid the loop and its antipodes).
double spherical_signed_area(const SphericalLoop& loop, const Vec3& axis);

/// Signed integral of f dS over the same cap (orientation as above), by
/// integrating dphi * int_0^theta f sin(theta') dtheta' along the loop with
/// Gauss-Legendre in theta'.
double spherical_cap_integral(const SphericalLoop& loop,
                              const std::function<double(const Vec3&)>& f,
                              std::optional<Vec3> axis = std::nullopt);

}  // namespace cotred
