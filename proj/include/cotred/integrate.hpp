#pragma once

// Numeric kernels shared by every system: fixed-step RK4, Simpson
// quadrature, sampled-curve interpolation and Poincare-section period
// detection.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cotred/error.hpp"

namespace cotred {

using State = Eigen::VectorXd;
using Rhs = std::function<State(double t, const State& y)>;
/// Optional post-step hook (renormalisation, re-orthonormalisation).
using Projector = std::function<void(State& y)>;

/// Uniformly sampled time series of flat states.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  double dt = 0.0;
  std::vector<std::string> labels;
  std::string integrator = "rk4";

  std::size_t size() const { return states.size(); }
  const State& front() const { return states.front(); }
  const State& back() const { return states.back(); }
  /// Component `i` of every sample.
  std::vector<double> component(Eigen::Index i) const;
  /// True if every spacing matches dt within 1e-12 (a shortened final step fails this).
  bool uniform() const;
};

struct Rk4Options {
  Projector projector;          // disabled when empty
  std::size_t project_every = 100;
};

/// Classical fixed-step RK4 from t0 to t1. The last step is shortened so the
/// final sample lands on t1. Throws NonFiniteState on NaN/Inf.
Trajectory rk4_integrate(const Rhs& rhs, const State& y0, double t0, double t1, double dt,
                         const Rk4Options& options = {});

/// One RK4 step of length h.
State rk4_step(const Rhs& rhs, double t, const State& y, double h);

/// Composite Simpson rule over uniformly spaced samples; an odd number of
/// intervals closes with the Simpson 3/8 rule on the final three.
double quadrature(std::span<const double> samples, double dt);

/// Running integral from the first sample to every sample (same length).
std::vector<double> cumulative_quadrature(std::span<const double> samples, double dt);

/// Value and first derivative of a uniformly sampled vector curve at time t
/// (t measured from the first sample) by a local degree-5 Lagrange fit.
/// At sample nodes the derivative is a (possibly one-sided) finite-difference
/// stencil of the samples.
template <class V>
struct CurvePoint {
  V value;
  V derivative;
};

template <class V>
CurvePoint<V> interpolate_uniform(std::span<const V> samples, double dt, double t) {
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
  const std::ptrdiff_t width = std::min<std::ptrdiff_t>(6, n);
  const double x = t / dt;
  std::ptrdiff_t j0 = static_cast<std::ptrdiff_t>(std::floor(x)) - (width - 1) / 2;
  j0 = std::clamp<std::ptrdiff_t>(j0, 0, n - width);

  V value = samples[0] * 0.0;
  V deriv = samples[0] * 0.0;
  for (std::ptrdiff_t i = 0; i < width; ++i) {
    const double xi = static_cast<double>(j0 + i);
    double li = 1.0;
    double dli = 0.0;
    for (std::ptrdiff_t j = 0; j < width; ++j) {
      if (j == i) continue;
      const double xj = static_cast<double>(j0 + j);
      double term = 1.0 / (xi - xj);
      for (std::ptrdiff_t k = 0; k < width; ++k) {
        if (k == i || k == j) continue;
        const double xk = static_cast<double>(j0 + k);
        term *= (x - xk) / (xi - xk);
      }
      dli += term;
      li *= (x - xj) / (xi - xj);
    }
    value += li * samples[j0 + i];
    deriv += (dli / dt) * samples[j0 + i];
  }
  return {value, deriv};
}

/// d/dt f(t) at t = 0 by the fourth-order five-point central stencil.
template <class F>
double five_point_derivative(F&& f, double h) {
  return (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
}

/// First return time T > 10 dt of the flow to y0: the orbit crosses the
/// hyperplane through y0 normal to y'(0) in the direction of y'(0) with
/// ||y(T) - y0|| < return_tol; the crossing time is bisected to 1e-10
/// relative accuracy. Throws NoReturn if no such return before t_max.
double detect_period(const Rhs& flow, const State& y0, double dt, double t_max,
                     double return_tol);

}  // namespace cotred
