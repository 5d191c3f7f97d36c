#include "cotred/integrate.hpp"

#include <cmath>
#include <sstream>

namespace cotred {

std::vector<double> Trajectory::component(Eigen::Index i) const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s(i));
  return out;
}

bool Trajectory::uniform() const {
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs(times[k] - times[k - 1] - dt) >= 1e-12) return false;
  }
  return true;
}

State rk4_step(const Rhs& rhs, double t, const State& y, double h) {
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
  const State k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
  const State k4 = rhs(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory rk4_integrate(const Rhs& rhs, const State& y0, double t0, double t1, double dt,
                         const Rk4Options& options) {
  if (!(dt > 0.0) || !(t1 > t0)) {
    throw Error(ErrorCode::InvalidArgument, "rk4_integrate requires dt > 0 and t1 > t0");
  }
  const double span = t1 - t0;
  auto full_steps = static_cast<std::size_t>(std::floor(span / dt + 1e-9));
  const double remainder = span - static_cast<double>(full_steps) * dt;
  const bool short_step = remainder > 1e-9 * dt;

  Trajectory traj;
  traj.dt = dt;
  traj.times.reserve(full_steps + 2);
  traj.states.reserve(full_steps + 2);
  traj.times.push_back(t0);
  traj.states.push_back(y0);

  State y = y0;
  const std::size_t total = full_steps + (short_step ? 1 : 0);
  for (std::size_t k = 0; k < total; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    const double h = (k < full_steps) ? dt : remainder;
    y = rk4_step(rhs, t, y, h);
    if (!y.allFinite()) {
      std::ostringstream os;
      os << "state became non-finite at t = " << t + h << " (dt = " << dt << ")";
      throw Error(ErrorCode::NonFiniteState, os.str());
    }
    if (options.projector && options.project_every > 0 && (k + 1) % options.project_every == 0) {
      options.projector(y);
    }
    traj.times.push_back(k < full_steps ? t0 + static_cast<double>(k + 1) * dt : t1);
    traj.states.push_back(y);
  }
  return traj;
}

double quadrature(std::span<const double> f, double dt) {
  const std::size_t n = f.size();
  if (n < 3) throw Error(ErrorCode::TooFewSamples, "quadrature needs at least 3 samples");
  const std::size_t intervals = n - 1;
  const std::size_t simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;

  double sum = 0.0;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    sum += f[i] + 4.0 * f[i + 1] + f[i + 2];
  }
  double total = sum * dt / 3.0;
  if (simpson_end != intervals) {
    const std::size_t i = simpson_end;
    total += 3.0 * dt / 8.0 * (f[i] + 3.0 * f[i + 1] + 3.0 * f[i + 2] + f[i + 3]);
  }
  return total;
}

std::vector<double> cumulative_quadrature(std::span<const double> f, double dt) {
  const std::size_t n = f.size();
  if (n < 3) throw Error(ErrorCode::TooFewSamples, "cumulative quadrature needs 3 samples");
  std::vector<double> out(n, 0.0);
  // Even nodes: running Simpson sum. Odd nodes: Simpson up to k-3 plus a 3/8
  // panel, except k = 1 which integrates the parabola through f0, f1, f2.
  for (std::size_t k = 2; k < n; k += 2) {
    out[k] = out[k - 2] + dt / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
  }
  out[1] = dt / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
  for (std::size_t k = 3; k < n; k += 2) {
    out[k] = out[k - 3] + 3.0 * dt / 8.0 * (f[k - 3] + 3.0 * f[k - 2] + 3.0 * f[k - 1] + f[k]);
  }
  return out;
}

double detect_period(const Rhs& flow, const State& y0, double dt, double t_max,
                     double return_tol) {
  if (!(dt > 0.0) || !(t_max > 0.0) || !(return_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "detect_period requires positive dt, t_max, tol");
  }
  const State normal = flow(0.0, y0);
  const double min_time = 10.0 * dt;
  auto section = [&](const State& y) { return (y - y0).dot(normal); };

  State y = y0;
  double t = 0.0;
  double s_prev = section(y);
  for (std::size_t k = 0; t < t_max; t = static_cast<double>(++k) * dt) {
    const State next = rk4_step(flow, t, y, dt);
    if (!next.allFinite()) {
      throw Error(ErrorCode::NonFiniteState, "state became non-finite during period search");
    }
    const double s_next = section(next);
    if (t + dt > min_time && s_prev < 0.0 && s_next >= 0.0) {
      // Bisect the sub-step length h in (0, dt] on the section function.
      double lo = 0.0;
      double hi = dt;
      for (int it = 0; it < 80 && hi - lo > 1e-14 * (t + dt); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (section(rk4_step(flow, t, y, mid)) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double h = 0.5 * (lo + hi);
      const double period = t + h;
      if (period > min_time && (rk4_step(flow, t, y, h) - y0).norm() < return_tol) {
        return period;
      }
    }
    y = next;
    s_prev = s_next;
  }
  std::ostringstream os;
  os << "no return to the initial state within t_max = " << t_max
     << " (equilibrium, separatrix or quasi-periodic input)";
  throw Error(ErrorCode::NoReturn, os.str());
}

}  // namespace cotred
