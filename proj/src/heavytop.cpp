#include "cotred/heavytop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "cotred/mechsys.hpp"
#include "cotred/spherical.hpp"

namespace cotred::heavytop {

void Params::validate() const {
  if (!(mass > 0.0 && gravity > 0.0 && length > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "mass, gravity and length must be positive");
  }
  if (!(std::abs(com_direction.norm() - 1.0) < 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "centre-of-mass direction must be a unit vector");
  }
}

Tangent rhs(const HeavyTopState& s, const Params& p) {
  const Vec3 omega = p.inertia.solve(s.pi);
  return {s.pi.cross(omega) + p.mgl() * s.gamma.cross(p.com_direction), s.gamma.cross(omega)};
}

double hamiltonian(const HeavyTopState& s, const Params& p) {
  return 0.5 * s.pi.dot(p.inertia.solve(s.pi)) + p.mgl() * s.gamma.dot(p.com_direction);
}

Gradient gradient(const Function& f, const HeavyTopState& s, double h) {
  const double step_pi = h * std::max(1.0, s.pi.norm());
  const double step_gamma = h * std::max(1.0, s.gamma.norm());
  Gradient g;
  for (int i = 0; i < 3; ++i) {
    g.pi(i) = five_point_derivative(
        [&](double t) { return f({s.pi + t * Vec3::Unit(i), s.gamma}); }, step_pi);
    g.gamma(i) = five_point_derivative(
        [&](double t) { return f({s.pi, s.gamma + t * Vec3::Unit(i)}); }, step_gamma);
  }
  return g;
}

double lie_poisson_bracket(const Gradient& df, const Gradient& dg, const HeavyTopState& s) {
  return -s.pi.dot(df.pi.cross(dg.pi)) -
         s.gamma.dot(df.pi.cross(dg.gamma) - dg.pi.cross(df.gamma));
}

double lie_poisson_bracket(const Function& f, const Function& g, const HeavyTopState& s, double h) {
  return lie_poisson_bracket(gradient(f, s, h), gradient(g, s, h), s);
}

Tangent bracket_vector_field(const Function& h, const HeavyTopState& s, double step) {
  const Gradient dh = gradient(h, s, step);
  Tangent out;
  for (int i = 0; i < 3; ++i) {
    Gradient e{Vec3::Zero(), Vec3::Zero()};
    e.pi(i) = 1.0;
    out.pi_rate(i) = lie_poisson_bracket(e, dh, s);
    e.pi(i) = 0.0;
    e.gamma(i) = 1.0;
    out.gamma_rate(i) = lie_poisson_bracket(e, dh, s);
  }
  return out;
}

Eigen::VectorXd pack(const HeavyTopState& s) {
  Eigen::VectorXd y(6);
  y << s.pi, s.gamma;
  return y;
}

HeavyTopState unpack(const Eigen::VectorXd& y) { return {y.segment<3>(0), y.segment<3>(3)}; }

Rhs reduced_flow(const Params& p) {
  return [p](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    const Tangent d = rhs(unpack(y), p);
    Eigen::VectorXd out(6);
    out << d.pi_rate, d.gamma_rate;
    return out;
  };
}

Eigen::VectorXd pack_full(const Rotation& r, const HeavyTopState& s) {
  Eigen::VectorXd y(15);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) y(3 * i + j) = r.matrix()(i, j);
  }
  y.segment<3>(9) = s.pi;
  y.segment<3>(12) = s.gamma;
  return y;
}

Rotation attitude_of(const Eigen::VectorXd& y) {
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r(i, j) = y(3 * i + j);
  }
  return Rotation::unchecked(r);
}

HeavyTopState reduced_of(const Eigen::VectorXd& y) { return {y.segment<3>(9), y.segment<3>(12)}; }

Rhs full_flow(const Params& p) {
  return [p](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    const HeavyTopState s = reduced_of(y);
    const Vec3 omega = p.inertia.solve(s.pi);
    const Mat3 rdot = attitude_of(y).matrix() * hat(omega);
    const Tangent d = rhs(s, p);
    Eigen::VectorXd out(15);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out(3 * i + j) = rdot(i, j);
    }
    out.segment<3>(9) = d.pi_rate;
    out.segment<3>(12) = d.gamma_rate;
    return out;
  };
}

namespace {

void require_lagrange(const Params& p) {
  const double i1 = p.inertia.i1();
  if (std::abs(i1 - p.inertia.i2()) > 1e-12 * i1 ||
      (p.com_direction - Vec3::UnitZ()).norm() > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "Lagrange top needs I1 = I2 and chi = e3");
  }
}

double slow_root(const Params& p, double tilt, double pi3) {
  const double a = p.inertia.i1() * std::cos(tilt);
  const double mgl = p.mgl();
  if (std::abs(a) < 1e-14 * p.inertia.i1()) {
    if (pi3 == 0.0) throw Error(ErrorCode::NoPrecessionRoot, "horizontal top without spin");
    return mgl / pi3;
  }
  const double disc = pi3 * pi3 - 4.0 * a * mgl;
  if (disc < 0.0) {
    std::ostringstream os;
    os << "no steady precession at tilt " << tilt << " with Pi3 = " << pi3
       << " (Pi3^2 < 4 I1 M g l cos(theta))";
    throw Error(ErrorCode::NoPrecessionRoot, os.str());
  }
  // Root of smaller magnitude, written to avoid cancellation.
  const double q = 0.5 * (pi3 + std::copysign(std::sqrt(disc), pi3));
  return (q != 0.0) ? mgl / q : std::sqrt(mgl / a);
}

struct NutationSweep {
  double period;
  double azimuth_advance;
};

double gamma3_rate(const Eigen::VectorXd& y, const Params& p) {
  const Vec3 omega = p.inertia.solve(y.segment<3>(0));
  return y(3) * omega(1) - y(4) * omega(0);
}

// Integrates one nutation period (second zero of d Gamma3 / dt) and measures
// the unwrapped body azimuth advance of Gamma over it.
NutationSweep sweep_nutation(const Params& p, const HeavyTopState& start, double dt) {
  const Rhs flow = reduced_flow(p);
  Eigen::VectorXd y = pack(start);
  double t = 0.0;
  double azimuth = std::atan2(y(4), y(3));
  double advance = 0.0;
  auto accumulate = [&](const Eigen::VectorXd& next) {
    const double a = std::atan2(next(4), next(3));
    advance += wrap_angle(a - azimuth);
    azimuth = a;
  };
  int changes = 0;
  double previous = 0.0;
  const std::size_t max_steps = 50'000'000;
  for (std::size_t k = 0; k < max_steps; ++k) {
    Eigen::VectorXd next = rk4_step(flow, t, y, dt);
    const double rate = gamma3_rate(next, p);
    if (k > 0 && previous != 0.0 && std::signbit(rate) != std::signbit(previous)) {
      if (++changes == 2) {
        double lo = 0.0;
        double hi = dt;
        for (int it = 0; it < 100 && hi - lo > 1e-15 * (t + dt); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double r = gamma3_rate(rk4_step(flow, t, y, mid), p);
          (std::signbit(r) == std::signbit(previous) ? lo : hi) = mid;
        }
        const double h = 0.5 * (lo + hi);
        accumulate(rk4_step(flow, t, y, h));
        return {t + h, advance};
      }
    }
    accumulate(next);
    previous = rate;
    y = next;
    t += dt;
  }
  throw Error(ErrorCode::NoReturn, "nutation did not complete a period");
}

}  // namespace

Precession steady_precession(const Params& p, double tilt, double axial_momentum) {
  require_lagrange(p);
  if (std::abs(std::sin(tilt)) < 1e-12) {
    throw Error(ErrorCode::NoPrecessionRoot, "sleeping top: tilt 0 has no precession cone");
  }
  Precession out;
  out.tilt = tilt;
  out.axial_momentum = axial_momentum;
  out.precession_rate = slow_root(p, tilt, axial_momentum);
  out.spin_rate = axial_momentum / p.inertia.i3() - out.precession_rate * std::cos(tilt);
  return out;
}

HeavyTopState lagrange_state(const Params& p, double tilt, double axial_momentum, double precession_rate) {
  const Vec3 gamma(std::sin(tilt), 0.0, std::cos(tilt));
  const double spin = axial_momentum / p.inertia.i3() - precession_rate * std::cos(tilt);
  const Vec3 omega = spin * Vec3::UnitZ() + precession_rate * gamma;
  return {p.inertia.apply(omega), gamma};
}

LagrangeOrbit lagrange_periodic_ic(const Params& p, double tilt, double spin_rate,
                                   double nutation, double return_tol) {
  require_lagrange(p);
  p.validate();
  LagrangeOrbit out;
  out.nutation = nutation;
  double pi3 = spin_rate * p.inertia.i3();

  if (nutation == 0.0) {
    const Precession s = steady_precession(p, tilt, pi3);
    if (std::abs(s.spin_rate) < 1e-12) {
      throw Error(ErrorCode::NoReturn, "steady precession with zero body spin has no reduced period");
    }
    out.start = lagrange_state(p, tilt, pi3, s.precession_rate);
    out.period = kTwoPi / std::abs(s.spin_rate);
    out.precession_rate = s.precession_rate;
    out.axial_momentum = pi3;
    out.steady = true;
    return out;
  }

  auto start_for = [&](double axial) {
    const double rate = (1.0 + nutation) * steady_precession(p, tilt, axial).precession_rate;
    return std::pair{lagrange_state(p, tilt, axial, rate), rate};
  };
  auto step_for = [&](const HeavyTopState& s) {
    const double scale = std::max({s.pi.cwiseQuotient(p.inertia.diagonal()).norm(),
                                   std::sqrt(p.mgl() / p.inertia.i1()),
                                   std::abs(s.pi(2)) / p.inertia.i1()});
    return kTwoPi / scale / 4000.0;
  };
  auto residual = [&](double axial, double turns) {
    const HeavyTopState s = start_for(axial).first;
    return sweep_nutation(p, s, step_for(s)).azimuth_advance - kTwoPi * turns;
  };

  // For each neighbouring whole number of turns, march Pi3 geometrically until
  // the residual changes sign, then refine by Illinois regula falsi. The
  // advance tends to an asymptote as the spin grows, so one neighbour may be
  // out of reach; keep the solution closest to the requested spin.
  auto solve = [&](double turns) -> std::optional<double> {
    try {
      double a = pi3;
      double fa = residual(a, turns);
      const double probe = residual(pi3 * 1.01, turns);
      const double factor = ((probe - fa) * fa > 0.0) ? 1.0 / 1.05 : 1.05;
      double b = a;
      double fb = fa;
      while (std::signbit(fb) == std::signbit(fa)) {
        a = b;
        fa = fb;
        b *= factor;
        if (!(b / pi3 > 0.25 && b / pi3 < 4.0)) return std::nullopt;
        fb = residual(b, turns);
      }
      int side = 0;
      for (int it = 0; it < 200; ++it) {
        const double c = (a * fb - b * fa) / (fb - fa);
        const double fc = residual(c, turns);
        if (std::abs(fc) < 1e-12 || std::abs(b - a) < 1e-15 * std::abs(c)) return c;
        if (std::signbit(fc) == std::signbit(fb)) {
          b = c;
          fb = fc;
          if (side == -1) fa *= 0.5;
          side = -1;
        } else {
          a = c;
          fa = fc;
          if (side == 1) fb *= 0.5;
          side = 1;
        }
      }
    } catch (const Error&) {
    }
    return std::nullopt;
  };
  const HeavyTopState s0 = start_for(pi3).first;
  const double natural = sweep_nutation(p, s0, step_for(s0)).azimuth_advance / kTwoPi;
  std::optional<double> best;
  for (const double turns : {std::floor(natural), std::ceil(natural)}) {
    const auto x = solve(turns);
    if (x && (!best || std::abs(*x - pi3) < std::abs(*best - pi3))) best = x;
  }
  if (!best) throw Error(ErrorCode::NoReturn, "could not tune the spin to close the nutating orbit");
  const double x1 = *best;

  const auto [start, rate] = start_for(x1);
  const double dt = step_for(start);
  const double estimate = sweep_nutation(p, start, dt).period;
  out.start = start;
  out.period = detect_period(reduced_flow(p), pack(start), dt, 1.5 * estimate, return_tol);
  out.precession_rate = rate;
  out.axial_momentum = x1;
  out.steady = false;
  return out;
}

PeriodicOrbit sample_orbit(const HeavyTopState& start, double period, const Params& p,
                           std::size_t samples) {
  PeriodicOrbit orbit;
  orbit.period = period;
  orbit.dt = period / static_cast<double>(samples);
  const Trajectory traj = rk4_integrate(reduced_flow(p), pack(start), 0.0, period, orbit.dt);
  orbit.states.reserve(traj.size());
  for (const auto& y : traj.states) orbit.states.push_back(unpack(y));
  return orbit;
}

double direct_phase(const Trajectory& full, double tol) {
  const Rotation loop = attitude_of(full.back()) * attitude_of(full.front()).inverse();
  return angle_about_axis(loop, Vec3::UnitZ(), tol);
}

double frame_residual(const Trajectory& full) {
  double worst = 0.0;
  for (const auto& y : full.states) {
    const Vec3 predicted = attitude_of(y).inverse() * Vec3::UnitZ();
    worst = std::max(worst, (predicted - reduced_of(y).gamma).norm());
  }
  return worst;
}

PhaseReport phase_report(const PeriodicOrbit& orbit, const Params& p) {
  const auto& states = orbit.states;
  if (states.size() < 3) throw Error(ErrorCode::TooFewSamples, "orbit needs at least 3 samples");
  const HeavyTopState& s0 = states.front();
  const double mu = casimir_momentum(s0);
  if (std::abs(mu) < 1e-10) {
    throw Error(ErrorCode::ZeroMomentum, "Pi . Gamma vanishes; the isotropy group is not a circle");
  }
  const double closure = (pack(states.back()) - pack(s0)).norm();
  if (!(closure < 1e-6 * std::max(1.0, s0.pi.norm()))) {
    std::ostringstream os;
    os << "orbit does not close: |y(T) - y(0)| = " << closure;
    throw Error(ErrorCode::NotClosed, os.str());
  }

  const double dt = orbit.dt;
  const double period = orbit.period;
  const double h = hamiltonian(s0, p);
  const Vec3 k = Vec3::UnitZ();
  const InertiaTensor& inertia = p.inertia;
  const Rotation q0 = Rotation::aligning(s0.gamma, k);

  std::vector<Vec3> gammas;
  std::vector<Vec3> pis;
  gammas.reserve(states.size());
  pis.reserve(states.size());
  for (const auto& s : states) {
    gammas.push_back(s.gamma.normalized());
    pis.push_back(s.pi);
  }

  PhaseReport report;
  report.period = period;
  report.h_mu = h;
  report.mu = mu * k;

  // Mechanical connection: holonomy + mu int ds / ||k_Q(q_h)||^2.
  const HorizontalLift mech = horizontal_lift(gammas, dt, q0, k, inertia);
  const double chi = lift_holonomy(mech, k);
  std::vector<double> a(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) a[i] = xi_step2(mech.attitude[i], mu, k, inertia);
  const double dynamic_b = quadrature(a, dt);
  report.methods.push_back({"mechanical_holonomy", chi + dynamic_b, chi, dynamic_b});

  // Canonical one-form connection; its dynamic term is the bare-potential form.
  const HorizontalLift canon =
      horizontal_lift(gammas, dt, q0, k, inertia, ConnectionChoice::CanonicalOneForm, pis);
  const double chi_canon = lift_holonomy(canon, k);
  std::vector<double> height(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) height[i] = states[i].gamma.dot(p.com_direction);
  const double dynamic_bare = (2.0 * h * period - 2.0 * p.mgl() * quadrature(height, dt)) / mu;
  report.methods.push_back(
      {"canonical_one_form", chi_canon + dynamic_bare, chi_canon, dynamic_bare});

  // Amended-potential dynamic term; its surface term is not computed.
  const Potential potential = [&](const Rotation& r) {
    return p.mgl() * (r.inverse() * k).dot(p.com_direction);
  };
  std::vector<double> amended(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    amended[i] = circle_amended_potential(mech.attitude[i], mu, k, inertia, potential);
  }
  const double average = quadrature(amended, dt) / period;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  report.methods.push_back(
      {"amended_potential", nan, nan, 2.0 * (h - average) * period / mu, nan, false});

  // Printed second-line expression, evaluated for comparison only.
  const double trace = inertia.trace();
  const SphericalLoop loop(gammas, 1e-6);
  const double surface = spherical_cap_integral(loop, [&](const Vec3& g) {
    const double gig = g.dot(inertia.apply(g));
    return (2.0 * inertia.apply(g).squaredNorm() - gig * trace) / (gig * gig);
  });
  std::vector<double> inv(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    inv[i] = 1.0 / gammas[i].dot(inertia.apply(gammas[i]));
  }
  const double printed_dynamic = quadrature(inv, dt);
  report.methods.push_back({"printed_second_line", surface + printed_dynamic, surface,
                            printed_dynamic, nan, false});

  const Trajectory full = rk4_integrate(full_flow(p), pack_full(q0, s0), 0.0, period, dt);
  report.direct = direct_phase(full);
  finalize_report(report);
  return report;
}

}  // namespace cotred::heavytop
