#include "cotred/rigidbody.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cotred/mechsys.hpp"
#include "cotred/spherical.hpp"

namespace cotred::rigidbody {

Vec3 euler_rhs(const BodyMomentum& pi, const InertiaTensor& inertia) {
  return pi.value.cross(inertia.solve(pi.value));
}

double hamiltonian(const BodyMomentum& pi, const InertiaTensor& inertia) {
  return 0.5 * pi.value.dot(inertia.solve(pi.value));
}

double lie_poisson_bracket(const Vec3& grad_f, const Vec3& grad_g, const Vec3& pi) {
  return -pi.dot(grad_f.cross(grad_g));
}

Vec3 gradient(const ScalarField& f, const Vec3& x, double h) {
  const double step = h * std::max(1.0, x.norm());
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    g(i) = five_point_derivative([&](double t) { return f(x + t * Vec3::Unit(i)); }, step);
  }
  return g;
}

double lie_poisson_bracket(const ScalarField& f, const ScalarField& g, const Vec3& pi, double h) {
  return lie_poisson_bracket(gradient(f, pi, h), gradient(g, pi, h), pi);
}

FullTangent full_rhs(const FullState& s, const InertiaTensor& inertia) {
  const Vec3 omega = inertia.solve(s.pi.value);
  return {s.attitude.matrix() * hat(omega), s.pi.value.cross(omega)};
}

State pack(const FullState& s) {
  State y(12);
  const Mat3& r = s.attitude.matrix();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) y(3 * i + j) = r(i, j);
  }
  y.segment<3>(9) = s.pi.value;
  return y;
}

FullState unpack(const State& y) {
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r(i, j) = y(3 * i + j);
  }
  return {Rotation::unchecked(r), BodyMomentum(y.segment<3>(9))};
}

Rhs reduced_flow(const InertiaTensor& inertia, EulerRhsFn euler) {
  if (!euler) euler = euler_rhs;
  return [inertia, euler](double, const State& y) -> State {
    return euler(BodyMomentum(y.head<3>()), inertia);
  };
}

Rhs full_flow(const InertiaTensor& inertia) {
  return [inertia](double, const State& y) -> State {
    const FullTangent d = full_rhs(unpack(y), inertia);
    State out(12);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) out(3 * i + j) = d.attitude_rate(i, j);
    }
    out.segment<3>(9) = d.pi_rate;
    return out;
  };
}

double separatrix_distance(const BodyMomentum& pi, const InertiaTensor& inertia) {
  const double ref = pi.value.squaredNorm() / inertia.i2();
  return std::abs(2.0 * hamiltonian(pi, inertia) - ref) / ref;
}

OrbitKind classify_orbit(const BodyMomentum& pi, const InertiaTensor& inertia) {
  if (!(inertia.i1() > inertia.i2() && inertia.i2() > inertia.i3())) {
    throw Error(ErrorCode::DegenerateInertia,
                "orbit classification needs strictly ordered moments I1 > I2 > I3");
  }
  const Vec3& p = pi.value;
  const double norm = p.norm();
  for (int i = 0; i < 3; ++i) {
    if (p.cross(Vec3::Unit(i)).norm() <= 1e-10 * norm) return OrbitKind::Equilibrium;
  }
  const double gap = 2.0 * hamiltonian(pi, inertia) - p.squaredNorm() / inertia.i2();
  if (std::abs(gap) < 1e-9) return OrbitKind::Separatrix;
  return OrbitKind::Periodic;
}

PeriodicOrbit find_periodic_orbit(const BodyMomentum& pi0, const InertiaTensor& inertia,
                                  const OrbitSearch& search, EulerRhsFn euler) {
  if (separatrix_distance(pi0, inertia) < 1e-6) {
    throw Error(ErrorCode::NoReturn, "orbit lies on the separatrix; its period diverges");
  }
  const Rhs flow = reduced_flow(inertia, euler);
  const State y0 = pi0.value;
  const double period = detect_period(flow, y0, search.search_dt, search.t_max, search.return_tol);

  PeriodicOrbit orbit;
  orbit.period = period;
  orbit.dt = period / static_cast<double>(search.samples_per_period);
  const Trajectory traj = rk4_integrate(flow, y0, 0.0, period, orbit.dt);
  orbit.body_momentum.reserve(traj.size());
  for (const auto& s : traj.states) orbit.body_momentum.push_back(s.head<3>());
  return orbit;
}

Trajectory integrate_full(const FullState& start, const InertiaTensor& inertia, double duration,
                          double dt, const Rk4Options& options) {
  Trajectory traj = rk4_integrate(full_flow(inertia), pack(start), 0.0, duration, dt, options);
  traj.labels = {"R11", "R12", "R13", "R21", "R22", "R23", "R31", "R32", "R33",
                 "Pi1", "Pi2", "Pi3"};
  return traj;
}

double direct_phase(const Trajectory& full, double tol) {
  const FullState first = unpack(full.front());
  const FullState last = unpack(full.back());
  const Vec3 mu = first.attitude * first.pi.value;
  if (mu.norm() < 1e-12) throw Error(ErrorCode::ZeroMomentum, "zero angular momentum");
  const Rotation loop = last.attitude * first.attitude.inverse();
  return angle_about_axis(loop, mu.normalized(), tol);
}

PhaseReport rigid_body_phase(const PeriodicOrbit& orbit, const InertiaTensor& inertia,
                             const Rotation& q0) {
  const auto& pis = orbit.body_momentum;
  if (pis.size() < 3) throw Error(ErrorCode::TooFewSamples, "orbit needs at least 3 samples");
  const Vec3 mu = q0 * pis.front();
  const double mu_norm = mu.norm();
  if (mu_norm < 1e-12) throw Error(ErrorCode::ZeroMomentum, "zero angular momentum");
  const double closure = (pis.back() - pis.front()).norm();
  if (!(closure < 1e-6 * mu_norm)) {
    std::ostringstream os;
    os << "orbit does not close: ||Pi(T) - Pi(0)|| = " << closure;
    throw Error(ErrorCode::NotClosed, os.str());
  }
  const Vec3 zeta = mu / mu_norm;
  const double h = hamiltonian(BodyMomentum(pis.front()), inertia);
  const double period = orbit.period;
  const double dt = orbit.dt;

  PhaseReport report;
  report.period = period;
  report.h_mu = h;
  report.mu = mu;

  // Canonical one-form route: solid angle of the body-momentum loop.
  std::vector<Vec3> unit;
  unit.reserve(pis.size());
  for (const Vec3& p : pis) unit.push_back(p.normalized());
  const SphericalLoop loop(unit, 1e-6);
  const double lambda = spherical_signed_area(loop);
  const double lambda_complement = lambda - std::copysign(4.0 * kPi, lambda);
  const double dynamic_energy = 2.0 * h * period / mu_norm;
  report.methods.push_back({"solid_angle", -lambda + dynamic_energy, -lambda, dynamic_energy});

  // Mechanical connection route: holonomy plus |mu|^3 int ds / (Pi . I Pi).
  const HorizontalLift mech = horizontal_lift(unit, dt, q0, zeta, inertia);
  const double chi = lift_holonomy(mech, zeta);
  std::vector<double> a(pis.size());
  for (std::size_t k = 0; k < pis.size(); ++k) {
    a[k] = xi_step2(mech.attitude[k], mu_norm, zeta, inertia);
  }
  const double dynamic_mech = quadrature(a, dt);
  report.methods.push_back({"mechanical_holonomy", chi + dynamic_mech, chi, dynamic_mech});

  // Holonomy of the canonical one-form connection, which should equal -Lambda.
  const HorizontalLift canon =
      horizontal_lift(unit, dt, q0, zeta, inertia, ConnectionChoice::CanonicalOneForm, pis);
  const double chi_canon = lift_holonomy(canon, zeta);
  report.methods.push_back(
      {"canonical_holonomy", chi_canon + dynamic_energy, chi_canon, dynamic_energy});

  // The other cap; differs from solid_angle by 4 pi.
  report.methods.push_back({"solid_angle_complement", -lambda_complement + dynamic_energy,
                            -lambda_complement, dynamic_energy});

  report.direct = std::numeric_limits<double>::quiet_NaN();
  return report;
}

PhaseReport rigid_body_phase_report(const PeriodicOrbit& orbit, const InertiaTensor& inertia,
                                    const Rotation& q0) {
  PhaseReport report = rigid_body_phase(orbit, inertia, q0);
  const FullState start{q0, BodyMomentum(orbit.body_momentum.front())};
  const Trajectory full = integrate_full(start, inertia, orbit.period, orbit.dt);
  report.direct = direct_phase(full);
  finalize_report(report);
  return report;
}

}  // namespace cotred::rigidbody
