#pragma once

// Free rigid body: Euler equations on so(3)*, attitude dynamics on
// T*SO(3) (left trivialised), and the reconstruction phase of periodic
// body-momentum orbits.

#include <functional>
#include <vector>

#include "cotred/integrate.hpp"
#include "cotred/liegroup.hpp"
#include "cotred/phase.hpp"

namespace cotred::rigidbody {

/// Pi x Omega with Omega = I^{-1} Pi.
Vec3 euler_rhs(const BodyMomentum& pi, const InertiaTensor& inertia);

/// 1/2 (Pi1^2/I1 + Pi2^2/I2 + Pi3^2/I3).
double hamiltonian(const BodyMomentum& pi, const InertiaTensor& inertia);

using ScalarField = std::function<double(const Vec3&)>;

/// {f, g}(Pi) = -Pi . (grad f x grad g), from supplied gradients.
double lie_poisson_bracket(const Vec3& grad_f, const Vec3& grad_g, const Vec3& pi);
/// Same with five-point central-difference gradients of step h * max(1, |Pi|).
double lie_poisson_bracket(const ScalarField& f, const ScalarField& g, const Vec3& pi,
                           double h = 1e-3);
Vec3 gradient(const ScalarField& f, const Vec3& x, double h = 1e-3);

struct FullState {
  Rotation attitude;
  BodyMomentum pi;
};

struct FullTangent {
  Mat3 attitude_rate;
  Vec3 pi_rate;
};

/// Rdot = R hat(Omega), Pidot = Pi x Omega.
FullTangent full_rhs(const FullState& s, const InertiaTensor& inertia);

/// Flat layout: R row-major (9), Pi (3).
State pack(const FullState& s);
FullState unpack(const State& y);

using EulerRhsFn = std::function<Vec3(const BodyMomentum&, const InertiaTensor&)>;

/// Reduced flow on R^3; `euler` defaults to euler_rhs (overridable for
/// fault-injection in the self test).
Rhs reduced_flow(const InertiaTensor& inertia, EulerRhsFn euler = {});
Rhs full_flow(const InertiaTensor& inertia);

enum class OrbitKind { Equilibrium, Periodic, Separatrix };

/// Equilibrium iff Pi is parallel to a principal axis (1e-10), separatrix
/// iff |2h - |Pi|^2/I2| < 1e-9, periodic otherwise. Throws DegenerateInertia
/// unless I1 > I2 > I3.
OrbitKind classify_orbit(const BodyMomentum& pi, const InertiaTensor& inertia);

/// Relative distance to the separatrix energy, |2h - |Pi|^2/I2| / (|Pi|^2/I2).
double separatrix_distance(const BodyMomentum& pi, const InertiaTensor& inertia);

/// Reduced periodic orbit sampled uniformly over one period, with the first
/// and last samples the same point of the orbit.
struct PeriodicOrbit {
  std::vector<Vec3> body_momentum;
  double period = 0.0;
  double dt = 0.0;
};

struct OrbitSearch {
  double search_dt = 1e-3;
  double t_max = 500.0;
  double return_tol = 1e-6;
  std::size_t samples_per_period = 20000;
};

/// detect_period on the Euler flow, then resampling at dt = T / samples.
/// Throws NoReturn for equilibria and for orbits within 1e-6 (relative) of the separatrix.
PeriodicOrbit find_periodic_orbit(const BodyMomentum& pi0, const InertiaTensor& inertia,
                                  const OrbitSearch& search = {}, EulerRhsFn euler = {});

/// Full attitude + momentum trajectory from `start` over [0, duration] with the given step.
Trajectory integrate_full(const FullState& start, const InertiaTensor& inertia, double duration,
                          double dt, const Rk4Options& options = {});

/// Angle phi with R(T) R(0)^{-1} = exp(phi mu/|mu|), from the first and last
/// samples. Throws AxisNotFixed if the momentum did not return.
double direct_phase(const Trajectory& full, double tol = 1e-6);

/// Formula evaluations for a periodic orbit (attitude starts at q0):
///   solid_angle            -Lambda + 2 h T / |mu|   (cap containing the area axis)
///   mechanical_holonomy    chi + |mu|^3 int ds / (Pi . I Pi)
///   canonical_holonomy     holonomy of the canonical one-form lift + 2 h T / |mu|
///   solid_angle_complement -Lambda with the complementary cap + 2 h T / |mu|
/// Throws NotClosed if the orbit does not close within 1e-6 |mu|.
PhaseReport rigid_body_phase(const PeriodicOrbit& orbit, const InertiaTensor& inertia,
                             const Rotation& q0 = Rotation());

/// rigid_body_phase plus the direct phase from the unreduced flow integrated
/// on the orbit's sample grid.
PhaseReport rigid_body_phase_report(const PeriodicOrbit& orbit, const InertiaTensor& inertia,
                                    const Rotation& q0 = Rotation());

}  // namespace cotred::rigidbody
