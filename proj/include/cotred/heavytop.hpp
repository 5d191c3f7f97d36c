#pragma once

// Heavy top on se(3)*: body momentum Pi and body vertical Gamma = R^T k.
// Lagrange-top periodic orbits and the phase about the vertical axis.

#include <functional>
#include <vector>

#include "cotred/integrate.hpp"
#include "cotred/liegroup.hpp"
#include "cotred/phase.hpp"

namespace cotred::heavytop {

struct HeavyTopState {
  Vec3 pi = Vec3::Zero();
  Vec3 gamma = Vec3::UnitZ();
};

struct Params {
  InertiaTensor inertia{1.0, 1.0, 1.0};
  double mass = 1.0;
  double gravity = 1.0;
  double length = 1.0;
  Vec3 com_direction = Vec3::UnitZ();  ///< chi, unit body vector to the centre of mass

  /// Throws InvalidArgument unless M, g, l > 0 and |chi| = 1 (1e-12).
  void validate() const;
  double mgl() const { return mass * gravity * length; }
};

struct Tangent {
  Vec3 pi_rate;
  Vec3 gamma_rate;
};

/// Pidot = Pi x Omega + M g l Gamma x chi, Gammadot = Gamma x Omega.
Tangent rhs(const HeavyTopState& s, const Params& p);

/// 1/2 Pi . Omega + M g l Gamma . chi.
double hamiltonian(const HeavyTopState& s, const Params& p);

/// Casimirs Pi . Gamma and |Gamma|^2.
inline double casimir_momentum(const HeavyTopState& s) { return s.pi.dot(s.gamma); }
inline double casimir_gamma(const HeavyTopState& s) { return s.gamma.squaredNorm(); }

/// Partial gradients (d/dPi, d/dGamma).
struct Gradient {
  Vec3 pi;
  Vec3 gamma;
};

using Function = std::function<double(const HeavyTopState&)>;

/// Five-point central differences, step h scaled by max(1, |Pi|) and max(1, |Gamma|).
Gradient gradient(const Function& f, const HeavyTopState& s, double h = 1e-3);

/// {f, g} = -Pi . (df_Pi x dg_Pi) - Gamma . (df_Pi x dg_Gamma - dg_Pi x df_Gamma).
double lie_poisson_bracket(const Gradient& df, const Gradient& dg, const HeavyTopState& s);
double lie_poisson_bracket(const Function& f, const Function& g, const HeavyTopState& s, double h = 1e-3);

/// Hamiltonian vector field read off the bracket: xdot_i = {x_i, h}.
Tangent bracket_vector_field(const Function& h, const HeavyTopState& s, double step = 1e-3);

/// Flat layout (Pi, Gamma).
Eigen::VectorXd pack(const HeavyTopState& s);
HeavyTopState unpack(const Eigen::VectorXd& y);

Rhs reduced_flow(const Params& p);

/// Full flow on (R row-major 9, Pi 3, Gamma 3). Gamma is carried as its own
/// variable so R^T k = Gamma can be checked along the run.
Rhs full_flow(const Params& p);
Eigen::VectorXd pack_full(const Rotation& r, const HeavyTopState& s);
Rotation attitude_of(const Eigen::VectorXd& y);
HeavyTopState reduced_of(const Eigen::VectorXd& y);

// ---------------------------------------------------------------------------
// Lagrange top (I1 = I2, chi = e3).

/// Steady precession at tilt theta with axial momentum Pi3: the slow root of
/// I1 cos(theta) phidot^2 - Pi3 phidot + M g l = 0, spin rate
/// psidot = Pi3 / I3 - phidot cos(theta). Throws NoPrecessionRoot if the
/// quadratic has no real root or theta = 0.
struct Precession {
  double tilt = 0.0;
  double axial_momentum = 0.0;  ///< Pi3
  double precession_rate = 0.0; ///< phidot
  double spin_rate = 0.0;       ///< psidot
};
Precession steady_precession(const Params& p, double tilt, double axial_momentum);

/// Initial state with Gamma = (sin theta, 0, cos theta) and body angular
/// velocity psidot e3 + phidot0 Gamma.
HeavyTopState lagrange_state(const Params& p, double tilt, double axial_momentum, double precession_rate);

struct LagrangeOrbit {
  HeavyTopState start;
  double period = 0.0;          ///< reduced period
  double precession_rate = 0.0; ///< initial phidot
  double axial_momentum = 0.0;
  double nutation = 0.0;
  bool steady = true;
};

/// Periodic Lagrange-top initial condition. nutation = 0 gives steady
/// precession (T = 2 pi / |psidot|). nutation = eps != 0 starts at a turning
/// point with phidot0 = (1 + eps) phidot_steady and adjusts Pi3 (starting
/// from spin_rate * I3) until the body azimuth of Gamma advances by a whole
/// number of turns per nutation period; the period is then found by
/// detect_period. Throws InvalidArgument unless the top is a Lagrange top.
LagrangeOrbit lagrange_periodic_ic(const Params& p, double tilt, double spin_rate,
                                   double nutation = 0.0, double return_tol = 1e-6);

/// Reduced orbit sampled uniformly over one period (first and last samples coincide).
struct PeriodicOrbit {
  std::vector<HeavyTopState> states;
  double period = 0.0;
  double dt = 0.0;
};

PeriodicOrbit sample_orbit(const HeavyTopState& start, double period, const Params& p,
                           std::size_t samples = 20000);

/// Angle phi with R(T) R(0)^{-1} = exp(phi k). Throws AxisNotFixed.
double direct_phase(const Trajectory& full, double tol = 1e-6);

/// Largest |Gamma - R^T k| over a full trajectory.
double frame_residual(const Trajectory& full);

/// Phase decompositions about the vertical (mu = Pi . Gamma):
///   mechanical_holonomy  chi_mech + mu int ds / (Gamma . I Gamma)
///   canonical_one_form   chi_canon + (2 h T - 2 M g l int Gamma . chi ds) / mu
///   amended_potential    dynamic 2 (h - <V_mu>) T / mu only (diagnostic)
///   printed_second_line  cap integral of (2|I Gamma|^2 - (Gamma.I Gamma) tr I)/(Gamma.I Gamma)^2
///                        plus int ds / (Gamma . I Gamma) (diagnostic)
/// The direct phase comes from the unreduced flow on the orbit's grid, with
/// the attitude starting at the minimal rotation taking Gamma(0) to k.
/// Throws ZeroMomentum if |mu| < 1e-10 and NotClosed if the orbit does not close.
PhaseReport phase_report(const PeriodicOrbit& orbit, const Params& p);

}  // namespace cotred::heavytop
