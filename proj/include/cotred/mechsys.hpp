#pragma once

// Reduction layer for simple mechanical systems on Q = SO(3) with a
// left-invariant kinetic metric: locked inertia, momentum map, mechanical
// connection, amended potential, and the four-step reconstruction engine
// specialised to a circle isotropy group G_mu = exp(R zeta).
//
// Conventions. A tangent vector at R is Rdot = R hat(Omega) with body angular
// velocity Omega; the kinetic metric is <<Rdot1, Rdot2>> = Omega1 . I Omega2.
// SO(3) acts by left multiplication, xi_Q(R) = hat(xi) R, and the momentum map
// of the lifted action is the spatial angular momentum R I Omega.
// The shape map for the circle action about the spatial unit vector zeta is
// R -> R^T zeta in S^2.

#include <functional>
#include <span>
#include <vector>

#include "cotred/integrate.hpp"
#include "cotred/liegroup.hpp"

namespace cotred {

// ---------------------------------------------------------------------------
// Full SO(3) symmetry.

/// Body angular velocity of a tangent vector; throws NotTangent unless
/// R^T Rdot is skew within 1e-9.
Vec3 body_velocity(const Rotation& r, const Mat3& rdot);

/// Infinitesimal generator xi_Q(R) = hat(xi) R.
inline Mat3 generator(const Rotation& r, const Vec3& xi) { return hat(xi) * r.matrix(); }

/// Kinetic inner product of two tangent vectors at R.
double kinetic_inner(const Rotation& r, const Mat3& v, const Mat3& w, const InertiaTensor& inertia);

/// Momentum map of the lifted left action evaluated on the Legendre transform
/// of a tangent vector (spatial angular momentum).
SpatialMomentum momentum_of_velocity(const Rotation& r, const Mat3& rdot,
                                     const InertiaTensor& inertia);

/// Locked inertia tensor I(R) = R diag(I) R^T (spatial frame).
Mat3 locked_inertia(const Rotation& r, const InertiaTensor& inertia);

/// A(R)(Rdot) = I(R)^{-1} J(Rdot^flat).
Vec3 mechanical_connection(const Rotation& r, const Mat3& rdot, const InertiaTensor& inertia);

/// alpha_mu(R) = A(R)^* mu, returned as the body momentum of the covector.
BodyMomentum alpha_mu(const Rotation& r, const SpatialMomentum& mu, const InertiaTensor& inertia);

/// Kinetic energy of a covector with body momentum pi.
inline double kinetic_energy(const BodyMomentum& pi, const InertiaTensor& inertia) {
  return 0.5 * pi.value.dot(inertia.solve(pi.value));
}

using Potential = std::function<double(const Rotation&)>;

/// V_mu(R) = V(R) + 1/2 <mu, I(R)^{-1} mu>.
double amended_potential(const Rotation& r, const SpatialMomentum& mu, const InertiaTensor& inertia,
                         const Potential& potential);

// ---------------------------------------------------------------------------
// Circle symmetry about a fixed spatial unit vector zeta.

/// ||zeta_Q(R)||^2, evaluated from the generator through the kinetic metric.
double generator_norm_squared(const Rotation& r, const Vec3& zeta, const InertiaTensor& inertia);

/// Mechanical connection of the circle action (scalar): <<v, zeta_Q>> / ||zeta_Q||^2.
double circle_mechanical_connection(const Rotation& r, const Mat3& rdot, const Vec3& zeta,
                                    const InertiaTensor& inertia);

/// Circle amended potential V(R) + mu_zeta^2 / (2 ||zeta_Q(R)||^2).
double circle_amended_potential(const Rotation& r, double mu_zeta, const Vec3& zeta,
                                const InertiaTensor& inertia, const Potential& potential);

/// Covector (body momentum) at R minimising kinetic energy on the fibre
/// {pi : <J(pi), zeta> = mu_zeta}.
BodyMomentum circle_alpha_mu(const Rotation& r, double mu_zeta, const Vec3& zeta,
                             const InertiaTensor& inertia);

/// Step 2 for G_mu = S^1: a = <mu, zeta> / ||zeta_Q(q_h)||^2 so that
/// xi = a zeta. Throws DegenerateGenerator if ||zeta_Q||^2 < 1e-14.
double xi_step2(const Rotation& q_h, double mu_zeta, const Vec3& zeta, const InertiaTensor& inertia);
inline double xi_step2(const Rotation& q_h, const SpatialMomentum& mu, const Vec3& zeta,
                       const InertiaTensor& inertia) {
  return xi_step2(q_h, mu.value.dot(zeta.normalized()), zeta, inertia);
}

/// Step 3 for abelian G_mu: g_k = exp((int_0^{t_k} a ds) zeta).
std::vector<Rotation> solve_group_ode(std::span<const double> a_samples, const Vec3& zeta, double dt);

/// Constant xi (compact case): g(t) = exp(t xi).
std::vector<Rotation> constant_xi_path(const Vec3& xi, std::span<const double> times);

/// xi(t) with xi'(t) = alpha(t) xi(t): g(t) = exp(f(t) xi(t)) with
/// f(t) = int_0^t exp(int_t^s alpha(r) dr) ds. `xi_samples` and
/// `alpha_samples` are uniformly spaced by dt.
std::vector<Rotation> proportional_xi_path(std::span<const Vec3> xi_samples,
                                           std::span<const double> alpha_samples, double dt);
/// The scalar f(t_k) of the proportional case.
std::vector<double> proportional_xi_exponent(std::span<const double> alpha_samples, double dt);

// ---------------------------------------------------------------------------
// Horizontal lift over S^2 and reconstruction.

enum class ConnectionChoice {
  Mechanical,       ///< horizontal = kinetic-metric orthogonal to zeta_Q
  CanonicalOneForm  ///< horizontal = annihilated by the canonical one-form (Pi . Omega = 0)
};

struct HorizontalLift {
  std::vector<Rotation> attitude;      ///< q_h(t_k)
  std::vector<Vec3> body_velocity;     ///< horizontal Omega_h(t_k)
  double max_projection_residual = 0;  ///< max ||q_h^T zeta - u||
  double max_horizontality_residual = 0;
};

/// Lift of a uniformly sampled curve u(t) on S^2 (u = q^T zeta) through q0,
/// integrating the horizontal body velocity that reproduces the curve's
/// velocity (derivatives from local finite-difference stencils of the
/// samples). For CanonicalOneForm the body momentum samples define the
/// horizontal condition and must be supplied.
/// Throws ProjectionMismatch if q0^T zeta != u(0) within 1e-9 and
/// DriftExceeded if a residual exceeds 1e-6 along the curve.
HorizontalLift horizontal_lift(std::span<const Vec3> base, double dt, const Rotation& q0,
                               const Vec3& zeta, const InertiaTensor& inertia,
                               ConnectionChoice connection = ConnectionChoice::Mechanical,
                               std::span<const Vec3> body_momentum = {});

enum class SystemKind { RigidBody, HeavyTop };

struct ReconstructionProblem {
  SystemKind system = SystemKind::RigidBody;
  Vec3 zeta = Vec3::UnitZ();          ///< generator of g_mu (unit, spatial)
  double mu_zeta = 0.0;               ///< <mu, zeta>
  std::vector<Vec3> body_momentum;    ///< reduced curve: Pi(t_k)
  std::vector<Vec3> shape;            ///< base curve: q(t_k)^T zeta
  double dt = 0.0;
  Rotation q0;
  InertiaTensor inertia{1.0, 1.0, 1.0};
  ConnectionChoice connection = ConnectionChoice::Mechanical;
};

/// Rigid body: zeta = mu/|mu|, shape = Pi/|mu|.
ReconstructionProblem make_rigid_body_problem(std::span<const Vec3> body_momentum, double dt,
                                              const Rotation& q0, const InertiaTensor& inertia,
                                              ConnectionChoice connection = ConnectionChoice::Mechanical);
/// Heavy top: zeta = k (vertical), shape = Gamma, mu = Pi . Gamma.
ReconstructionProblem make_heavy_top_problem(std::span<const Vec3> body_momentum,
                                             std::span<const Vec3> gamma, double dt,
                                             const Rotation& q0, const InertiaTensor& inertia,
                                             ConnectionChoice connection = ConnectionChoice::Mechanical);

struct Reconstruction {
  HorizontalLift lift;
  std::vector<double> xi;               ///< a(t_k), xi = a zeta
  std::vector<double> group_angle;      ///< int_0^{t_k} a ds
  std::vector<Rotation> attitude;       ///< q(t_k) = g(t_k) q_h(t_k)
  std::vector<Vec3> body_momentum;      ///< Legendre transform of qdot
  double max_momentum_error = 0;        ///< max |J - mu| along the curve
  double max_projection_error = 0;      ///< max ||q^T zeta - shape||
};

/// Steps 1-4. Throws InvalidProblem if q0 is not in J^{-1}(mu) within 1e-9.
Reconstruction reconstruct(const ReconstructionProblem& problem);

/// Holonomy of the lift: angle chi with q_h(T) = exp(chi zeta) q_h(0).
double lift_holonomy(const HorizontalLift& lift, const Vec3& zeta, double tol = 1e-6);

// ---------------------------------------------------------------------------
// Curvature of the circle mechanical connection.

/// A tangent vector field on SO(3), returned as Rdot.
using VectorField = std::function<Mat3(const Rotation&)>;

/// Lie bracket [X, Y](R) by central differences along curves R exp(eps a).
Mat3 lie_bracket(const VectorField& x, const VectorField& y, const Rotation& r, double eps = 1e-5);

/// dA(X, Y) = X(A(Y)) - Y(A(X)) - A([X, Y]) for the circle mechanical connection.
double circle_connection_differential(const VectorField& x, const VectorField& y, const Rotation& r,
                                      const Vec3& zeta, const InertiaTensor& inertia,
                                      double eps = 1e-5);

/// Horizontal part of a vector field.
VectorField horizontal_part(const VectorField& x, const Vec3& zeta, const InertiaTensor& inertia);

/// Curvature two-form of the circle mechanical connection pushed down to
/// S^2, as a density with respect to the outward area form at u.
double circle_curvature_density(const Vec3& u, const Vec3& zeta, const InertiaTensor& inertia,
                                double eps = 1e-5);

}  // namespace cotred
