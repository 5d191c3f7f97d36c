#pragma once

// Charged particle in a static magnetic field. Three equivalent descriptions:
// the Lorentz force, kinetic energy with the magnetic symplectic form
// (Answer 1), minimal coupling with the canonical form (Answer 2), plus
// geodesics of the Kaluza-Klein metric on R^3 x S^1.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cotred/integrate.hpp"
#include "cotred/liegroup.hpp"

namespace cotred::kaluza {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

struct ParticleState {
  Vec3 q = Vec3::Zero();
  Vec3 p = Vec3::Zero();
};

struct ParticleTangent {
  Vec3 q_rate;
  Vec3 p_rate;
};

/// Magnetic field given by its vector potential A; B = curl A. Built-in
/// fields carry an analytic Jacobian of A and an analytic B for checks.
class MagneticField {
 public:
  using VectorFn = std::function<Vec3(const Vec3&)>;
  using JacobianFn = std::function<Mat3(const Vec3&)>;  ///< J(i, j) = dA_i / dq_j

  /// A = 1/2 B x q.
  static MagneticField uniform(const Vec3& b);
  /// A = (0, b0 (x + g x^2 / 2), 0), B = (0, 0, b0 (1 + g x)).
  static MagneticField gradient(double b0, double g);
  /// Arnold-Beltrami-Childress potential: curl A = A,
  /// A = (a sin z + c cos y, b sin x + a cos z, c sin y + b cos x).
  static MagneticField abc(double a, double b, double c);
  /// User potential; the Jacobian falls back to central differences and B,
  /// when absent, to the curl of that Jacobian.
  static MagneticField custom(std::string name, VectorFn potential,
                              std::optional<JacobianFn> jacobian = std::nullopt,
                              std::optional<VectorFn> field = std::nullopt);

  /// A + grad psi, given grad psi and its Hessian. B is unchanged.
  MagneticField with_gauge(VectorFn grad_psi, JacobianFn hessian_psi) const;
  /// Gauge psi = x y.
  MagneticField with_xy_gauge() const;

  Vec3 potential(const Vec3& q) const { return potential_(q); }
  Mat3 jacobian(const Vec3& q) const;
  /// B = curl A from the Jacobian.
  Vec3 field(const Vec3& q) const;
  /// Reference B (analytic for built-ins).
  Vec3 reference_field(const Vec3& q) const;
  /// div B by central differences of `field`.
  double divergence(const Vec3& q, double h = 1e-4) const;

  const std::string& name() const { return name_; }
  bool is_uniform() const { return uniform_; }

 private:
  std::string name_;
  VectorFn potential_;
  std::optional<JacobianFn> jacobian_;
  std::optional<VectorFn> field_;
  bool uniform_ = false;
};

/// qdot = p/m, pdot = e (p/m) x B(q).
ParticleTangent lorentz_rhs(const ParticleState& s, const MagneticField& b, double e, double m);

/// Matrix W of Omega_B = dq ^ dp - e (Bx dy^dz + By dz^dx + Bz dx^dy) in the
/// coordinates (q, p): Omega_B(u, v) = u^T W v.
Mat6 magnetic_symplectic_matrix(const Vec3& b, double e);

/// X_h from Omega_B(X_h, .) = dh with h = |p|^2 / 2m, by a 6x6 linear solve.
ParticleTangent vfield_answer1(const ParticleState& s, const MagneticField& b, double e, double m);

/// max over v in `directions` of |Omega_B(X_h, v) - dh(v)| with dh by central differences
/// (exact up to rounding for the quadratic energy, so h need not be small).
double answer1_symplectic_residual(const ParticleState& s, const MagneticField& b, double e,
                                   double m, const std::vector<Vec6>& directions,
                                   double h = 1e-3);

/// Canonical Hamilton equations of h_A = |p - eA|^2 / 2m.
ParticleTangent vfield_answer2(const ParticleState& s, const MagneticField& b, double e, double m);
double minimal_coupling_hamiltonian(const ParticleState& s, const MagneticField& b, double e,
                                    double m);

/// Point of T*(R^3 x S^1).
struct KKState {
  Vec3 q = Vec3::Zero();
  double theta = 0.0;
  Vec3 p = Vec3::Zero();
  double p_theta = 0.0;
};

struct KKTangent {
  Vec3 q_rate;
  double theta_rate = 0.0;
  Vec3 p_rate;
  double p_theta_rate = 0.0;
};

/// Kaluza-Klein kinetic Hamiltonian |p - p_theta A|^2 / 2m + p_theta^2 / 2,
/// the cometric of m|dq|^2 + (d theta + A . dq)^2.
double kk_hamiltonian(const KKState& s, const MagneticField& b, double m);
KKTangent kk_geodesic_rhs(const KKState& s, const MagneticField& b, double m);

/// Flows on flat state vectors: (q, p) and (q, theta, p, p_theta).
Rhs lorentz_flow(const MagneticField& b, double e, double m);
Rhs answer1_flow(const MagneticField& b, double e, double m);
Rhs answer2_flow(const MagneticField& b, double e, double m);
Rhs kk_flow(const MagneticField& b, double m);

/// Largest |d alpha_mu - mu B| over the samples, where
/// alpha_mu = mu (A . dq + d theta) is differentiated by central differences
/// on R^3 x S^1 and compared against the reference field.
double magnetic_two_form_residual(const MagneticField& b, double mu,
                                  const std::vector<Vec3>& points, double h = 1e-5);

struct ComparisonConfig {
  double mass = 1.0;
  double charge = 1.0;
  Vec3 q0 = Vec3::Zero();
  Vec3 v0 = Vec3(1.0, 0.0, 0.0);
  double periods = 10.0;
  std::size_t steps_per_period = 1000;
};

/// Endpoint comparisons between the descriptions. NaN marks items that do not
/// apply (no cyclotron radius for a nonuniform field).
struct Comparison {
  double cyclotron_period = 0.0;  ///< 2 pi m / (|e| |B(q0)|), or 1 if that vanishes
  double dt = 0.0;
  double duration = 0.0;
  double answer1_vs_lorentz = 0.0;  ///< |(q, p)| endpoint gap
  double answer1_vs_answer2 = 0.0;  ///< after the shift p -> p - e A(q)
  double kk_vs_lorentz = 0.0;       ///< projected (q, p - p_theta A) gap
  double gauge_position_gap = 0.0;  ///< Answer 2 under psi = x y vs. untouched
  double free_flight_gap = 0.0;     ///< Lorentz vs. straight line (meaningful at e = 0)
  double cyclotron_radius = 0.0;    ///< measured, NaN unless uniform
  double cyclotron_radius_expected = 0.0;
  double cyclotron_radius_error = 0.0;  ///< relative
  double speed_drift = 0.0;         ///< max | |p| - |p0| | / |p0| along the Lorentz run
  double charge_drift = 0.0;        ///< |p_theta(T) - p_theta(0)|
  double kk_energy_offset_error = 0.0;  ///< |(h_KK - |p - eA|^2/2m) - e^2/2|
  Trajectory lorentz;
};

Comparison compare(const MagneticField& b, const ComparisonConfig& config);

}  // namespace cotred::kaluza
