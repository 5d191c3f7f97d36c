#include "cotred/mechsys.hpp"

#include <cmath>
#include <sstream>

namespace cotred {

namespace {

constexpr double kLiftTolerance = 1e-7;
constexpr std::size_t kReorthonormalizeEvery = 100;

std::string fmt_residual(const char* what, double value, double t) {
  std::ostringstream os;
  os << what << " residual " << value << " at t = " << t;
  return os.str();
}

}  // namespace

Vec3 body_velocity(const Rotation& r, const Mat3& rdot) {
  const Mat3 m = r.matrix().transpose() * rdot;
  const double asym = (m + m.transpose()).norm();
  if (!(asym < 1e-9)) {
    std::ostringstream os;
    os << "R^T Rdot is not skew (||M + M^T|| = " << asym << ")";
    throw Error(ErrorCode::NotTangent, os.str());
  }
  return Vec3(0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1)));
}

double kinetic_inner(const Rotation& r, const Mat3& v, const Mat3& w, const InertiaTensor& inertia) {
  return body_velocity(r, v).dot(inertia.apply(body_velocity(r, w)));
}

SpatialMomentum momentum_of_velocity(const Rotation& r, const Mat3& rdot,
                                     const InertiaTensor& inertia) {
  return to_spatial(r, BodyMomentum(inertia.apply(body_velocity(r, rdot))));
}

Mat3 locked_inertia(const Rotation& r, const InertiaTensor& inertia) {
  return r.matrix() * inertia.matrix() * r.matrix().transpose();
}

Vec3 mechanical_connection(const Rotation& r, const Mat3& rdot, const InertiaTensor& inertia) {
  const SpatialMomentum j = momentum_of_velocity(r, rdot, inertia);
  return locked_inertia(r, inertia).ldlt().solve(j.value);
}

BodyMomentum alpha_mu(const Rotation& r, const SpatialMomentum& mu, const InertiaTensor& inertia) {
  // <alpha, R hat(Omega)> = mu . I(R)^{-1} R diag(I) Omega for every Omega.
  const Vec3 locked_inv_mu = locked_inertia(r, inertia).ldlt().solve(mu.value);
  return BodyMomentum(inertia.apply(r.matrix().transpose() * locked_inv_mu));
}

double amended_potential(const Rotation& r, const SpatialMomentum& mu, const InertiaTensor& inertia,
                         const Potential& potential) {
  const Vec3 locked_inv_mu = locked_inertia(r, inertia).ldlt().solve(mu.value);
  const double v = potential ? potential(r) : 0.0;
  return v + 0.5 * mu.value.dot(locked_inv_mu);
}

double generator_norm_squared(const Rotation& r, const Vec3& zeta, const InertiaTensor& inertia) {
  const Mat3 zq = generator(r, zeta.normalized());
  return kinetic_inner(r, zq, zq, inertia);
}

double circle_mechanical_connection(const Rotation& r, const Mat3& rdot, const Vec3& zeta,
                                    const InertiaTensor& inertia) {
  const Mat3 zq = generator(r, zeta.normalized());
  return kinetic_inner(r, rdot, zq, inertia) / kinetic_inner(r, zq, zq, inertia);
}

double circle_amended_potential(const Rotation& r, double mu_zeta, const Vec3& zeta,
                                const InertiaTensor& inertia, const Potential& potential) {
  const double v = potential ? potential(r) : 0.0;
  return v + 0.5 * mu_zeta * mu_zeta / generator_norm_squared(r, zeta, inertia);
}

BodyMomentum circle_alpha_mu(const Rotation& r, double mu_zeta, const Vec3& zeta,
                             const InertiaTensor& inertia) {
  const Mat3 zq = generator(r, zeta.normalized());
  const Vec3 zq_body = body_velocity(r, zq);
  return BodyMomentum(mu_zeta * inertia.apply(zq_body) / kinetic_inner(r, zq, zq, inertia));
}

double xi_step2(const Rotation& q_h, double mu_zeta, const Vec3& zeta, const InertiaTensor& inertia) {
  const double norm2 = generator_norm_squared(q_h, zeta, inertia);
  if (!(norm2 >= 1e-14)) {
    throw Error(ErrorCode::DegenerateGenerator, "||zeta_Q(q_h)||^2 below 1e-14");
  }
  return mu_zeta / norm2;
}

std::vector<Rotation> solve_group_ode(std::span<const double> a_samples, const Vec3& zeta,
                                      double dt) {
  const Vec3 axis = zeta.normalized();
  const std::vector<double> angle = cumulative_quadrature(a_samples, dt);
  std::vector<Rotation> out;
  out.reserve(angle.size());
  for (double theta : angle) out.push_back(exp_so3(theta * axis));
  return out;
}

std::vector<Rotation> constant_xi_path(const Vec3& xi, std::span<const double> times) {
  std::vector<Rotation> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(exp_so3(t * xi));
  return out;
}

std::vector<double> proportional_xi_exponent(std::span<const double> alpha_samples, double dt) {
  // f(t) = exp(-P(t)) int_0^t exp(P(s)) ds with P the running integral of alpha.
  const std::vector<double> p = cumulative_quadrature(alpha_samples, dt);
  std::vector<double> ep(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) ep[k] = std::exp(p[k]);
  const std::vector<double> inner = cumulative_quadrature(ep, dt);
  std::vector<double> f(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) f[k] = std::exp(-p[k]) * inner[k];
  return f;
}

std::vector<Rotation> proportional_xi_path(std::span<const Vec3> xi_samples,
                                           std::span<const double> alpha_samples, double dt) {
  if (xi_samples.size() != alpha_samples.size()) {
    throw Error(ErrorCode::InvalidArgument, "xi and alpha sample counts differ");
  }
  const std::vector<double> f = proportional_xi_exponent(alpha_samples, dt);
  std::vector<Rotation> out;
  out.reserve(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out.push_back(exp_so3(f[k] * xi_samples[k]));
  return out;
}

HorizontalLift horizontal_lift(std::span<const Vec3> base, double dt, const Rotation& q0,
                               const Vec3& zeta_in, const InertiaTensor& inertia,
                               ConnectionChoice connection, std::span<const Vec3> body_momentum) {
  const Vec3 zeta = zeta_in.normalized();
  const std::size_t n = base.size();
  if (n < 3) throw Error(ErrorCode::TooFewSamples, "horizontal lift needs at least 3 samples");
  if (connection == ConnectionChoice::CanonicalOneForm && body_momentum.size() != n) {
    throw Error(ErrorCode::InvalidArgument,
                "canonical one-form lift needs one body momentum sample per base sample");
  }
  const double mismatch = (q0.inverse() * zeta - base[0]).norm();
  if (!(mismatch < 1e-9)) {
    std::ostringstream os;
    os << "q0 projects " << mismatch << " away from the base curve start";
    throw Error(ErrorCode::ProjectionMismatch, os.str());
  }

  // Horizontal body velocity at time t: w = udot x u + lambda u with lambda
  // fixing the horizontal condition w . m = 0.
  auto velocity = [&](double t) -> std::pair<Vec3, Vec3> {
    const auto pt = interpolate_uniform<Vec3>(base, dt, t);
    const Vec3 u = pt.value.normalized();
    const Vec3 perp = pt.derivative.cross(u);
    const Vec3 m = (connection == ConnectionChoice::Mechanical)
                       ? inertia.apply(u)
                       : interpolate_uniform<Vec3>(body_momentum, dt, t).value;
    const double lambda = -perp.dot(m) / u.dot(m);
    return {perp + lambda * u, m};
  };
  auto horizontality = [&](const Rotation& r, const Vec3& w, const Vec3& m) {
    const Vec3 u = r.inverse() * zeta;
    if (connection == ConnectionChoice::Mechanical) {
      const Vec3 iu = inertia.apply(u);
      return std::abs(w.dot(iu) / u.dot(iu));
    }
    return std::abs(w.dot(m) / u.dot(m));
  };

  HorizontalLift out;
  out.attitude.reserve(n);
  out.body_velocity.reserve(n);
  Mat3 r = q0.matrix();
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Rotation rk = Rotation::unchecked(r);
    const auto [w, m] = velocity(t);
    out.attitude.push_back(rk);
    out.body_velocity.push_back(w);

    const double proj = (rk.inverse() * zeta - base[k]).norm();
    const double horiz = horizontality(rk, w, m);
    out.max_projection_residual = std::max(out.max_projection_residual, proj);
    out.max_horizontality_residual = std::max(out.max_horizontality_residual, horiz);
    if (proj > 10.0 * kLiftTolerance) {
      throw Error(ErrorCode::DriftExceeded, fmt_residual("projection", proj, t));
    }
    if (horiz > 10.0 * kLiftTolerance) {
      throw Error(ErrorCode::DriftExceeded, fmt_residual("horizontality", horiz, t));
    }
    if (k + 1 == n) break;

    auto f = [&](double tt, const Mat3& rr) { return Mat3(rr * hat(velocity(tt).first)); };
    const Mat3 k1 = f(t, r);
    const Mat3 k2 = f(t + 0.5 * dt, r + 0.5 * dt * k1);
    const Mat3 k3 = f(t + 0.5 * dt, r + 0.5 * dt * k2);
    const Mat3 k4 = f(t + dt, r + dt * k3);
    r += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if ((k + 1) % kReorthonormalizeEvery == 0) r = Rotation::unchecked(r).orthonormalized().matrix();
  }
  return out;
}

double lift_holonomy(const HorizontalLift& lift, const Vec3& zeta, double tol) {
  const Rotation loop = lift.attitude.back() * lift.attitude.front().inverse();
  return angle_about_axis(loop, zeta.normalized(), tol);
}

ReconstructionProblem make_rigid_body_problem(std::span<const Vec3> body_momentum, double dt,
                                              const Rotation& q0, const InertiaTensor& inertia,
                                              ConnectionChoice connection) {
  if (body_momentum.empty()) throw Error(ErrorCode::InvalidProblem, "empty reduced trajectory");
  ReconstructionProblem p;
  p.system = SystemKind::RigidBody;
  const Vec3 mu = q0 * body_momentum.front();
  if (mu.norm() < 1e-12) throw Error(ErrorCode::InvalidProblem, "zero angular momentum");
  p.zeta = mu.normalized();
  p.mu_zeta = mu.norm();
  p.body_momentum.assign(body_momentum.begin(), body_momentum.end());
  p.shape.reserve(body_momentum.size());
  for (const Vec3& pi : body_momentum) p.shape.push_back(pi.normalized());
  p.dt = dt;
  p.q0 = q0;
  p.inertia = inertia;
  p.connection = connection;
  return p;
}

ReconstructionProblem make_heavy_top_problem(std::span<const Vec3> body_momentum,
                                             std::span<const Vec3> gamma, double dt,
                                             const Rotation& q0, const InertiaTensor& inertia,
                                             ConnectionChoice connection) {
  if (body_momentum.empty() || body_momentum.size() != gamma.size()) {
    throw Error(ErrorCode::InvalidProblem, "reduced trajectory components differ in length");
  }
  ReconstructionProblem p;
  p.system = SystemKind::HeavyTop;
  p.zeta = Vec3::UnitZ();
  p.mu_zeta = body_momentum.front().dot(gamma.front());
  p.body_momentum.assign(body_momentum.begin(), body_momentum.end());
  p.shape.assign(gamma.begin(), gamma.end());
  p.dt = dt;
  p.q0 = q0;
  p.inertia = inertia;
  p.connection = connection;
  return p;
}

Reconstruction reconstruct(const ReconstructionProblem& problem) {
  const std::size_t n = problem.shape.size();
  if (n < 3 || problem.body_momentum.size() != n) {
    throw Error(ErrorCode::InvalidProblem, "reduced trajectory needs >= 3 aligned samples");
  }
  const Vec3 zeta = problem.zeta.normalized();
  const double mu_zeta = problem.mu_zeta;
  const InertiaTensor& inertia = problem.inertia;

  auto momentum_error = [&](const Rotation& q, const Vec3& pi) {
    const Vec3 j = q * pi;
    if (problem.system == SystemKind::RigidBody) return (j - mu_zeta * zeta).norm();
    return std::abs(j.dot(zeta) - mu_zeta);
  };
  const double initial_error = momentum_error(problem.q0, problem.body_momentum.front());
  if (!(initial_error < 1e-9)) {
    std::ostringstream os;
    os << "initial point is " << initial_error << " away from J^{-1}(mu)";
    throw Error(ErrorCode::InvalidProblem, os.str());
  }
  if (std::abs(mu_zeta) < 1e-12) {
    throw Error(ErrorCode::InvalidProblem, "<mu, zeta> vanishes; isotropy is not a circle");
  }

  Reconstruction out;
  // Step 1.
  out.lift = horizontal_lift(problem.shape, problem.dt, problem.q0, zeta, inertia,
                             problem.connection, problem.body_momentum);
  // Step 2.
  out.xi.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (problem.connection == ConnectionChoice::Mechanical) {
      out.xi[k] = xi_step2(out.lift.attitude[k], mu_zeta, zeta, inertia);
    } else {
      const Vec3& pi = problem.body_momentum[k];
      out.xi[k] = pi.dot(inertia.solve(pi)) / mu_zeta;
    }
  }
  // Step 3.
  out.group_angle = cumulative_quadrature(out.xi, problem.dt);
  // Step 4, plus the Legendre transform of qdot = g (qdot_h + a zeta_Q(q_h)).
  out.attitude.reserve(n);
  out.body_momentum.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Rotation& qh = out.lift.attitude[k];
    const Rotation q = exp_so3(out.group_angle[k] * zeta) * qh;
    const Vec3 omega = out.lift.body_velocity[k] + out.xi[k] * (qh.inverse() * zeta);
    const Vec3 pi = inertia.apply(omega);
    out.attitude.push_back(q);
    out.body_momentum.push_back(pi);
    out.max_momentum_error = std::max(out.max_momentum_error, momentum_error(q, pi));
    out.max_projection_error =
        std::max(out.max_projection_error, (q.inverse() * zeta - problem.shape[k]).norm());
  }
  return out;
}

Mat3 lie_bracket(const VectorField& x, const VectorField& y, const Rotation& r, double eps) {
  auto directional = [&](const VectorField& field, const Mat3& along) {
    const Vec3 a = body_velocity(r, along);
    const Mat3 plus = field(r * exp_so3(eps * a));
    const Mat3 minus = field(r * exp_so3(-eps * a));
    return Mat3((plus - minus) / (2.0 * eps));
  };
  // Difference quotients leave an O(eps^2) normal component; drop it.
  const Mat3 raw = directional(y, x(r)) - directional(x, y(r));
  const Mat3 body = r.matrix().transpose() * raw;
  return Mat3(r.matrix() * (0.5 * (body - body.transpose())));
}

double circle_connection_differential(const VectorField& x, const VectorField& y, const Rotation& r,
                                      const Vec3& zeta, const InertiaTensor& inertia, double eps) {
  auto connection_of = [&](const VectorField& field) {
    return [&, field](const Rotation& q) {
      return circle_mechanical_connection(q, field(q), zeta, inertia);
    };
  };
  auto derivative = [&](const VectorField& along, const auto& f) {
    const Vec3 a = body_velocity(r, along(r));
    return (f(r * exp_so3(eps * a)) - f(r * exp_so3(-eps * a))) / (2.0 * eps);
  };
  const double xay = derivative(x, connection_of(y));
  const double yax = derivative(y, connection_of(x));
  const double abr = circle_mechanical_connection(r, lie_bracket(x, y, r, eps), zeta, inertia);
  return xay - yax - abr;
}

VectorField horizontal_part(const VectorField& x, const Vec3& zeta, const InertiaTensor& inertia) {
  const Vec3 z = zeta.normalized();
  return [x, z, inertia](const Rotation& r) {
    const Mat3 v = x(r);
    return Mat3(v - circle_mechanical_connection(r, v, z, inertia) * generator(r, z));
  };
}

double circle_curvature_density(const Vec3& u_in, const Vec3& zeta, const InertiaTensor& inertia,
                                double eps) {
  const Vec3 u = u_in.normalized();
  const Vec3 z = zeta.normalized();
  const Rotation r = Rotation::aligning(u, z);  // r^T z = u
  Vec3 seed = std::abs(u.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 t1 = (seed - seed.dot(u) * u).normalized();
  const Vec3 t2 = u.cross(t1);
  // Left-invariant fields R hat(t x u) project onto the tangent vectors t.
  const Vec3 a1 = t1.cross(u);
  const Vec3 a2 = t2.cross(u);
  const VectorField x1 = [a1](const Rotation& q) { return Mat3(q.matrix() * hat(a1)); };
  const VectorField x2 = [a2](const Rotation& q) { return Mat3(q.matrix() * hat(a2)); };
  return circle_connection_differential(x1, x2, r, z, inertia, eps);
}

}  // namespace cotred
