#include "cotred/kaluza.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace cotred::kaluza {

namespace {

Vec3 curl(const Mat3& j) { return {j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1)}; }

Mat3 central_jacobian(const MagneticField::VectorFn& f, const Vec3& q, double h) {
  Mat3 j;
  for (int c = 0; c < 3; ++c) {
    Vec3 e = Vec3::Zero();
    e(c) = h;
    j.col(c) = (f(q + e) - f(q - e)) / (2.0 * h);
  }
  return j;
}

}  // namespace

MagneticField MagneticField::uniform(const Vec3& b) {
  MagneticField f;
  f.name_ = "uniform";
  f.potential_ = [b](const Vec3& q) -> Vec3 { return 0.5 * b.cross(q); };
  f.jacobian_ = [b](const Vec3&) -> Mat3 { return 0.5 * hat(b); };
  f.field_ = [b](const Vec3&) -> Vec3 { return b; };
  f.uniform_ = true;
  return f;
}

MagneticField MagneticField::gradient(double b0, double g) {
  MagneticField f;
  f.name_ = "gradient";
  f.potential_ = [b0, g](const Vec3& q) -> Vec3 {
    return {0.0, b0 * (q.x() + 0.5 * g * q.x() * q.x()), 0.0};
  };
  f.jacobian_ = [b0, g](const Vec3& q) -> Mat3 {
    Mat3 j = Mat3::Zero();
    j(1, 0) = b0 * (1.0 + g * q.x());
    return j;
  };
  f.field_ = [b0, g](const Vec3& q) -> Vec3 { return {0.0, 0.0, b0 * (1.0 + g * q.x())}; };
  f.uniform_ = (g == 0.0);
  return f;
}

MagneticField MagneticField::abc(double a, double b, double c) {
  MagneticField f;
  f.name_ = "abc";
  auto pot = [a, b, c](const Vec3& q) -> Vec3 {
    const double x = q.x(), y = q.y(), z = q.z();
    return {a * std::sin(z) + c * std::cos(y), b * std::sin(x) + a * std::cos(z),
            c * std::sin(y) + b * std::cos(x)};
  };
  f.potential_ = pot;
  f.jacobian_ = [a, b, c](const Vec3& q) -> Mat3 {
    const double x = q.x(), y = q.y(), z = q.z();
    Mat3 j;
    j << 0.0, -c * std::sin(y), a * std::cos(z),
        b * std::cos(x), 0.0, -a * std::sin(z),
        -b * std::sin(x), c * std::cos(y), 0.0;
    return j;
  };
  f.field_ = pot;
  return f;
}

MagneticField MagneticField::custom(std::string name, VectorFn potential,
                                    std::optional<JacobianFn> jacobian,
                                    std::optional<VectorFn> field) {
  MagneticField f;
  f.name_ = std::move(name);
  f.potential_ = std::move(potential);
  f.jacobian_ = std::move(jacobian);
  f.field_ = std::move(field);
  return f;
}

MagneticField MagneticField::with_gauge(VectorFn grad_psi, JacobianFn hessian_psi) const {
  MagneticField f = *this;
  f.name_ = name_ + "+gauge";
  auto base = potential_;
  f.potential_ = [base, grad_psi](const Vec3& q) -> Vec3 { return base(q) + grad_psi(q); };
  if (jacobian_) {
    auto jac = *jacobian_;
    f.jacobian_ = [jac, hessian_psi](const Vec3& q) -> Mat3 { return jac(q) + hessian_psi(q); };
  } else {
    f.jacobian_.reset();
  }
  if (!f.field_) {
    const MagneticField original = *this;
    f.field_ = [original](const Vec3& q) { return original.field(q); };
  }
  return f;
}

MagneticField MagneticField::with_xy_gauge() const {
  return with_gauge([](const Vec3& q) -> Vec3 { return {q.y(), q.x(), 0.0}; },
                    [](const Vec3&) -> Mat3 {
                      Mat3 h = Mat3::Zero();
                      h(0, 1) = h(1, 0) = 1.0;
                      return h;
                    });
}

Mat3 MagneticField::jacobian(const Vec3& q) const {
  if (jacobian_) return (*jacobian_)(q);
  return central_jacobian(potential_, q, 1e-5);
}

Vec3 MagneticField::field(const Vec3& q) const { return curl(jacobian(q)); }

Vec3 MagneticField::reference_field(const Vec3& q) const {
  return field_ ? (*field_)(q) : field(q);
}

double MagneticField::divergence(const Vec3& q, double h) const {
  double div = 0.0;
  for (int c = 0; c < 3; ++c) {
    Vec3 e = Vec3::Zero();
    e(c) = h;
    div += (field(q + e)(c) - field(q - e)(c)) / (2.0 * h);
  }
  return div;
}

ParticleTangent lorentz_rhs(const ParticleState& s, const MagneticField& b, double e, double m) {
  const Vec3 v = s.p / m;
  return {v, e * v.cross(b.field(s.q))};
}

Mat6 magnetic_symplectic_matrix(const Vec3& b, double e) {
  Mat6 w = Mat6::Zero();
  for (int i = 0; i < 3; ++i) {
    w(i, 3 + i) = 1.0;
    w(3 + i, i) = -1.0;
  }
  // -e (Bx dy^dz + By dz^dx + Bz dx^dy)
  w(1, 2) -= e * b.x();
  w(2, 1) += e * b.x();
  w(2, 0) -= e * b.y();
  w(0, 2) += e * b.y();
  w(0, 1) -= e * b.z();
  w(1, 0) += e * b.z();
  return w;
}

ParticleTangent vfield_answer1(const ParticleState& s, const MagneticField& b, double e, double m) {
  const Mat6 w = magnetic_symplectic_matrix(b.field(s.q), e);
  Vec6 dh = Vec6::Zero();
  dh.tail<3>() = s.p / m;
  const Vec6 x = w.transpose().partialPivLu().solve(dh);
  return {x.head<3>(), x.tail<3>()};
}

double answer1_symplectic_residual(const ParticleState& s, const MagneticField& b, double e,
                                   double m, const std::vector<Vec6>& directions, double h) {
  const Mat6 w = magnetic_symplectic_matrix(b.field(s.q), e);
  const ParticleTangent t = vfield_answer1(s, b, e, m);
  Vec6 x;
  x << t.q_rate, t.p_rate;
  auto energy = [m](const Vec6& y) { return 0.5 * y.tail<3>().squaredNorm() / m; };
  Vec6 y;
  y << s.q, s.p;
  double worst = 0.0;
  for (const Vec6& v : directions) {
    const double dh = (energy(y + h * v) - energy(y - h * v)) / (2.0 * h);
    worst = std::max(worst, std::abs(x.dot(w * v) - dh));
  }
  return worst;
}

ParticleTangent vfield_answer2(const ParticleState& s, const MagneticField& b, double e, double m) {
  const Vec3 v = (s.p - e * b.potential(s.q)) / m;
  return {v, e * b.jacobian(s.q).transpose() * v};
}

double minimal_coupling_hamiltonian(const ParticleState& s, const MagneticField& b, double e,
                                    double m) {
  return 0.5 * (s.p - e * b.potential(s.q)).squaredNorm() / m;
}

double kk_hamiltonian(const KKState& s, const MagneticField& b, double m) {
  return 0.5 * (s.p - s.p_theta * b.potential(s.q)).squaredNorm() / m + 0.5 * s.p_theta * s.p_theta;
}

KKTangent kk_geodesic_rhs(const KKState& s, const MagneticField& b, double m) {
  const Vec3 a = b.potential(s.q);
  const Vec3 v = (s.p - s.p_theta * a) / m;
  KKTangent t;
  t.q_rate = v;
  t.theta_rate = s.p_theta - a.dot(v);
  t.p_rate = s.p_theta * b.jacobian(s.q).transpose() * v;
  t.p_theta_rate = 0.0;
  return t;
}

namespace {

ParticleState particle_of(const State& y) { return {y.segment<3>(0), y.segment<3>(3)}; }

State flat(const ParticleTangent& t) {
  State out(6);
  out << t.q_rate, t.p_rate;
  return out;
}

}  // namespace

Rhs lorentz_flow(const MagneticField& b, double e, double m) {
  return [b, e, m](double, const State& y) { return flat(lorentz_rhs(particle_of(y), b, e, m)); };
}

Rhs answer1_flow(const MagneticField& b, double e, double m) {
  return [b, e, m](double, const State& y) { return flat(vfield_answer1(particle_of(y), b, e, m)); };
}

Rhs answer2_flow(const MagneticField& b, double e, double m) {
  return [b, e, m](double, const State& y) { return flat(vfield_answer2(particle_of(y), b, e, m)); };
}

Rhs kk_flow(const MagneticField& b, double m) {
  return [b, m](double, const State& y) -> State {
    const KKState s{y.segment<3>(0), y(3), y.segment<3>(4), y(7)};
    const KKTangent t = kk_geodesic_rhs(s, b, m);
    State out(8);
    out << t.q_rate, t.theta_rate, t.p_rate, t.p_theta_rate;
    return out;
  };
}

double magnetic_two_form_residual(const MagneticField& b, double mu,
                                  const std::vector<Vec3>& points, double h) {
  // alpha_mu components on (x, y, z, theta); the theta component is the constant mu.
  auto alpha = [&](const Eigen::Vector4d& x) -> Eigen::Vector4d {
    Eigen::Vector4d a;
    a << mu * b.potential(x.head<3>()), mu;
    return a;
  };
  double worst = 0.0;
  for (const Vec3& q : points) {
    Eigen::Vector4d x;
    x << q, 0.3;
    Eigen::Matrix4d d;  // d(i, j) = d_i alpha_j
    for (int i = 0; i < 4; ++i) {
      Eigen::Vector4d e = Eigen::Vector4d::Zero();
      e(i) = h;
      d.row(i) = ((alpha(x + e) - alpha(x - e)) / (2.0 * h)).transpose();
    }
    const Eigen::Matrix4d two_form = d - d.transpose();  // (d alpha)_{ij}
    const Vec3 ref = mu * b.reference_field(q);
    Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
    expected(1, 2) = ref.x();
    expected(2, 1) = -ref.x();
    expected(2, 0) = ref.y();
    expected(0, 2) = -ref.y();
    expected(0, 1) = ref.z();
    expected(1, 0) = -ref.z();
    worst = std::max(worst, (two_form - expected).cwiseAbs().maxCoeff());
  }
  return worst;
}

Comparison compare(const MagneticField& b, const ComparisonConfig& cfg) {
  if (!(cfg.mass > 0.0)) throw Error(ErrorCode::InvalidArgument, "particle mass must be positive");
  if (!(cfg.periods > 0.0) || cfg.steps_per_period == 0) {
    throw Error(ErrorCode::InvalidArgument, "need a positive duration and step count");
  }
  const double m = cfg.mass;
  const double e = cfg.charge;
  const Vec3 b0 = b.field(cfg.q0);
  const double omega = std::abs(e) * b0.norm() / m;

  Comparison out;
  out.cyclotron_period = omega > 0.0 ? kTwoPi / omega : 1.0;
  out.dt = out.cyclotron_period / static_cast<double>(cfg.steps_per_period);
  out.duration = cfg.periods * out.cyclotron_period;
  const double t1 = out.duration;
  const double dt = out.dt;

  State y0(6);
  y0 << cfg.q0, m * cfg.v0;
  out.lorentz = rk4_integrate(lorentz_flow(b, e, m), y0, 0.0, t1, dt);
  out.lorentz.labels = {"qx", "qy", "qz", "px", "py", "pz"};
  const State lorentz_end = out.lorentz.back();

  const State a1_end = rk4_integrate(answer1_flow(b, e, m), y0, 0.0, t1, dt).back();
  out.answer1_vs_lorentz = (a1_end - lorentz_end).norm();

  auto shifted = [&](const MagneticField& field) {
    State y(6);
    y << cfg.q0, m * cfg.v0 + e * field.potential(cfg.q0);
    State end = rk4_integrate(answer2_flow(field, e, m), y, 0.0, t1, dt).back();
    end.tail<3>() -= e * field.potential(end.head<3>());
    return end;
  };
  const State a2_end = shifted(b);
  out.answer1_vs_answer2 = (a2_end - a1_end).norm();
  const State gauge_end = shifted(b.with_xy_gauge());
  out.gauge_position_gap = (gauge_end.head<3>() - a2_end.head<3>()).norm();

  State k0(8);
  k0 << cfg.q0, 0.0, m * cfg.v0 + e * b.potential(cfg.q0), e;
  const Trajectory kk = rk4_integrate(kk_flow(b, m), k0, 0.0, t1, dt);
  const State& kk_end = kk.back();
  State projected(6);
  projected << kk_end.segment<3>(0), kk_end.segment<3>(4) - kk_end(7) * b.potential(kk_end.head<3>());
  out.kk_vs_lorentz = (projected - lorentz_end).norm();
  out.charge_drift = std::abs(kk_end(7) - e);
  for (const State& y : kk.states) {
    const KKState s{y.segment<3>(0), y(3), y.segment<3>(4), y(7)};
    const double kinetic = 0.5 * (s.p - e * b.potential(s.q)).squaredNorm() / m;
    out.kk_energy_offset_error =
        std::max(out.kk_energy_offset_error, std::abs(kk_hamiltonian(s, b, m) - kinetic - 0.5 * e * e));
  }

  const Vec3 straight = cfg.q0 + cfg.v0 * t1;
  out.free_flight_gap = (lorentz_end.head<3>() - straight).norm() +
                        (lorentz_end.tail<3>() - m * cfg.v0).norm();

  const double p0 = m * cfg.v0.norm();
  for (const State& y : out.lorentz.states) {
    if (p0 > 0.0) out.speed_drift = std::max(out.speed_drift, std::abs(y.tail<3>().norm() - p0) / p0);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.cyclotron_radius = out.cyclotron_radius_expected = out.cyclotron_radius_error = nan;
  if (b.is_uniform() && omega > 0.0) {
    const Vec3 n = b0.normalized();
    const Vec3 v_perp = cfg.v0 - cfg.v0.dot(n) * n;
    out.cyclotron_radius_expected = m * v_perp.norm() / (std::abs(e) * b0.norm());
    // Circumradius of three positions a third of a period apart, projected
    // onto the plane normal to B.
    const std::size_t third = cfg.steps_per_period / 3;
    auto perp = [&](std::size_t k) {
      const Vec3 q = out.lorentz.states[k].head<3>();
      return Vec3(q - q.dot(n) * n);
    };
    const Vec3 a = perp(0), bb = perp(third), c = perp(2 * third);
    const double ab = (a - bb).norm(), bc = (bb - c).norm(), ca = (c - a).norm();
    const double twice_area = (bb - a).cross(c - a).norm();
    if (twice_area > 0.0) {
      out.cyclotron_radius = ab * bc * ca / (2.0 * twice_area);
      out.cyclotron_radius_error =
          std::abs(out.cyclotron_radius - out.cyclotron_radius_expected) / out.cyclotron_radius_expected;
    }
  }
  return out;
}

}  // namespace cotred::kaluza
