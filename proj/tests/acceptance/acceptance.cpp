// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "cotred/batch.hpp"
#include "cotred/heavytop.hpp"
#include "cotred/integrate.hpp"
#include "cotred/kaluza.hpp"
#include "cotred/mechsys.hpp"
#include "cotred/rigidbody.hpp"
#include "cotred/spherical.hpp"

using namespace cotred;

namespace {

struct Measure {
  std::string what;
  double value;
  double bound;
  bool ok() const { return value < bound; }
};

struct Criterion {
  int id;
  std::string title;
  std::function<std::vector<Measure>()> run;
};

const InertiaTensor kBody(3.0, 2.0, 1.0);

// Orbits of the I = (3, 2, 1) body: three near e1, three near e3.
const std::vector<Vec3> kOrbitSeeds = {
    {2.0, 0.3, 0.1}, {2.0, 0.6, 0.4}, {1.5, 0.5, 0.6},
    {0.1, 0.3, 2.0}, {0.3, 0.2, 1.5}, {0.5, 0.4, 1.2},
};

const std::vector<PhaseSweepItem>& rigid_body_reports() {
  static const std::vector<PhaseSweepItem> items = [] {
    rigidbody::OrbitSearch search;
    search.samples_per_period = 20000;
    return rigid_body_phase_sweep(kOrbitSeeds, kBody, search, Execution::Parallel);
  }();
  return items;
}

double worst_method_residual(const std::string& name, std::vector<Measure>& extra) {
  double worst = 0.0;
  for (std::size_t i = 0; i < rigid_body_reports().size(); ++i) {
    const auto& item = rigid_body_reports()[i];
    if (!item.report) {
      extra.push_back({"orbit " + std::to_string(i) + " failed: " + item.error, 1.0, 0.0});
      continue;
    }
    worst = std::max(worst, item.report->method(name).residual);
  }
  return worst;
}

std::vector<Measure> criterion1() {
  std::vector<Measure> m;
  const double r = worst_method_residual("solid_angle", m);
  m.insert(m.begin(), {"max |wrap(-Lambda + 2hT/|mu| - direct)| over 6 orbits", r, 1e-3});
  return m;
}

std::vector<Measure> criterion2() {
  std::vector<Measure> m;
  const double r = worst_method_residual("mechanical_holonomy", m);
  double agreement = 0.0;
  for (const auto& item : rigid_body_reports()) {
    if (!item.report) continue;
    agreement = std::max(agreement, std::abs(wrap_angle(item.report->method("solid_angle").total -
                                                        item.report->method("mechanical_holonomy").total)));
  }
  m.insert(m.begin(), {"max |wrap(chi + |mu|^3 int ds/(Pi.I Pi) - direct)|", r, 1e-3});
  m.insert(m.begin() + 1, {"max disagreement between the two forms", agreement, 1e-4});
  return m;
}

heavytop::Params lagrange_top() {
  heavytop::Params p;
  p.inertia = InertiaTensor(2.0, 2.0, 1.0);
  return p;
}

std::vector<Measure> criterion3() {
  const heavytop::Params p = lagrange_top();
  const std::vector<double> nutation = {0.0, 0.05, 0.1};
  const auto residual = parallel_map(
      nutation.size(),
      [&](std::size_t i) {
        const auto ic = heavytop::lagrange_periodic_ic(p, 0.6, 4.0, nutation[i]);
        const auto orbit = heavytop::sample_orbit(ic.start, ic.period, p, 20000);
        return heavytop::phase_report(orbit, p).method("mechanical_holonomy").residual;
      },
      Execution::Parallel);
  std::vector<Measure> m;
  const char* names[] = {"steady precession", "nutation 0.05", "nutation 0.10"};
  for (std::size_t i = 0; i < residual.size(); ++i) {
    m.push_back({std::string("|wrap(chi + dynamic - direct)|, ") + names[i], residual[i], 1e-3});
  }
  return m;
}

double relative(double value, double reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), 1e-300);
}

std::vector<Measure> criterion4() {
  std::vector<Measure> m;
  const rigidbody::FullState start{Rotation(), BodyMomentum(Vec3(2.0, 0.3, 0.1))};
  const auto orbit = rigidbody::find_periodic_orbit(start.pi, kBody);
  const Trajectory full = rigidbody::integrate_full(start, kBody, orbit.period, 1e-3);
  const double h0 = rigidbody::hamiltonian(start.pi, kBody);
  const double c0 = start.pi.value.squaredNorm();
  const Vec3 mu = start.pi.value;
  double dh = 0.0, dc = 0.0, dmu = 0.0;
  for (const State& y : full.states) {
    const auto s = rigidbody::unpack(y);
    dh = std::max(dh, relative(rigidbody::hamiltonian(s.pi, kBody), h0));
    dc = std::max(dc, relative(s.pi.value.squaredNorm(), c0));
    dmu = std::max(dmu, (s.attitude * s.pi.value - mu).norm());
  }
  m.push_back({"rigid body: relative drift of h", dh, 1e-8});
  m.push_back({"rigid body: relative drift of |Pi|^2", dc, 1e-8});
  m.push_back({"rigid body: |R Pi - mu|", dmu, 1e-7});

  const heavytop::Params p = lagrange_top();
  const auto ic = heavytop::lagrange_periodic_ic(p, 0.6, 4.0, 0.05);
  const Trajectory top = rk4_integrate(heavytop::reduced_flow(p), heavytop::pack(ic.start), 0.0,
                                       ic.period, 1e-3);
  const double e0 = heavytop::hamiltonian(ic.start, p);
  const double m0 = heavytop::casimir_momentum(ic.start);
  const double g0 = heavytop::casimir_gamma(ic.start);
  double de = 0.0, dm = 0.0, dg = 0.0;
  for (const State& y : top.states) {
    const auto s = heavytop::unpack(y);
    de = std::max(de, relative(heavytop::hamiltonian(s, p), e0));
    dm = std::max(dm, relative(heavytop::casimir_momentum(s), m0));
    dg = std::max(dg, relative(heavytop::casimir_gamma(s), g0));
  }
  m.push_back({"heavy top: relative drift of h", de, 1e-8});
  m.push_back({"heavy top: relative drift of Pi.Gamma", dm, 1e-8});
  m.push_back({"heavy top: relative drift of |Gamma|^2", dg, 1e-8});
  return m;
}

std::vector<Measure> criterion5() {
  const auto a = connection_axiom_sweep(kBody, 1000, 2024, Execution::Parallel);
  return {{"|A(xi_Q) - xi|", a.reproduces_generators, 1e-12},
          {"kernel horizontality", a.kernel_horizontal, 1e-12},
          {"alpha_mu equivariance", a.alpha_equivariance, 1e-11}};
}

std::vector<Measure> criterion6() {
  const auto a = amended_potential_sweep(kBody, 8, 10000, 2025, Execution::Parallel);
  return {{"|V_mu - H(alpha_mu)|", a.closed_form_vs_h_alpha, 1e-12},
          {"|V_mu - H(alpha_mu)|, circle isotropy", a.circle_closed_form_vs_h_alpha, 1e-12},
          {"K(alpha_mu) - sampled fibre minimum (1e4 samples)", a.fibre_minimum_gap, 1e-12}};
}

std::vector<Measure> criterion7() {
  const auto field = kaluza::MagneticField::uniform(Vec3(0.0, 0.0, 1.0));
  kaluza::ComparisonConfig cfg;
  cfg.periods = 10.0;
  const auto r = kaluza::compare(field, cfg);
  const std::vector<Vec3> points = {{0.0, 0.0, 0.0}, {0.3, -0.7, 1.1}, {-2.0, 1.5, 0.4}, {1.0, 1.0, -1.0}};
  return {{"Answer 1 vs shifted Answer 2 endpoint gap", r.answer1_vs_answer2, 1e-9},
          {"Kaluza-Klein vs Lorentz endpoint gap", r.kk_vs_lorentz, 1e-8},
          {"cyclotron radius relative error", r.cyclotron_radius_error, 1e-6},
          {"|d alpha_mu - mu B|", kaluza::magnetic_two_form_residual(field, 1.3, points), 1e-6}};
}

std::vector<Measure> criterion8() {
  double so3_field = 0.0, so3_casimir = 0.0, se3_field = 0.0, se3_casimir = 0.0;
  const rigidbody::ScalarField h = [](const Vec3& x) {
    return rigidbody::hamiltonian(BodyMomentum(x), kBody);
  };
  const rigidbody::ScalarField c = [](const Vec3& x) { return x.squaredNorm(); };
  const heavytop::Params p = [] {
    heavytop::Params q;
    q.inertia = InertiaTensor(3.0, 2.0, 1.0);
    q.com_direction = Vec3(1.0, 2.0, 2.0).normalized();
    q.mass = 1.5;
    return q;
  }();
  const heavytop::Function ht = [&](const heavytop::HeavyTopState& s) {
    return heavytop::hamiltonian(s, p);
  };
  const heavytop::Function c1 = [](const heavytop::HeavyTopState& s) {
    return heavytop::casimir_momentum(s);
  };
  const heavytop::Function c2 = [](const heavytop::HeavyTopState& s) {
    return heavytop::casimir_gamma(s);
  };
  for (std::size_t i = 0; i < 100; ++i) {
    auto rng = sample_rng(808, i);
    const Vec3 pi = random_vector(rng, 2.0);
    Vec3 xdot;
    for (int k = 0; k < 3; ++k) {
      xdot(k) = rigidbody::lie_poisson_bracket(
          [k](const Vec3& x) { return x(k); }, h, pi);
    }
    so3_field = std::max(so3_field, (xdot - rigidbody::euler_rhs(BodyMomentum(pi), kBody)).norm());
    so3_casimir = std::max(so3_casimir, std::abs(rigidbody::lie_poisson_bracket(c, h, pi)));

    const heavytop::HeavyTopState s{random_vector(rng, 2.0), random_vector(rng).normalized()};
    const auto a = heavytop::bracket_vector_field(ht, s);
    const auto b = heavytop::rhs(s, p);
    se3_field = std::max(se3_field, std::max((a.pi_rate - b.pi_rate).norm(),
                                             (a.gamma_rate - b.gamma_rate).norm()));
    se3_casimir = std::max({se3_casimir, std::abs(heavytop::lie_poisson_bracket(c1, ht, s)),
                            std::abs(heavytop::lie_poisson_bracket(c2, ht, s))});
  }
  return {{"so(3)*: bracket field vs Euler equations", so3_field, 1e-6},
          {"so(3)*: {|Pi|^2, h}", so3_casimir, 1e-9},
          {"se(3)*: bracket field vs heavy-top equations", se3_field, 1e-6},
          {"se(3)*: {Pi.Gamma, h}, {|Gamma|^2, h}", se3_casimir, 1e-9}};
}

std::vector<Measure> criterion9() {
  // y' = -y^2, y(0) = 1, exact 1/(1 + t).
  const Rhs rhs = [](double, const State& y) { return State(-y.cwiseProduct(y)); };
  State y0(1);
  y0 << 1.0;
  const auto error = [&](double dt) {
    return std::abs(rk4_integrate(rhs, y0, 0.0, 2.0, dt).back()(0) - 1.0 / 3.0);
  };
  const double order = std::log2(error(0.04) / error(0.02));

  std::vector<Vec3> equator;
  for (int k = 0; k <= 360; ++k) {
    const double a = kTwoPi * k / 360.0;
    equator.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  const double hemisphere = spherical_signed_area(SphericalLoop(equator));
  const SphericalLoop octant({Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(), Vec3::UnitX()});
  return {{"|observed RK4 order - 4|", std::abs(order - 4.0), 0.1},
          {"|hemisphere area - 2 pi|", std::abs(std::abs(hemisphere) - kTwoPi), 1e-6},
          {"|Girard triangle area - pi/2|", std::abs(spherical_signed_area(octant) - kPi / 2.0), 1e-6}};
}

std::vector<Measure> criterion10() {
  std::vector<Measure> m;
  const Rotation q0 = exp_so3(Vec3(0.3, -0.2, 0.5));
  for (const Vec3& seed : {Vec3(2.0, 0.3, 0.1), Vec3(0.3, 0.2, 1.5)}) {
    const auto orbit = rigidbody::find_periodic_orbit(BodyMomentum(seed), kBody);
    const auto problem = make_rigid_body_problem(orbit.body_momentum, orbit.dt, q0, kBody);
    const Reconstruction rec = reconstruct(problem);
    const rigidbody::FullState start{q0, BodyMomentum(orbit.body_momentum.front())};
    const Trajectory full = rigidbody::integrate_full(start, kBody, orbit.period, orbit.dt);
    const std::size_t n = std::min(full.size(), rec.attitude.size());
    double gap = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      gap = std::max(gap, (rec.attitude[k].matrix() - rigidbody::unpack(full.states[k]).attitude.matrix()).norm());
    }
    char label[64];
    std::snprintf(label, sizeof label, "Pi0 = (%.1f, %.1f, %.1f)", seed.x(), seed.y(), seed.z());
    m.push_back({std::string("||R_rec - R_direct||_F, ") + label, gap, 1e-5});
    m.push_back({std::string("|J - mu| along reconstruction, ") + label, rec.max_momentum_error, 1e-7});
  }
  return m;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "rigid-body phase, solid-angle form", criterion1},
      {2, "rigid-body phase, holonomy form", criterion2},
      {3, "heavy-top phase on Lagrange-top orbits", criterion3},
      {4, "conservation over one period at dt = 1e-3", criterion4},
      {5, "mechanical connection axioms", criterion5},
      {6, "amended potential", criterion6},
      {7, "Kaluza-Klein equivalences", criterion7},
      {8, "Lie-Poisson bracket consistency", criterion8},
      {9, "numerics kernels", criterion9},
      {10, "reconstruction engine", criterion10},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto started = std::chrono::steady_clock::now();
    std::vector<Measure> measures;
    std::string error;
    try {
      measures = c.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const bool ok = error.empty() && std::all_of(measures.begin(), measures.end(),
                                                 [](const Measure& m) { return m.ok(); });
    failed += ok ? 0 : 1;
    std::printf("%s criterion %d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(), seconds);
    for (const auto& m : measures) {
      std::printf("    %-4s %-60s %.3e < %.0e\n", m.ok() ? "ok" : "BAD", m.what.c_str(), m.value, m.bound);
    }
    if (!error.empty()) std::printf("    exception: %s\n", error.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
