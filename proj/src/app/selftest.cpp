#include "cotred/app/selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "cotred/batch.hpp"
#include "cotred/heavytop.hpp"
#include "cotred/integrate.hpp"
#include "cotred/kaluza.hpp"
#include "cotred/mechsys.hpp"
#include "cotred/rigidbody.hpp"
#include "cotred/spherical.hpp"

namespace cotred::app {

namespace {

// Accumulates named checks; a suite passes when every check does.
class Checks {
 public:
  void expect_below(const std::string& what, double value, double bound) {
    if (!(value < bound)) {
      std::ostringstream os;
      os << what << " = " << value << " (bound " << bound << ")";
      failures_.push_back(os.str());
    }
  }
  bool passed() const { return failures_.empty(); }
  std::string detail() const {
    if (failures_.empty()) return "ok";
    std::string out;
    for (const auto& f : failures_) out += (out.empty() ? "" : "; ") + f;
    return out;
  }

 private:
  std::vector<std::string> failures_;
};

const InertiaTensor kBody(3.0, 2.0, 1.0);

void liegroup_suite(Checks& c, const SelftestOptions&) {
  double roundtrip = 0.0;
  double hat_vee = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    auto rng = sample_rng(7, i);
    const Rotation r = random_rotation(rng);
    roundtrip = std::max(roundtrip, (exp_so3(log_so3(r)).matrix() - r.matrix()).norm());
    const Vec3 v = random_vector(rng);
    hat_vee = std::max(hat_vee, (vee(hat(v)) - v).norm());
  }
  c.expect_below("exp(log R) - R", roundtrip, 1e-12);
  c.expect_below("vee(hat v) - v", hat_vee, 1e-15);
}

void integrate_suite(Checks& c, const SelftestOptions&) {
  const Rhs growth = [](double, const State& y) { return State(y); };
  State y0(1);
  y0 << 1.0;
  const double e1 = std::abs(rk4_integrate(growth, y0, 0.0, 1.0, 0.1).back()(0) - std::exp(1.0));
  const double e2 = std::abs(rk4_integrate(growth, y0, 0.0, 1.0, 0.05).back()(0) - std::exp(1.0));
  c.expect_below("|RK4 order - 4|", std::abs(std::log2(e1 / e2) - 4.0), 0.1);

  std::vector<double> s(101);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::sin(kPi * static_cast<double>(k) / 100.0);
  c.expect_below("Simpson int sin", std::abs(quadrature(s, kPi / 100.0) - 2.0), 1e-7);

  const Rhs oscillator = [](double, const State& y) {
    State d(2);
    d << y(1), -y(0);
    return d;
  };
  State x0(2);
  x0 << 1.0, 0.0;
  c.expect_below("oscillator period", std::abs(detect_period(oscillator, x0, 1e-3, 20.0, 1e-8) - kTwoPi),
                 1e-8);
}

void spherical_suite(Checks& c, const SelftestOptions&) {
  std::vector<Vec3> equator;
  for (int k = 0; k <= 64; ++k) {
    const double a = kTwoPi * k / 64.0;
    equator.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  const double hemisphere = spherical_signed_area(SphericalLoop(equator), Vec3::UnitZ());
  c.expect_below("hemisphere area", std::abs(hemisphere - kTwoPi), 1e-6);
  const SphericalLoop octant({Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(), Vec3::UnitX()});
  c.expect_below("octant area", std::abs(std::abs(spherical_signed_area(octant)) - kPi / 2.0), 1e-6);
}

rigidbody::EulerRhsFn euler_for(const SelftestOptions& o) {
  if (!o.flip_euler_sign) return rigidbody::euler_rhs;
  return [](const BodyMomentum& pi, const InertiaTensor& inertia) -> Vec3 {
    return -rigidbody::euler_rhs(pi, inertia);
  };
}

void rigid_body_suite(Checks& c, const SelftestOptions& o) {
  const Rhs flow = rigidbody::reduced_flow(kBody, euler_for(o));
  const rigidbody::ScalarField h = [](const Vec3& p) {
    return rigidbody::hamiltonian(BodyMomentum(p), kBody);
  };
  double bracket = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    auto rng = sample_rng(11, i);
    const Vec3 pi = random_vector(rng);
    Vec3 from_bracket;
    for (int k = 0; k < 3; ++k) {
      from_bracket(k) =
          rigidbody::lie_poisson_bracket(Vec3::Unit(k), rigidbody::gradient(h, pi), pi);
    }
    bracket = std::max(bracket, (from_bracket - Vec3(flow(0.0, pi))).norm());
  }
  c.expect_below("bracket vs Euler flow", bracket, 1e-6);

  rigidbody::OrbitSearch search;
  search.samples_per_period = 5000;
  const auto orbit =
      rigidbody::find_periodic_orbit(BodyMomentum(Vec3(2.0, 0.3, 0.1)), kBody, search, euler_for(o));
  const PhaseReport r = rigidbody::rigid_body_phase_report(orbit, kBody);
  c.expect_below("phase residual", r.max_asserted_residual(), 1e-3);

  const rigidbody::FullState start{Rotation(), BodyMomentum(Vec3(2.0, 0.3, 0.1))};
  const Trajectory full = rigidbody::integrate_full(start, kBody, orbit.period, 1e-3);
  const double h0 = rigidbody::hamiltonian(start.pi, kBody);
  double dh = 0.0, dmu = 0.0;
  for (const auto& y : full.states) {
    const auto s = rigidbody::unpack(y);
    dh = std::max(dh, std::abs(rigidbody::hamiltonian(s.pi, kBody) - h0) / h0);
    dmu = std::max(dmu, (s.attitude * s.pi.value - start.pi.value).norm());
  }
  c.expect_below("energy drift", dh, 1e-8);
  c.expect_below("spatial momentum drift", dmu, 1e-7);
}

void heavy_top_suite(Checks& c, const SelftestOptions&) {
  heavytop::Params p;
  p.inertia = InertiaTensor(2.0, 2.0, 1.0);
  const heavytop::Function h = [&](const heavytop::HeavyTopState& s) {
    return heavytop::hamiltonian(s, p);
  };
  const heavytop::Function c1 = [](const heavytop::HeavyTopState& s) {
    return heavytop::casimir_momentum(s);
  };
  double field = 0.0, casimir = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    auto rng = sample_rng(13, i);
    const heavytop::HeavyTopState s{random_vector(rng), random_vector(rng).normalized()};
    const auto a = heavytop::bracket_vector_field(h, s);
    const auto b = heavytop::rhs(s, p);
    field = std::max(field, (a.pi_rate - b.pi_rate).norm() + (a.gamma_rate - b.gamma_rate).norm());
    casimir = std::max(casimir, std::abs(heavytop::lie_poisson_bracket(c1, h, s)));
  }
  c.expect_below("bracket vs heavy-top equations", field, 1e-6);
  c.expect_below("Casimir bracket", casimir, 1e-9);

  const auto ic = heavytop::lagrange_periodic_ic(p, 0.6, 4.0);
  const auto orbit = heavytop::sample_orbit(ic.start, ic.period, p, 4000);
  c.expect_below("steady precession phase residual",
                 heavytop::phase_report(orbit, p).max_asserted_residual(), 1e-3);
}

void mechsys_suite(Checks& c, const SelftestOptions&) {
  const auto axioms = connection_axiom_sweep(kBody, 200, 17, Execution::Parallel);
  c.expect_below("A(xi_Q) - xi", axioms.reproduces_generators, 1e-12);
  c.expect_below("kernel horizontality", axioms.kernel_horizontal, 1e-12);
  c.expect_below("alpha_mu equivariance", axioms.alpha_equivariance, 1e-11);
  const auto amended = amended_potential_sweep(kBody, 4, 2000, 19, Execution::Parallel);
  c.expect_below("V_mu vs H(alpha_mu)", amended.closed_form_vs_h_alpha, 1e-12);
  c.expect_below("fibre minimum gap", amended.fibre_minimum_gap, 1e-12);
}

void kaluza_suite(Checks& c, const SelftestOptions&) {
  const auto field = kaluza::MagneticField::uniform(Vec3(0.0, 0.0, 2.0));
  kaluza::ComparisonConfig cfg;
  cfg.periods = 3.0;
  const auto r = kaluza::compare(field, cfg);
  c.expect_below("Answer 1 vs Answer 2", r.answer1_vs_answer2, 1e-9);
  c.expect_below("Kaluza-Klein vs Lorentz", r.kk_vs_lorentz, 1e-8);
  c.expect_below("cyclotron radius", r.cyclotron_radius_error, 1e-6);
  c.expect_below("d alpha_mu - mu B",
                 kaluza::magnetic_two_form_residual(field, 1.0, {Vec3(0.1, 0.2, 0.3), Vec3(1, -1, 2)}),
                 1e-6);
}

}  // namespace

std::vector<SuiteResult> run_selftest(const SelftestOptions& options) {
  const std::vector<std::pair<std::string, std::function<void(Checks&, const SelftestOptions&)>>>
      suites = {{"liegroup", liegroup_suite},   {"integrate", integrate_suite},
                {"spherical", spherical_suite}, {"rigidbody", rigid_body_suite},
                {"heavytop", heavy_top_suite},  {"mechsys", mechsys_suite},
                {"kaluza", kaluza_suite}};
  std::vector<SuiteResult> results;
  for (const auto& [name, run] : suites) {
    const auto started = std::chrono::steady_clock::now();
    SuiteResult r;
    r.name = name;
    Checks checks;
    try {
      run(checks, options);
      r.passed = checks.passed();
      r.detail = checks.detail();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    results.push_back(r);
  }
  return results;
}

int report_selftest(const std::vector<SuiteResult>& results, std::ostream& os) {
  bool all = true;
  for (const auto& r : results) {
    os << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.seconds << " s): " << r.detail
       << '\n';
    all = all && r.passed;
  }
  os << (all ? "selftest passed" : "selftest FAILED") << '\n';
  return all ? 0 : 1;
}

}  // namespace cotred::app
