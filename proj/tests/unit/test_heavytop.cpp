#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cotred/batch.hpp"
#include "cotred/heavytop.hpp"
#include "cotred/mechsys.hpp"
#include "cotred/rigidbody.hpp"

using namespace cotred;
using namespace cotred::heavytop;

namespace {

Params lagrange_top() {
  Params p;
  p.inertia = InertiaTensor(2.0, 2.0, 1.0);
  return p;
}

Params generic_top() {
  Params p;
  p.inertia = InertiaTensor(3.0, 2.0, 1.0);
  p.mass = 1.5;
  p.length = 0.8;
  p.com_direction = Vec3(1.0, 2.0, 2.0).normalized();
  return p;
}

Params free_body() {
  Params p;
  p.inertia = InertiaTensor(3.0, 2.0, 1.0);
  p.gravity = 0.0;
  return p;
}

Trajectory full_run(const HeavyTopState& s, const Params& p, double duration, double dt) {
  const Rotation r0 = Rotation::aligning(s.gamma, Vec3::UnitZ());
  return rk4_integrate(full_flow(p), pack_full(r0, s), 0.0, duration, dt);
}

}  // namespace

TEST(HeavyTopRhs, SleepingTopIsEquilibrium) {
  const HeavyTopState s{Vec3(0, 0, 2.5), Vec3::UnitZ()};
  const Tangent t = rhs(s, lagrange_top());
  EXPECT_EQ(t.pi_rate, Vec3::Zero());
  EXPECT_EQ(t.gamma_rate, Vec3::Zero());
}

TEST(HeavyTopRhs, FreeLimitIsEulerPlusTransport) {
  const Params p = free_body();
  for (std::size_t i = 0; i < 20; ++i) {
    auto rng = sample_rng(83, i);
    const HeavyTopState s{random_vector(rng), random_vector(rng).normalized()};
    const Tangent t = rhs(s, p);
    EXPECT_LT((t.pi_rate - rigidbody::euler_rhs(BodyMomentum(s.pi), p.inertia)).norm(), 1e-15);
    EXPECT_LT((t.gamma_rate - s.gamma.cross(p.inertia.solve(s.pi))).norm(), 1e-15);
    EXPECT_NEAR(hamiltonian(s, p), rigidbody::hamiltonian(BodyMomentum(s.pi), p.inertia), 1e-15);
  }
}

TEST(HeavyTopRhs, CasimirsConservedOverFiftyUnits) {
  const Params p = generic_top();
  const HeavyTopState s0{Vec3(0.4, -0.3, 1.2), Vec3(0.3, 0.2, 1.0).normalized()};
  const Trajectory t = rk4_integrate(reduced_flow(p), pack(s0), 0.0, 50.0, 1e-3);
  for (const State& y : t.states) {
    const HeavyTopState s = unpack(y);
    EXPECT_NEAR(casimir_momentum(s), casimir_momentum(s0), 1e-8);
    EXPECT_NEAR(casimir_gamma(s), 1.0, 1e-8);
    const Tangent d = rhs(s, p);
    EXPECT_NEAR(d.pi_rate.dot(s.gamma) + s.pi.dot(d.gamma_rate), 0.0, 1e-12);
    EXPECT_NEAR(d.gamma_rate.dot(s.gamma), 0.0, 1e-14);
  }
}

TEST(HeavyTopHamiltonian, Examples) {
  const Params p = generic_top();
  const HeavyTopState upright{Vec3::Zero(), p.com_direction};
  EXPECT_NEAR(hamiltonian(upright, p), p.mgl(), 1e-15);
}

TEST(Se3Bracket, AntisymmetryAndCasimirs) {
  const Params p = generic_top();
  const Function c1 = [](const HeavyTopState& s) { return casimir_momentum(s); };
  const Function c2 = [](const HeavyTopState& s) { return casimir_gamma(s); };
  for (std::size_t i = 0; i < 20; ++i) {
    auto rng = sample_rng(89, i);
    const Vec3 w = random_vector(rng);
    const Vec3 v = random_vector(rng);
    const Function g = [w, v](const HeavyTopState& s) {
      return std::sin(w.dot(s.pi)) + std::cos(v.dot(s.gamma)) * s.pi(2);
    };
    const HeavyTopState s{random_vector(rng, 2.0), random_vector(rng).normalized()};
    EXPECT_NEAR(lie_poisson_bracket(g, g, s), 0.0, 1e-12);
    EXPECT_NEAR(lie_poisson_bracket(c1, g, s), 0.0, 1e-9);
    EXPECT_NEAR(lie_poisson_bracket(c2, g, s), 0.0, 1e-9);
  }
}

TEST(Se3Bracket, PotentialTermOfAxialTorque) {
  // {Pi3, M g l Gamma . chi} is the gravity part of Pi3dot.
  const Params p = generic_top();
  const Function pi3 = [](const HeavyTopState& s) { return s.pi(2); };
  const Function potential = [&](const HeavyTopState& s) { return p.mgl() * s.gamma.dot(p.com_direction); };
  for (std::size_t i = 0; i < 20; ++i) {
    auto rng = sample_rng(97, i);
    const HeavyTopState s{random_vector(rng), random_vector(rng).normalized()};
    const double torque = p.mgl() * s.gamma.cross(p.com_direction)(2);
    EXPECT_NEAR(lie_poisson_bracket(pi3, potential, s), torque, 1e-8);
  }
}

TEST(Se3Bracket, GeneratesHeavyTopEquations) {
  const Params p = generic_top();
  const Function h = [&](const HeavyTopState& s) { return hamiltonian(s, p); };
  for (std::size_t i = 0; i < 100; ++i) {
    auto rng = sample_rng(101, i);
    const HeavyTopState s{random_vector(rng, 2.0), random_vector(rng).normalized()};
    const Tangent a = bracket_vector_field(h, s);
    const Tangent b = rhs(s, p);
    EXPECT_LT((a.pi_rate - b.pi_rate).norm(), 1e-6);
    EXPECT_LT((a.gamma_rate - b.gamma_rate).norm(), 1e-6);
  }
}

TEST(Params, Validation) {
  Params p = lagrange_top();
  EXPECT_NO_THROW(p.validate());
  p.com_direction = Vec3(1, 1, 0);
  EXPECT_THROW(p.validate(), Error);
  p = lagrange_top();
  p.mass = -1.0;
  EXPECT_THROW(p.validate(), Error);
}

TEST(SteadyPrecession, SolvesTheQuadraticAndIsStationaryInTheCoPrecessingFrame) {
  const Params p = lagrange_top();
  const double tilt = 0.6, pi3 = 4.0;
  const Precession s = steady_precession(p, tilt, pi3);
  const double phidot = s.precession_rate;
  EXPECT_NEAR(p.inertia.i1() * std::cos(tilt) * phidot * phidot - pi3 * phidot + p.mgl(), 0.0, 1e-12);
  // Slow root: the smaller magnitude of the two.
  const double disc = pi3 * pi3 - 4 * p.inertia.i1() * std::cos(tilt) * p.mgl();
  const double fast = (pi3 + std::sqrt(disc)) / (2 * p.inertia.i1() * std::cos(tilt));
  EXPECT_LT(std::abs(phidot), std::abs(fast));

  // In the body frame the state turns rigidly about e3 at -psidot.
  const HeavyTopState st = lagrange_state(p, tilt, pi3, phidot);
  const Tangent d = rhs(st, p);
  const Vec3 w = -s.spin_rate * Vec3::UnitZ();
  EXPECT_LT((d.pi_rate - w.cross(st.pi)).norm(), 1e-9);
  EXPECT_LT((d.gamma_rate - w.cross(st.gamma)).norm(), 1e-9);
}

TEST(SteadyPrecession, NoRoot) {
  const Params p = lagrange_top();
  for (const auto& [tilt, pi3] : {std::pair{0.0, 4.0}, std::pair{0.6, 0.5}}) {
    try {
      steady_precession(p, tilt, pi3);
      FAIL() << "expected NoPrecessionRoot";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NoPrecessionRoot);
    }
  }
}

TEST(LagrangeOrbit, RequiresLagrangeTop) {
  EXPECT_THROW(lagrange_periodic_ic(generic_top(), 0.5, 4.0), Error);
}

TEST(LagrangeOrbit, SteadyPrecessionPhase) {
  const Params p = lagrange_top();
  const LagrangeOrbit ic = lagrange_periodic_ic(p, 0.6, 4.0);
  EXPECT_TRUE(ic.steady);
  const Trajectory full = full_run(ic.start, p, ic.period, ic.period / 20000);
  EXPECT_NEAR(wrap_angle(direct_phase(full) - ic.precession_rate * ic.period), 0.0, 1e-8);
  EXPECT_LT(frame_residual(full), 1e-7);
  const PhaseReport r = phase_report(sample_orbit(ic.start, ic.period, p, 20000), p);
  EXPECT_LT(r.method("mechanical_holonomy").residual, 1e-3);
  EXPECT_LT(r.method("canonical_one_form").residual, 1e-3);
  EXPECT_TRUE(std::isnan(r.method("amended_potential").total));
  EXPECT_FALSE(r.method("printed_second_line").asserted);
}

TEST(LagrangeOrbit, NutatingOrbitCloses) {
  const Params p = lagrange_top();
  const LagrangeOrbit ic = lagrange_periodic_ic(p, 0.6, 4.0, 0.05);
  EXPECT_FALSE(ic.steady);
  EXPECT_TRUE(std::isfinite(ic.period));
  const Trajectory t = rk4_integrate(reduced_flow(p), pack(ic.start), 0.0, ic.period, 1e-3);
  EXPECT_LT((t.back() - t.front()).norm(), 1e-5);
  for (const State& y : t.states) {
    const HeavyTopState s = unpack(y);
    EXPECT_NEAR(casimir_momentum(s), casimir_momentum(ic.start), 1e-8);
    EXPECT_NEAR(casimir_gamma(s), 1.0, 1e-8);
  }
  const PhaseReport r = phase_report(sample_orbit(ic.start, ic.period, p, 20000), p);
  EXPECT_LT(r.max_asserted_residual(), 1e-3);
  EXPECT_LT(r.form_agreement, 1e-4);
}

TEST(LagrangeOrbit, FrameConsistencyOnNutatingRun) {
  const Params p = lagrange_top();
  const LagrangeOrbit ic = lagrange_periodic_ic(p, 0.6, 4.0, 0.1);
  EXPECT_LT(frame_residual(full_run(ic.start, p, ic.period, 1e-3)), 1e-7);
}

TEST(HeavyTopPhase, FreeLimitMatchesRigidBody) {
  // With no gravity and Gamma = Pi / |Pi| the vertical is the momentum axis.
  const Params p = free_body();
  const Vec3 pi0(1.9, 0.5, 0.3);
  rigidbody::OrbitSearch search;
  search.samples_per_period = 20000;
  const auto rb_orbit = rigidbody::find_periodic_orbit(BodyMomentum(pi0), p.inertia, search);
  const PhaseReport rb = rigidbody::rigid_body_phase_report(rb_orbit, p.inertia);

  const HeavyTopState s0{pi0, pi0.normalized()};
  const PhaseReport ht = phase_report(sample_orbit(s0, rb_orbit.period, p, 20000), p);
  EXPECT_NEAR(wrap_angle(ht.direct - rb.direct), 0.0, 1e-6);
  EXPECT_NEAR(wrap_angle(ht.method("mechanical_holonomy").total - rb.method("mechanical_holonomy").total),
              0.0, 1e-6);
  EXPECT_NEAR(ht.method("mechanical_holonomy").dynamic, rb.method("mechanical_holonomy").dynamic, 1e-6);
}

TEST(HeavyTopPhase, ZeroMomentumAndOpenOrbit) {
  const Params p = lagrange_top();
  PeriodicOrbit flat;
  flat.dt = 0.01;
  flat.period = 0.1;
  flat.states.assign(11, HeavyTopState{Vec3(1, 0, 0), Vec3::UnitZ()});
  try {
    phase_report(flat, p);
    FAIL() << "expected ZeroMomentum";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroMomentum);
  }
  const LagrangeOrbit ic = lagrange_periodic_ic(p, 0.6, 4.0);
  const PeriodicOrbit half = sample_orbit(ic.start, 0.5 * ic.period, p, 1000);
  try {
    phase_report(half, p);
    FAIL() << "expected NotClosed";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotClosed);
  }
}

TEST(HeavyTopReconstruction, SteadyPrecessionMatchesDirectIntegration) {
  const Params p = lagrange_top();
  const LagrangeOrbit ic = lagrange_periodic_ic(p, 0.6, 4.0);
  const PeriodicOrbit orbit = sample_orbit(ic.start, ic.period, p, 20000);
  std::vector<Vec3> pis, gammas;
  for (const auto& s : orbit.states) {
    pis.push_back(s.pi);
    gammas.push_back(s.gamma);
  }
  const Rotation q0 = Rotation::aligning(ic.start.gamma, Vec3::UnitZ());
  const Reconstruction rec = reconstruct(make_heavy_top_problem(pis, gammas, orbit.dt, q0, p.inertia));
  const Trajectory full = full_run(ic.start, p, ic.period, orbit.dt);
  EXPECT_LT((rec.attitude.back().matrix() - attitude_of(full.back()).matrix()).norm(), 1e-5);
  EXPECT_LT(rec.max_momentum_error, 1e-7);
}
