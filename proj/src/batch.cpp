#include "cotred/batch.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

#if defined(COTRED_HAVE_OPENMP)
#include <omp.h>
#endif

#include "cotred/mechsys.hpp"

namespace cotred {

int parallel_threads() {
#if defined(COTRED_HAVE_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return Rotation::unchecked(q.toRotationMatrix());
}

Vec3 random_vector(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  return {n(rng), n(rng), n(rng)};
}

std::vector<PhaseSweepItem> rigid_body_phase_sweep(const std::vector<Vec3>& initial,
                                                   const InertiaTensor& inertia,
                                                   const rigidbody::OrbitSearch& search,
                                                   Execution exec) {
  return parallel_map(
      initial.size(),
      [&](std::size_t i) {
        PhaseSweepItem item;
        try {
          const auto orbit =
              rigidbody::find_periodic_orbit(BodyMomentum(initial[i]), inertia, search);
          item.report = rigidbody::rigid_body_phase_report(orbit, inertia);
        } catch (const Error& e) {
          item.error = e.what();
        }
        return item;
      },
      exec);
}

ConnectionAxioms connection_axiom_sweep(const InertiaTensor& inertia, std::size_t samples,
                                        std::uint64_t seed, Execution exec) {
  const auto per_sample = parallel_map(
      samples,
      [&](std::size_t i) {
        std::mt19937_64 rng = sample_rng(seed, i);
        const Rotation r = random_rotation(rng);
        const Rotation g = random_rotation(rng);
        const Vec3 xi = random_vector(rng);
        const Vec3 omega = random_vector(rng);
        const Vec3 mu = random_vector(rng);
        const Mat3 v = r.matrix() * hat(omega);

        ConnectionAxioms a;
        a.reproduces_generators =
            (mechanical_connection(r, generator(r, xi), inertia) - xi).norm();

        const Vec3 a_v = mechanical_connection(r, v, inertia);
        const Mat3 hor = v - generator(r, a_v);
        double kernel = mechanical_connection(r, hor, inertia).norm();
        for (int k = 0; k < 3; ++k) {
          kernel = std::max(kernel,
                            std::abs(kinetic_inner(r, hor, generator(r, Vec3::Unit(k)), inertia)));
        }
        a.kernel_horizontal = kernel;

        const Rotation gr = g * r;
        const Vec3 moved = mechanical_connection(gr, g.matrix() * v, inertia);
        a.connection_equivariance = (moved - g * a_v).norm();

        const BodyMomentum before = alpha_mu(r, SpatialMomentum(mu), inertia);
        const BodyMomentum after = alpha_mu(gr, SpatialMomentum(g * mu), inertia);
        a.alpha_equivariance = (after.value - before.value).norm();
        return a;
      },
      exec);

  ConnectionAxioms worst;
  for (const auto& a : per_sample) {
    worst.reproduces_generators = std::max(worst.reproduces_generators, a.reproduces_generators);
    worst.kernel_horizontal = std::max(worst.kernel_horizontal, a.kernel_horizontal);
    worst.connection_equivariance =
        std::max(worst.connection_equivariance, a.connection_equivariance);
    worst.alpha_equivariance = std::max(worst.alpha_equivariance, a.alpha_equivariance);
  }
  return worst;
}

AmendedChecks amended_potential_sweep(const InertiaTensor& inertia, std::size_t configurations,
                                      std::size_t fibre_samples, std::uint64_t seed,
                                      Execution exec) {
  const Vec3 k = Vec3::UnitZ();
  const Vec3 com = Vec3(0.2, -0.3, 1.0).normalized();
  const Potential potential = [&](const Rotation& r) { return 0.7 * (r.inverse() * k).dot(com); };

  const auto per_config = parallel_map(
      configurations,
      [&](std::size_t i) {
        std::mt19937_64 rng = sample_rng(seed, i);
        const Rotation r = random_rotation(rng);
        const Vec3 mu = random_vector(rng);
        const Vec3 zeta = random_vector(rng).normalized();
        const double mu_zeta = random_vector(rng).x();

        AmendedChecks c;
        const BodyMomentum alpha = alpha_mu(r, SpatialMomentum(mu), inertia);
        const double h_alpha = kinetic_energy(alpha, inertia) + potential(r);
        c.closed_form_vs_h_alpha =
            std::abs(amended_potential(r, SpatialMomentum(mu), inertia, potential) - h_alpha);

        const BodyMomentum circle = circle_alpha_mu(r, mu_zeta, zeta, inertia);
        const double k_circle = kinetic_energy(circle, inertia);
        c.circle_closed_form_vs_h_alpha = std::abs(
            circle_amended_potential(r, mu_zeta, zeta, inertia, potential) - (k_circle + potential(r)));
        c.alpha_in_fibre = std::max((r * alpha.value - mu).norm(),
                                    std::abs((r * circle.value).dot(zeta) - mu_zeta));

        const Vec3 u = r.inverse() * zeta;
        const double scale = std::max(1.0, circle.value.norm());
        double lowest = k_circle;
        for (std::size_t s = 0; s < fibre_samples; ++s) {
          Vec3 w = random_vector(rng, scale);
          w -= w.dot(u) * u;
          // Half the samples crowd the candidate minimiser.
          if (s % 2 == 1) w *= 1e-3;
          lowest = std::min(lowest, kinetic_energy(BodyMomentum(circle.value + w), inertia));
        }
        c.fibre_minimum_gap = k_circle - lowest;
        c.fibre_samples = fibre_samples;
        return c;
      },
      exec);

  AmendedChecks worst;
  worst.fibre_samples = fibre_samples;
  for (const auto& c : per_config) {
    worst.closed_form_vs_h_alpha = std::max(worst.closed_form_vs_h_alpha, c.closed_form_vs_h_alpha);
    worst.circle_closed_form_vs_h_alpha =
        std::max(worst.circle_closed_form_vs_h_alpha, c.circle_closed_form_vs_h_alpha);
    worst.alpha_in_fibre = std::max(worst.alpha_in_fibre, c.alpha_in_fibre);
    worst.fibre_minimum_gap = std::max(worst.fibre_minimum_gap, c.fibre_minimum_gap);
  }
  return worst;
}

}  // namespace cotred
