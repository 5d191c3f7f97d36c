#pragma once

// Independent-task fan-out. Each kernel has a serial reference and an OpenMP
// path; results are gathered by index so both produce identical output.

#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include "cotred/liegroup.hpp"
#include "cotred/phase.hpp"
#include "cotred/rigidbody.hpp"

namespace cotred {

enum class Execution { Serial, Parallel };

/// Number of threads the parallel path would use (1 without OpenMP).
int parallel_threads();

/// out[i] = f(i) for i < n. The first exception thrown by any task is rethrown.
template <class F>
auto parallel_map(std::size_t n, F&& f, Execution exec)
    -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(n);
#if defined(COTRED_HAVE_OPENMP)
  if (exec == Execution::Parallel) {
    std::exception_ptr failure;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      try {
        out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i));
      } catch (...) {
#pragma omp critical(cotred_parallel_map)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
  }
#else
  (void)exec;
#endif
  for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
  return out;
}

/// Generator for sample i of a seeded sweep; independent of thread layout.
std::mt19937_64 sample_rng(std::uint64_t seed, std::size_t index);

Rotation random_rotation(std::mt19937_64& rng);
Vec3 random_vector(std::mt19937_64& rng, double scale = 1.0);

// ---------------------------------------------------------------------------

struct PhaseSweepItem {
  std::optional<PhaseReport> report;
  std::string error;  ///< set when the orbit search or report failed
};

/// Rigid-body phase reports for a list of initial body momenta.
std::vector<PhaseSweepItem> rigid_body_phase_sweep(const std::vector<Vec3>& initial,
                                                   const InertiaTensor& inertia,
                                                   const rigidbody::OrbitSearch& search,
                                                   Execution exec);

/// Worst residuals of the mechanical connection axioms over random samples.
struct ConnectionAxioms {
  double reproduces_generators = 0;  ///< max |A(xi_Q) - xi|
  double kernel_horizontal = 0;      ///< max |<<hor v, eta_Q>>| and |A(hor v)|
  double connection_equivariance = 0;///< max |A(gR)(g v) - g A(R)(v)|
  double alpha_equivariance = 0;     ///< max |alpha_{g mu}(g R) - g . alpha_mu(R)| (body momenta)
};

ConnectionAxioms connection_axiom_sweep(const InertiaTensor& inertia, std::size_t samples,
                                        std::uint64_t seed, Execution exec);

/// Amended potential against H o alpha_mu, and the fibre minimum of the
/// kinetic energy. The full SO(3) fibre J^{-1}(mu) at R is the single point
/// R^T mu, so the minimum is sampled on the circle-isotropy fibre
/// {Pi : <R Pi, zeta> = mu_zeta}, an affine plane.
struct AmendedChecks {
  double closed_form_vs_h_alpha = 0;  ///< full action, max |V_mu - H(alpha_mu)|
  double circle_closed_form_vs_h_alpha = 0;
  double alpha_in_fibre = 0;          ///< max |R alpha_mu - mu| and |<R alpha, zeta> - mu_zeta|
  double fibre_minimum_gap = 0;       ///< max over configs of K(alpha) - min(sampled K), clipped at 0
  std::size_t fibre_samples = 0;      ///< per configuration
};

AmendedChecks amended_potential_sweep(const InertiaTensor& inertia, std::size_t configurations,
                                      std::size_t fibre_samples, std::uint64_t seed,
                                      Execution exec);

}  // namespace cotred
