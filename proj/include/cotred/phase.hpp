#pragma once

#include <string>
#include <vector>

#include "cotred/liegroup.hpp"

namespace cotred {

/// One way of writing the reconstruction phase as geometric + dynamic.
/// NaN marks a term that the method does not compute.
struct PhaseMethod {
  std::string name;
  double total = 0.0;
  double geometric = 0.0;
  double dynamic = 0.0;
  double residual = 0.0;  ///< |wrap(total - direct)|, NaN when total is NaN
  bool asserted = true;   ///< false for diagnostic evaluations
};

struct PhaseReport {
  double direct = 0.0;  ///< phase from integrating the unreduced system
  std::vector<PhaseMethod> methods;
  double period = 0.0;
  double h_mu = 0.0;
  Vec3 mu = Vec3::Zero();   ///< spatial momentum (heavy top: mu k)
  double form_agreement = 0.0;  ///< |wrap(first asserted total - second asserted total)|

  const PhaseMethod& method(const std::string& name) const;
  /// Largest residual among asserted methods.
  double max_asserted_residual() const;
};

/// Fills residuals against `direct` and the first/second-form agreement.
void finalize_report(PhaseReport& report);

}  // namespace cotred
