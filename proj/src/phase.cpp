#include "cotred/phase.hpp"

#include <cmath>
#include <limits>

namespace cotred {

const PhaseMethod& PhaseReport::method(const std::string& name) const {
  for (const auto& m : methods) {
    if (m.name == name) return m;
  }
  throw Error(ErrorCode::InvalidArgument, "no phase method named " + name);
}

double PhaseReport::max_asserted_residual() const {
  double worst = 0.0;
  for (const auto& m : methods) {
    if (m.asserted) worst = std::max(worst, m.residual);
  }
  return worst;
}

void finalize_report(PhaseReport& report) {
  const PhaseMethod* first = nullptr;
  const PhaseMethod* second = nullptr;
  for (auto& m : report.methods) {
    m.residual = std::isnan(m.total) ? std::numeric_limits<double>::quiet_NaN()
                                     : std::abs(wrap_angle(m.total - report.direct));
    if (!m.asserted) continue;
    if (!first) {
      first = &m;
    } else if (!second) {
      second = &m;
    }
  }
  report.form_agreement =
      (first && second) ? std::abs(wrap_angle(first->total - second->total)) : 0.0;
}

}  // namespace cotred
