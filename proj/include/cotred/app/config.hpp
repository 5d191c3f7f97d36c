#pragma once

// Run configuration: a JSON document validated against a fixed schema.
// Unknown keys are rejected with the full key path in the message.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "cotred/liegroup.hpp"

namespace cotred::app {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SystemChoice { RigidBody, HeavyTop, Kaluza };

std::string to_string(SystemChoice s);

struct Tolerances {
  double return_tol = 1e-6;  ///< periodic-orbit closure
  double phase_tol = 1e-3;   ///< asserted phase residuals
  double drift_tol = 1e-6;   ///< relative conserved-quantity drift in simulate
  double gap_tol = 1e-8;     ///< Kaluza-Klein endpoint gaps
};

struct Outputs {
  std::string trajectory;  ///< CSV (simulate)
  std::string report;      ///< JSON (phase, kaluza-compare)
  std::string manifest;
};

struct TopSpec {
  double mass = 1.0;
  double gravity = 1.0;
  double length = 1.0;
  Vec3 com_direction = Vec3::UnitZ();
};

struct LagrangeSpec {
  double tilt = 0.5;
  double spin = 4.0;  ///< axial angular velocity Omega3 = Pi3 / I3
  double nutation = 0.0;
};

struct FieldSpec {
  std::string type = "uniform";  ///< uniform | gradient | abc
  Vec3 b = Vec3::UnitZ();        ///< uniform
  double b0 = 1.0;               ///< gradient
  double gradient = 0.0;         ///< gradient
  Vec3 abc = Vec3::Ones();       ///< abc coefficients
};

struct RunConfig {
  SystemChoice system = SystemChoice::RigidBody;
  double dt = 0.0;
  double t_max = 100.0;
  std::uint64_t seed = 0;
  Vec3 inertia = Vec3(3.0, 2.0, 1.0);

  // Initial condition.
  Vec3 pi = Vec3(1.0, 0.0, 0.0);
  std::optional<Vec3> gamma;  ///< heavy top; without it the Lagrange block is used
  Vec3 q = Vec3::Zero();
  Vec3 v = Vec3(1.0, 0.0, 0.0);

  TopSpec top;
  LagrangeSpec lagrange;
  double particle_mass = 1.0;
  double charge = 1.0;
  FieldSpec field;
  std::string gauge = "none";  ///< none | xy
  double periods = 10.0;
  std::size_t steps_per_period = 1000;
  std::size_t samples_per_period = 20000;

  Tolerances tolerances;
  Outputs output;
  nlohmann::json echo;  ///< the document as read
};

/// Throws ConfigError naming the offending field.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace cotred::app
