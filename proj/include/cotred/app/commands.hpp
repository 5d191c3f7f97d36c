#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cotred/app/config.hpp"

namespace cotred::app {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int selftest_failed = 1;
inline constexpr int config_error = 2;
inline constexpr int numerical_failure = 3;
inline constexpr int tolerance_breach = 4;
inline constexpr int no_periodic_orbit = 5;
}  // namespace exit_code

struct RunOutcome {
  int exit_code = exit_code::ok;
  std::string status = "ok";
  std::string message;
  nlohmann::json report;           ///< phase / kaluza-compare payload
  nlohmann::json drift = nlohmann::json::object();
  double dt = 0.0;
  std::string integrator = "rk4";
};

/// Writes the trajectory CSV (17 significant digits) to `csv`.
RunOutcome simulate(const RunConfig& config, std::ostream& csv);
RunOutcome phase(const RunConfig& config);
RunOutcome kaluza_compare(const RunConfig& config);

/// Maps a library error onto an exit status.
int exit_code_for(const std::exception& e);

nlohmann::json make_manifest(const std::string& command, const nlohmann::json& config_echo,
                             const RunOutcome& outcome, double wall_seconds);

/// Loads the config, runs `command` (simulate | phase | kaluza-compare),
/// writes the outputs and the manifest, returns the exit status.
/// `manifest_path` overrides output.manifest; without either the manifest
/// goes next to the config as <stem>.manifest.json.
int execute(const std::string& command, const std::filesystem::path& config_path,
            const std::string& manifest_path, std::ostream& log);

/// Runs `command` over {"command": ..., "configs": [...]} in parallel and
/// writes the per-run outcomes, in config order, as a JSON array. Each entry
/// of "configs" is an inline config object or a path relative to the batch file.
int execute_batch(const std::filesystem::path& batch_path, const std::string& output_path,
                  std::ostream& log);

}  // namespace cotred::app
