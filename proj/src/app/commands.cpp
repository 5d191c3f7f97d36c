#include "cotred/app/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cotred/batch.hpp"
#include "cotred/heavytop.hpp"
#include "cotred/kaluza.hpp"
#include "cotred/rigidbody.hpp"

namespace cotred::app {

using nlohmann::json;

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_row(std::ostream& os, std::initializer_list<double> head, const Eigen::VectorXd& mid,
               std::initializer_list<double> tail) {
  bool first = true;
  auto put = [&](double x) {
    if (!first) os << ',';
    os << fmt17(x);
    first = false;
  };
  for (double x : head) put(x);
  for (Eigen::Index i = 0; i < mid.size(); ++i) put(mid(i));
  for (double x : tail) put(x);
  os << '\n';
}

double relative(double value, double reference) {
  const double scale = std::abs(reference) > 1e-12 ? std::abs(reference) : 1.0;
  return std::abs(value - reference) / scale;
}

json vec_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

InertiaTensor inertia_of(const RunConfig& c) {
  return InertiaTensor(c.inertia(0), c.inertia(1), c.inertia(2));
}

heavytop::Params top_params(const RunConfig& c) {
  heavytop::Params p;
  p.inertia = inertia_of(c);
  p.mass = c.top.mass;
  p.gravity = c.top.gravity;
  p.length = c.top.length;
  p.com_direction = c.top.com_direction;
  p.validate();
  return p;
}

kaluza::MagneticField field_of(const RunConfig& c) {
  const FieldSpec& f = c.field;
  kaluza::MagneticField field = (f.type == "gradient") ? kaluza::MagneticField::gradient(f.b0, f.gradient)
                                : (f.type == "abc")
                                    ? kaluza::MagneticField::abc(f.abc(0), f.abc(1), f.abc(2))
                                    : kaluza::MagneticField::uniform(f.b);
  return c.gauge == "xy" ? field.with_xy_gauge() : field;
}

// Heavy-top initial state: explicit (Pi, Gamma) or a Lagrange-top orbit.
struct TopStart {
  heavytop::HeavyTopState state;
  std::optional<heavytop::LagrangeOrbit> lagrange;
};

TopStart top_start(const RunConfig& c, const heavytop::Params& p) {
  if (c.gamma) {
    if (std::abs(c.gamma->norm() - 1.0) > 1e-9) {
      throw ConfigError("'initial.gamma' must be a unit vector");
    }
    return {{c.pi, *c.gamma}, std::nullopt};
  }
  const auto orbit = heavytop::lagrange_periodic_ic(p, c.lagrange.tilt, c.lagrange.spin,
                                                    c.lagrange.nutation, c.tolerances.return_tol);
  return {orbit.start, orbit};
}

void breach_if(RunOutcome& out, bool breached, const std::string& what) {
  if (breached && out.exit_code == exit_code::ok) {
    out.exit_code = exit_code::tolerance_breach;
    out.status = "tolerance_breach";
    out.message = what;
  }
}

json report_json(const std::string& system, const PhaseReport& r) {
  json j;
  j["system"] = system;
  j["phase_total_direct"] = r.direct;
  json method = json::array(), total = json::array(), geo = json::array(), dyn = json::array(),
       res = json::array(), asserted = json::array();
  for (const auto& m : r.methods) {
    method.push_back(m.name);
    total.push_back(m.total);
    geo.push_back(m.geometric);
    dyn.push_back(m.dynamic);
    res.push_back(m.residual);
    asserted.push_back(m.asserted);
  }
  j["method"] = method;
  j["phase_total_formula"] = total;
  j["phase_geometric"] = geo;
  j["phase_dynamic"] = dyn;
  j["residual"] = res;
  j["asserted"] = asserted;
  j["period"] = r.period;
  j["mu"] = vec_json(r.mu);
  j["h_mu"] = r.h_mu;
  j["form_agreement"] = r.form_agreement;
  j["max_asserted_residual"] = r.max_asserted_residual();
  return j;
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return exit_code::config_error;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case ErrorCode::InvalidArgument:
      case ErrorCode::InvalidInertia:
      case ErrorCode::DegenerateInertia:
        return exit_code::config_error;
      case ErrorCode::NoReturn:
      case ErrorCode::NotClosed:
      case ErrorCode::NoPrecessionRoot:
        return exit_code::no_periodic_orbit;
      default:
        return exit_code::numerical_failure;
    }
  }
  return exit_code::numerical_failure;
}

RunOutcome simulate(const RunConfig& c, std::ostream& csv) {
  RunOutcome out;
  out.dt = c.dt;
  switch (c.system) {
    case SystemChoice::RigidBody: {
      const InertiaTensor inertia = inertia_of(c);
      const rigidbody::FullState start{Rotation(), BodyMomentum(c.pi)};
      const Trajectory traj = rigidbody::integrate_full(start, inertia, c.t_max, c.dt);
      const double h0 = rigidbody::hamiltonian(start.pi, inertia);
      const double c0 = c.pi.squaredNorm();
      const Vec3 mu = c.pi;
      double dh = 0, dc = 0, dmu = 0;
      csv << "t,R11,R12,R13,R21,R22,R23,R31,R32,R33,Pi1,Pi2,Pi3,energy,casimir,spatial_mu_err\n";
      for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto s = rigidbody::unpack(traj.states[k]);
        const double h = rigidbody::hamiltonian(s.pi, inertia);
        const double cas = s.pi.value.squaredNorm();
        const double err = (s.attitude * s.pi.value - mu).norm();
        dh = std::max(dh, relative(h, h0));
        dc = std::max(dc, relative(cas, c0));
        dmu = std::max(dmu, err);
        write_row(csv, {traj.times[k]}, traj.states[k], {h, cas, err});
      }
      out.drift = {{"energy", dh}, {"casimir", dc}, {"spatial_momentum", dmu}};
      breach_if(out, dh > c.tolerances.drift_tol || dc > c.tolerances.drift_tol ||
                         dmu > c.tolerances.drift_tol,
                "conserved-quantity drift beyond drift_tol");
      break;
    }
    case SystemChoice::HeavyTop: {
      const heavytop::Params p = top_params(c);
      const TopStart start = top_start(c, p);
      const Trajectory traj =
          rk4_integrate(heavytop::reduced_flow(p), heavytop::pack(start.state), 0.0, c.t_max, c.dt);
      const double h0 = heavytop::hamiltonian(start.state, p);
      const double c10 = heavytop::casimir_momentum(start.state);
      const double c20 = heavytop::casimir_gamma(start.state);
      double dh = 0, d1 = 0, d2 = 0;
      csv << "t,Pi1,Pi2,Pi3,Gamma1,Gamma2,Gamma3,energy,casimir1,casimir2\n";
      for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto s = heavytop::unpack(traj.states[k]);
        const double h = heavytop::hamiltonian(s, p);
        const double c1 = heavytop::casimir_momentum(s);
        const double c2 = heavytop::casimir_gamma(s);
        dh = std::max(dh, relative(h, h0));
        d1 = std::max(d1, relative(c1, c10));
        d2 = std::max(d2, relative(c2, c20));
        write_row(csv, {traj.times[k]}, traj.states[k], {h, c1, c2});
      }
      out.drift = {{"energy", dh}, {"casimir1", d1}, {"casimir2", d2}};
      breach_if(out, dh > c.tolerances.drift_tol || d1 > c.tolerances.drift_tol ||
                         d2 > c.tolerances.drift_tol,
                "conserved-quantity drift beyond drift_tol");
      break;
    }
    case SystemChoice::Kaluza: {
      const auto field = field_of(c);
      const double m = c.particle_mass;
      State y0(6);
      y0 << c.q, m * c.v;
      const Trajectory traj =
          rk4_integrate(kaluza::lorentz_flow(field, c.charge, m), y0, 0.0, c.t_max, c.dt);
      const double e0 = 0.5 * y0.tail<3>().squaredNorm() / m;
      double de = 0;
      csv << "t,qx,qy,qz,px,py,pz,energy\n";
      for (std::size_t k = 0; k < traj.size(); ++k) {
        const double e = 0.5 * traj.states[k].tail<3>().squaredNorm() / m;
        de = std::max(de, relative(e, e0));
        write_row(csv, {traj.times[k]}, traj.states[k], {e});
      }
      out.drift = {{"energy", de}};
      breach_if(out, de > c.tolerances.drift_tol, "kinetic energy drift beyond drift_tol");
      break;
    }
  }
  return out;
}

RunOutcome phase(const RunConfig& c) {
  RunOutcome out;
  switch (c.system) {
    case SystemChoice::RigidBody: {
      const InertiaTensor inertia = inertia_of(c);
      const BodyMomentum pi(c.pi);
      if (rigidbody::euler_rhs(pi, inertia).norm() <= 1e-12 * std::max(1.0, c.pi.squaredNorm())) {
        throw Error(ErrorCode::NoReturn, "initial momentum is a relative equilibrium");
      }
      rigidbody::OrbitSearch search;
      search.search_dt = c.dt;
      search.t_max = c.t_max;
      search.return_tol = c.tolerances.return_tol;
      search.samples_per_period = c.samples_per_period;
      const auto orbit = rigidbody::find_periodic_orbit(pi, inertia, search);
      const PhaseReport r = rigidbody::rigid_body_phase_report(orbit, inertia);
      out.dt = orbit.dt;
      out.report = report_json("rigid-body", r);
      out.drift = {{"orbit_closure", (orbit.body_momentum.back() - orbit.body_momentum.front()).norm()}};
      breach_if(out, !(r.max_asserted_residual() <= c.tolerances.phase_tol),
                "phase residual beyond phase_tol");
      break;
    }
    case SystemChoice::HeavyTop: {
      const heavytop::Params p = top_params(c);
      const TopStart start = top_start(c, p);
      const double period =
          start.lagrange ? start.lagrange->period
                         : detect_period(heavytop::reduced_flow(p), heavytop::pack(start.state), c.dt,
                                         c.t_max, c.tolerances.return_tol);
      const auto orbit = heavytop::sample_orbit(start.state, period, p, c.samples_per_period);
      const PhaseReport r = heavytop::phase_report(orbit, p);
      out.dt = orbit.dt;
      out.report = report_json("heavy-top", r);
      if (start.lagrange) {
        out.report["lagrange"] = {{"axial_momentum", start.lagrange->axial_momentum},
                                  {"precession_rate", start.lagrange->precession_rate},
                                  {"steady", start.lagrange->steady}};
      }
      out.drift = {{"orbit_closure",
                    (heavytop::pack(orbit.states.back()) - heavytop::pack(orbit.states.front())).norm()}};
      breach_if(out, !(r.max_asserted_residual() <= c.tolerances.phase_tol),
                "phase residual beyond phase_tol");
      break;
    }
    case SystemChoice::Kaluza:
      throw ConfigError("the phase command needs system rigid-body or heavy-top");
  }
  return out;
}

RunOutcome kaluza_compare(const RunConfig& c) {
  if (c.system != SystemChoice::Kaluza) {
    throw ConfigError("the kaluza-compare command needs system kaluza");
  }
  RunOutcome out;
  const auto field = field_of(c);
  kaluza::ComparisonConfig cc;
  cc.mass = c.particle_mass;
  cc.charge = c.charge;
  cc.q0 = c.q;
  cc.v0 = c.v;
  cc.periods = c.periods;
  cc.steps_per_period = c.steps_per_period;
  const kaluza::Comparison r = kaluza::compare(field, cc);
  out.dt = r.dt;
  out.report = {{"field", field.name()},
                {"cyclotron_period", r.cyclotron_period},
                {"dt", r.dt},
                {"duration", r.duration},
                {"answer1_vs_lorentz", r.answer1_vs_lorentz},
                {"answer1_vs_answer2_shifted", r.answer1_vs_answer2},
                {"kk_reduced_vs_lorentz", r.kk_vs_lorentz},
                {"gauge_position_gap", r.gauge_position_gap},
                {"free_flight_gap", r.free_flight_gap},
                {"cyclotron_radius", r.cyclotron_radius},
                {"cyclotron_radius_expected", r.cyclotron_radius_expected},
                {"cyclotron_radius_rel_error", r.cyclotron_radius_error},
                {"speed_drift", r.speed_drift},
                {"charge_drift", r.charge_drift},
                {"kk_energy_offset_error", r.kk_energy_offset_error}};
  out.drift = {{"speed", r.speed_drift}, {"charge", r.charge_drift}};
  const double tol = c.tolerances.gap_tol;
  breach_if(out, !(r.answer1_vs_answer2 <= tol && r.kk_vs_lorentz <= tol &&
                   r.gauge_position_gap <= tol),
            "endpoint gap beyond gap_tol");
  return out;
}

json make_manifest(const std::string& command, const json& config_echo, const RunOutcome& outcome,
                   double wall_seconds) {
  return {{"artifact", "cotred"},
          {"version", COTRED_VERSION},
          {"command", command},
          {"config", config_echo},
          {"integrator", {{"name", outcome.integrator}, {"dt", outcome.dt}}},
          {"drift", outcome.drift},
          {"status", outcome.status},
          {"exit_code", outcome.exit_code},
          {"message", outcome.message},
          {"wall_clock_seconds", wall_seconds}};
}

namespace {

std::filesystem::path beside(const std::filesystem::path& config_path, const std::string& suffix) {
  auto p = config_path;
  p.replace_filename(config_path.stem().string() + suffix);
  return p;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text;
}

// Runs one command on a parsed config and writes its primary output.
RunOutcome run_one(const std::string& command, const RunConfig& config,
                   const std::filesystem::path& config_path) {
  if (command == "simulate") {
    const auto path = config.output.trajectory.empty() ? beside(config_path, ".csv")
                                                       : std::filesystem::path(config.output.trajectory);
    std::ofstream csv(path);
    if (!csv) throw ConfigError("cannot write " + path.string());
    RunOutcome out = simulate(config, csv);
    if (out.message.empty()) out.message = "trajectory written to " + path.string();
    return out;
  }
  RunOutcome out;
  if (command == "phase") {
    out = phase(config);
  } else if (command == "kaluza-compare") {
    out = kaluza_compare(config);
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  const auto path = config.output.report.empty() ? beside(config_path, ".report.json")
                                                 : std::filesystem::path(config.output.report);
  write_text(path, out.report.dump(2) + "\n");
  if (out.message.empty()) out.message = "report written to " + path.string();
  return out;
}

RunOutcome guarded(const std::string& command, const RunConfig* config,
                   const std::filesystem::path& config_path) {
  try {
    if (!config) throw ConfigError("no configuration");
    return run_one(command, *config, config_path);
  } catch (const std::exception& e) {
    RunOutcome out;
    out.exit_code = exit_code_for(e);
    out.status = out.exit_code == exit_code::config_error      ? "config_error"
                 : out.exit_code == exit_code::no_periodic_orbit ? "no_periodic_orbit"
                                                                 : "numerical_failure";
    out.message = e.what();
    return out;
  }
}

}  // namespace

int execute(const std::string& command, const std::filesystem::path& config_path,
            const std::string& manifest_path, std::ostream& log) {
  const auto started = std::chrono::steady_clock::now();
  std::optional<RunConfig> config;
  json echo = nullptr;
  RunOutcome outcome;
  try {
    config = load_config(config_path);
    echo = config->echo;
  } catch (const std::exception& e) {
    outcome.exit_code = exit_code::config_error;
    outcome.status = "config_error";
    outcome.message = e.what();
  }
  if (config) outcome = guarded(command, &*config, config_path);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  std::filesystem::path manifest = !manifest_path.empty()                      ? manifest_path
                                   : (config && !config->output.manifest.empty()) ? config->output.manifest
                                                                                  : beside(config_path, ".manifest.json").string();
  json m = make_manifest(command, echo, outcome, seconds);
  m["config_path"] = config_path.string();
  try {
    write_text(manifest, m.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    if (outcome.exit_code == exit_code::ok) outcome.exit_code = exit_code::config_error;
  }
  log << outcome.status << ": " << outcome.message << '\n';
  return outcome.exit_code;
}

int execute_batch(const std::filesystem::path& batch_path, const std::string& output_path,
                  std::ostream& log) {
  json doc;
  std::string command;
  try {
    std::ifstream in(batch_path);
    if (!in) throw ConfigError("cannot open batch file " + batch_path.string());
    doc = json::parse(in, nullptr, true, true);
    if (!doc.is_object() || !doc.contains("command") || !doc.contains("configs") ||
        !doc["command"].is_string() || !doc["configs"].is_array() || doc.size() != 2) {
      throw ConfigError("batch file must be {\"command\": string, \"configs\": [...]}");
    }
    command = doc["command"].get<std::string>();
  } catch (const std::exception& e) {
    log << "config_error: " << e.what() << '\n';
    return exit_code::config_error;
  }

  const json& configs = doc["configs"];
  const auto results = parallel_map(
      configs.size(),
      [&](std::size_t i) {
        const auto started = std::chrono::steady_clock::now();
        RunOutcome out;
        json echo = configs[i];
        try {
          // A string entry names a config file relative to the batch file.
          const RunConfig config = configs[i].is_string()
                                       ? load_config(batch_path.parent_path() / configs[i].get<std::string>())
                                       : parse_config(configs[i]);
          echo = config.echo;
          const auto stem = batch_path.parent_path() /
                            (batch_path.stem().string() + "_" + std::to_string(i) + ".json");
          out = guarded(command, &config, stem);
        } catch (const std::exception& e) {
          out.exit_code = exit_code_for(e);
          out.status = "config_error";
          out.message = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        json entry = make_manifest(command, echo, out, seconds);
        entry["index"] = i;
        entry["report"] = out.report;
        return entry;
      },
      Execution::Parallel);

  int code = exit_code::ok;
  json merged = json::array();
  for (const auto& entry : results) {
    merged.push_back(entry);
    if (code == exit_code::ok) code = entry["exit_code"].get<int>();
  }
  const std::filesystem::path out_path =
      output_path.empty() ? beside(batch_path, ".results.json") : std::filesystem::path(output_path);
  try {
    write_text(out_path, merged.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_code::config_error;
  }
  log << "batch of " << configs.size() << " runs written to " << out_path.string() << '\n';
  return code;
}

}  // namespace cotred::app
