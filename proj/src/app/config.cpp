#include "cotred/app/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace cotred::app {

using nlohmann::json;

std::string to_string(SystemChoice s) {
  switch (s) {
    case SystemChoice::RigidBody:
      return "rigid-body";
    case SystemChoice::HeavyTop:
      return "heavy-top";
    case SystemChoice::Kaluza:
      return "kaluza";
  }
  return "unknown";
}

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("'" + path + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw ConfigError("unknown key '" + join(path, key) + "'");
  }
}

double number(const json& obj, const std::string& path, const char* key, double fallback,
              bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError("missing required field '" + join(path, key) + "'");
    return fallback;
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("'" + join(path, key) + "' must be a number");
  return v.get<double>();
}

double positive(const json& obj, const std::string& path, const char* key, double fallback,
                bool required = false) {
  const double v = number(obj, path, key, fallback, required);
  if (!(v > 0.0)) throw ConfigError("'" + join(path, key) + "' must be positive");
  return v;
}

Vec3 vec3(const json& obj, const std::string& path, const char* key, const Vec3& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3) {
    throw ConfigError("'" + join(path, key) + "' must be an array of three numbers");
  }
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw ConfigError("'" + join(path, key) + "' must contain numbers");
    out(i) = v[i].get<double>();
  }
  return out;
}

std::string text(const json& obj, const std::string& path, const char* key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ConfigError("'" + join(path, key) + "' must be a string");
  return obj.at(key).get<std::string>();
}

std::size_t count(const json& obj, const std::string& path, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw ConfigError("'" + join(path, key) + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

RunConfig parse_config(const json& doc) {
  check_keys(doc, "", {"system", "dt", "t_max", "seed", "inertia", "initial", "top", "lagrange",
                       "particle", "field", "gauge", "kaluza", "phase", "tolerances", "output"});
  RunConfig c;
  c.echo = doc;

  const std::string system = text(doc, "", "system", "");
  if (system.empty()) throw ConfigError("missing required field 'system'");
  if (system == "rigid-body") {
    c.system = SystemChoice::RigidBody;
  } else if (system == "heavy-top") {
    c.system = SystemChoice::HeavyTop;
  } else if (system == "kaluza") {
    c.system = SystemChoice::Kaluza;
  } else {
    throw ConfigError("'system' must be rigid-body, heavy-top or kaluza (got '" + system + "')");
  }

  c.dt = positive(doc, "", "dt", 0.0, true);
  c.t_max = positive(doc, "", "t_max", c.t_max);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  c.inertia = vec3(doc, "", "inertia", c.inertia);
  if (!(c.inertia(0) >= c.inertia(1) && c.inertia(1) >= c.inertia(2) && c.inertia(2) > 0.0)) {
    throw ConfigError("'inertia' must satisfy I1 >= I2 >= I3 > 0");
  }

  if (doc.contains("initial")) {
    const json& s = doc["initial"];
    check_keys(s, "initial", {"pi", "gamma", "q", "v"});
    c.pi = vec3(s, "initial", "pi", c.pi);
    if (s.contains("gamma")) c.gamma = vec3(s, "initial", "gamma", Vec3::UnitZ());
    c.q = vec3(s, "initial", "q", c.q);
    c.v = vec3(s, "initial", "v", c.v);
  }
  if (doc.contains("top")) {
    const json& s = doc["top"];
    check_keys(s, "top", {"mass", "gravity", "length", "com_direction"});
    c.top.mass = positive(s, "top", "mass", c.top.mass);
    c.top.gravity = positive(s, "top", "gravity", c.top.gravity);
    c.top.length = positive(s, "top", "length", c.top.length);
    c.top.com_direction = vec3(s, "top", "com_direction", c.top.com_direction);
    if (std::abs(c.top.com_direction.norm() - 1.0) > 1e-12) {
      throw ConfigError("'top.com_direction' must be a unit vector");
    }
  }
  if (doc.contains("lagrange")) {
    const json& s = doc["lagrange"];
    check_keys(s, "lagrange", {"tilt", "spin", "nutation"});
    c.lagrange.tilt = number(s, "lagrange", "tilt", c.lagrange.tilt);
    c.lagrange.spin = number(s, "lagrange", "spin", c.lagrange.spin);
    c.lagrange.nutation = number(s, "lagrange", "nutation", c.lagrange.nutation);
  }
  if (doc.contains("particle")) {
    const json& s = doc["particle"];
    check_keys(s, "particle", {"mass", "charge"});
    c.particle_mass = positive(s, "particle", "mass", c.particle_mass);
    c.charge = number(s, "particle", "charge", c.charge);
  }
  if (doc.contains("field")) {
    const json& s = doc["field"];
    check_keys(s, "field", {"type", "b", "b0", "gradient", "abc"});
    c.field.type = text(s, "field", "type", c.field.type);
    if (c.field.type != "uniform" && c.field.type != "gradient" && c.field.type != "abc") {
      throw ConfigError("'field.type' must be uniform, gradient or abc");
    }
    c.field.b = vec3(s, "field", "b", c.field.b);
    c.field.b0 = number(s, "field", "b0", c.field.b0);
    c.field.gradient = number(s, "field", "gradient", c.field.gradient);
    c.field.abc = vec3(s, "field", "abc", c.field.abc);
  }
  c.gauge = text(doc, "", "gauge", c.gauge);
  if (c.gauge != "none" && c.gauge != "xy") throw ConfigError("'gauge' must be none or xy");
  if (doc.contains("kaluza")) {
    const json& s = doc["kaluza"];
    check_keys(s, "kaluza", {"periods", "steps_per_period"});
    c.periods = positive(s, "kaluza", "periods", c.periods);
    c.steps_per_period = count(s, "kaluza", "steps_per_period", c.steps_per_period);
  }
  if (doc.contains("phase")) {
    const json& s = doc["phase"];
    check_keys(s, "phase", {"samples_per_period"});
    c.samples_per_period = count(s, "phase", "samples_per_period", c.samples_per_period);
  }
  if (doc.contains("tolerances")) {
    const json& s = doc["tolerances"];
    check_keys(s, "tolerances", {"return_tol", "phase_tol", "drift_tol", "gap_tol"});
    c.tolerances.return_tol = positive(s, "tolerances", "return_tol", c.tolerances.return_tol);
    c.tolerances.phase_tol = positive(s, "tolerances", "phase_tol", c.tolerances.phase_tol);
    c.tolerances.drift_tol = positive(s, "tolerances", "drift_tol", c.tolerances.drift_tol);
    c.tolerances.gap_tol = positive(s, "tolerances", "gap_tol", c.tolerances.gap_tol);
  }
  if (doc.contains("output")) {
    const json& s = doc["output"];
    check_keys(s, "output", {"trajectory", "report", "manifest"});
    c.output.trajectory = text(s, "output", "trajectory", "");
    c.output.report = text(s, "output", "report", "");
    c.output.manifest = text(s, "output", "manifest", "");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace cotred::app
