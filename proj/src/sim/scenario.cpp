#include "loglin/sim/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "loglin/errors.hpp"

namespace loglin::sim {

namespace {

std::string fmt(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return {buf, end};
}

std::string fmt(const Vec3& v) {
  return "[" + fmt(v.x()) + ", " + fmt(v.y()) + ", " + fmt(v.z()) + "]";
}

double parse_double(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw std::invalid_argument("'" + key + "' must be a number");
  const std::string s = node.Scalar();
  double x = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("'" + key + "': cannot parse '" + s + "' as a number");
  }
  return x;
}

Vec3 parse_vec3(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() != 3) {
    throw std::invalid_argument("'" + key + "' must be a 3-element list");
  }
  return {parse_double(node[0], key), parse_double(node[1], key),
          parse_double(node[2], key)};
}

// Reads the keys of a mapping node, rejecting any not listed in `allowed`.
class Section {
 public:
  Section(const YAML::Node& node, std::string path, std::set<std::string> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) throw std::invalid_argument("'" + path_ + "' must be a mapping");
    for (const auto& kv : node_) {
      if (!kv.first.IsScalar()) throw std::invalid_argument("'" + path_ + "' has a non-scalar key");
      const std::string key = kv.first.Scalar();
      if (!allowed.contains(key)) {
        throw std::invalid_argument("unknown key '" + qualified(key) + "'");
      }
    }
  }

  [[nodiscard]] bool has(const std::string& key) const { return bool(node_[key]); }
  [[nodiscard]] YAML::Node child(const std::string& key) const { return node_[key]; }

  void read(const std::string& key, double& out) const {
    if (has(key)) out = parse_double(node_[key], qualified(key));
  }
  void read(const std::string& key, Vec3& out) const {
    if (has(key)) out = parse_vec3(node_[key], qualified(key));
  }
  void read(const std::string& key, std::string& out) const {
    if (!has(key)) return;
    if (!node_[key].IsScalar()) {
      throw std::invalid_argument("'" + qualified(key) + "' must be a scalar");
    }
    out = node_[key].Scalar();
  }
  void read(const std::string& key, std::uint64_t& out) const {
    if (!has(key)) return;
    std::string s;
    read(key, s);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw std::invalid_argument("'" + qualified(key) + "': cannot parse '" + s +
                                  "' as a non-negative integer");
    }
  }

  [[nodiscard]] std::string qualified(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  YAML::Node node_;
  std::string path_;
};

std::string method_name(Method m) { return m == Method::rk4 ? "rk4" : "adaptive45"; }

Method method_from_string(const std::string& s) {
  if (s == "rk4") return Method::rk4;
  if (s == "adaptive45") return Method::adaptive45;
  throw std::invalid_argument("unknown integrator method '" + s + "'");
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::validate:
      return "validate";
    case Mode::bound:
      return "bound";
    case Mode::stabilize:
      return "stabilize";
  }
  return "validate";
}

Mode mode_from_string(const std::string& s) {
  if (s == "validate") return Mode::validate;
  if (s == "bound") return Mode::bound;
  if (s == "stabilize") return Mode::stabilize;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

Vec3 ThrustProfile::acceleration(double t) const {
  if (max_accel_m_s2 == 0.0) return Vec3::Zero();
  return max_accel_m_s2 * std::sin(2.0 * std::numbers::pi * t / period_s + phase_rad) *
         axis;
}

double Scenario::orbit_period_s() const {
  return orbital_period(orbit.semi_major_axis_m, mu_m3_s2);
}

double Scenario::duration_s() const { return duration_orbits * orbit_period_s(); }

void Scenario::resolve_defaults() {
  if (chief_thrust.period_s == 0.0) chief_thrust.period_s = orbit_period_s() / 8.0;
}

void Scenario::validate() const {
  auto fail = [](const std::string& what) { throw DomainError(what); };
  if (!(mu_m3_s2 > 0.0)) fail("mu must be positive");
  if (!(orbit.eccentricity >= 0.0) || !(orbit.eccentricity < 1.0)) {
    fail("eccentricity must lie in [0, 1)");
  }
  if (!(orbit.semi_major_axis_m > 0.0)) fail("semi-major axis must be positive");
  const double rp = orbit.perigee_radius();
  if (!(rp > kGravityGuardRadius)) fail("perigee radius is inside the gravity guard radius");
  if (!(initial_offsets.position_m.norm() < rp)) {
    fail("initial position offset must be smaller than the perigee radius");
  }
  if (!(initial_offsets.attitude_rad.norm() < std::numbers::pi - kSingularityMargin)) {
    fail("initial attitude offset must be below pi");
  }
  if (!(duration_orbits > 0.0)) fail("duration must be positive");
  if (chief_thrust.type != "sinusoidal") fail("only sinusoidal thrust is supported");
  if (!(chief_thrust.max_accel_m_s2 >= 0.0)) fail("max_accel must be non-negative");
  if (!(chief_thrust.period_s > 0.0)) fail("thrust period must be positive");
  if (!(std::abs(chief_thrust.axis.norm() - 1.0) < 1e-12)) fail("thrust axis must be a unit vector");
  if (!(control_decay_rate_per_s > 0.0)) fail("control decay rate must be positive");
  for (const Vec3* v : {&omega_ref_rad_s, &omega_actual_rad_s, &initial_offsets.position_m,
                        &initial_offsets.velocity_m_s, &initial_offsets.attitude_rad}) {
    if (!v->allFinite()) fail("non-finite vector in scenario");
  }
  integrator.validate();
}

Scenario molniya_scenario() {
  Scenario sc;
  sc.name = "molniya";
  sc.mode = Mode::validate;
  sc.seed = 1;
  sc.mu_m3_s2 = kEarthMu;
  sc.orbit.semi_major_axis_m = 26521e3;
  sc.orbit.eccentricity = 0.74;
  sc.orbit.inclination_rad = 63.4 * std::numbers::pi / 180.0;
  sc.orbit.raan_rad = 0.0;
  sc.orbit.arg_perigee_rad = 270.0 * std::numbers::pi / 180.0;
  sc.orbit.true_anomaly_rad = 0.0;
  sc.duration_orbits = 2.0;
  sc.chief_thrust.max_accel_m_s2 = 0.002;
  sc.chief_thrust.axis = Vec3::UnitX();
  sc.chief_thrust.phase_rad = 1.529;
  sc.omega_ref_rad_s = Vec3(2e-4, 1e-4, 1e-4);
  sc.omega_actual_rad_s = sc.omega_ref_rad_s;
  const Vec3 diag = Vec3::Ones().normalized();
  sc.initial_offsets.position_m = 219.0 * diag;
  sc.initial_offsets.velocity_m_s = 0.22 * diag;
  sc.initial_offsets.attitude_rad = 0.05 * diag;
  sc.resolve_defaults();
  return sc;
}

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(std::string("scenario is not valid YAML: ") + e.what());
  }
  const Section top(root, "",
                    {"name", "mode", "seed", "mu_m3_s2", "orbit", "duration_orbits",
                     "chief_thrust", "omega_ref_rad_s", "omega_actual_rad_s",
                     "initial_offsets", "integrator", "control"});
  Scenario sc;
  top.read("name", sc.name);
  if (top.has("mode")) {
    std::string mode;
    top.read("mode", mode);
    sc.mode = mode_from_string(mode);
  }
  top.read("seed", sc.seed);
  top.read("mu_m3_s2", sc.mu_m3_s2);
  top.read("duration_orbits", sc.duration_orbits);
  top.read("omega_ref_rad_s", sc.omega_ref_rad_s);
  top.read("omega_actual_rad_s", sc.omega_actual_rad_s);

  if (top.has("orbit")) {
    const Section s(top.child("orbit"), "orbit",
                    {"semi_major_axis_m", "eccentricity", "inclination_rad", "raan_rad",
                     "arg_perigee_rad", "true_anomaly_rad"});
    s.read("semi_major_axis_m", sc.orbit.semi_major_axis_m);
    s.read("eccentricity", sc.orbit.eccentricity);
    s.read("inclination_rad", sc.orbit.inclination_rad);
    s.read("raan_rad", sc.orbit.raan_rad);
    s.read("arg_perigee_rad", sc.orbit.arg_perigee_rad);
    s.read("true_anomaly_rad", sc.orbit.true_anomaly_rad);
  }
  if (top.has("chief_thrust")) {
    const Section s(top.child("chief_thrust"), "chief_thrust",
                    {"type", "max_accel_m_s2", "period_s", "axis", "phase_rad"});
    s.read("type", sc.chief_thrust.type);
    s.read("max_accel_m_s2", sc.chief_thrust.max_accel_m_s2);
    s.read("period_s", sc.chief_thrust.period_s);
    s.read("axis", sc.chief_thrust.axis);
    s.read("phase_rad", sc.chief_thrust.phase_rad);
  }
  if (top.has("initial_offsets")) {
    const Section s(top.child("initial_offsets"), "initial_offsets",
                    {"position_m", "velocity_m_s", "attitude_rad"});
    s.read("position_m", sc.initial_offsets.position_m);
    s.read("velocity_m_s", sc.initial_offsets.velocity_m_s);
    s.read("attitude_rad", sc.initial_offsets.attitude_rad);
  }
  if (top.has("integrator")) {
    const Section s(top.child("integrator"), "integrator",
                    {"method", "fixed_dt_s", "rel_tol", "abs_tol", "max_dt_s", "min_dt_s",
                     "sample_dt_s"});
    if (s.has("method")) {
      std::string method;
      s.read("method", method);
      sc.integrator.method = method_from_string(method);
    }
    s.read("fixed_dt_s", sc.integrator.fixed_dt);
    s.read("rel_tol", sc.integrator.rel_tol);
    s.read("abs_tol", sc.integrator.abs_tol);
    s.read("max_dt_s", sc.integrator.max_dt);
    s.read("min_dt_s", sc.integrator.min_dt);
    s.read("sample_dt_s", sc.integrator.sample_dt);
  }
  if (top.has("control")) {
    const Section s(top.child("control"), "control", {"decay_rate_per_s"});
    s.read("decay_rate_per_s", sc.control_decay_rate_per_s);
  }
  sc.resolve_defaults();
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::string serialize_scenario(const Scenario& sc) {
  std::ostringstream os;
  os << "name: " << sc.name << "\n"
     << "mode: " << to_string(sc.mode) << "\n"
     << "seed: " << sc.seed << "\n"
     << "mu_m3_s2: " << fmt(sc.mu_m3_s2) << "\n"
     << "orbit:\n"
     << "  semi_major_axis_m: " << fmt(sc.orbit.semi_major_axis_m) << "\n"
     << "  eccentricity: " << fmt(sc.orbit.eccentricity) << "\n"
     << "  inclination_rad: " << fmt(sc.orbit.inclination_rad) << "\n"
     << "  raan_rad: " << fmt(sc.orbit.raan_rad) << "\n"
     << "  arg_perigee_rad: " << fmt(sc.orbit.arg_perigee_rad) << "\n"
     << "  true_anomaly_rad: " << fmt(sc.orbit.true_anomaly_rad) << "\n"
     << "duration_orbits: " << fmt(sc.duration_orbits) << "\n"
     << "chief_thrust:\n"
     << "  type: " << sc.chief_thrust.type << "\n"
     << "  max_accel_m_s2: " << fmt(sc.chief_thrust.max_accel_m_s2) << "\n"
     << "  period_s: " << fmt(sc.chief_thrust.period_s) << "\n"
     << "  axis: " << fmt(sc.chief_thrust.axis) << "\n"
     << "  phase_rad: " << fmt(sc.chief_thrust.phase_rad) << "\n"
     << "omega_ref_rad_s: " << fmt(sc.omega_ref_rad_s) << "\n"
     << "omega_actual_rad_s: " << fmt(sc.omega_actual_rad_s) << "\n"
     << "initial_offsets:\n"
     << "  position_m: " << fmt(sc.initial_offsets.position_m) << "\n"
     << "  velocity_m_s: " << fmt(sc.initial_offsets.velocity_m_s) << "\n"
     << "  attitude_rad: " << fmt(sc.initial_offsets.attitude_rad) << "\n"
     << "integrator:\n"
     << "  method: " << method_name(sc.integrator.method) << "\n"
     << "  fixed_dt_s: " << fmt(sc.integrator.fixed_dt) << "\n"
     << "  rel_tol: " << fmt(sc.integrator.rel_tol) << "\n"
     << "  abs_tol: " << fmt(sc.integrator.abs_tol) << "\n"
     << "  max_dt_s: " << fmt(sc.integrator.max_dt) << "\n"
     << "  min_dt_s: " << fmt(sc.integrator.min_dt) << "\n"
     << "  sample_dt_s: " << fmt(sc.integrator.sample_dt) << "\n"
     << "control:\n"
     << "  decay_rate_per_s: " << fmt(sc.control_decay_rate_per_s) << "\n";
  return os.str();
}

}  // namespace loglin::sim
