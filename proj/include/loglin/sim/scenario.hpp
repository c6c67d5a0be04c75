#pragma once

// Experiment description and its YAML file format. All quantities are SI and
// keys carry their unit as a suffix (semi_major_axis_m, max_accel_m_s2, ...).

#include <cstdint>
#include <filesystem>
#include <string>

#include "loglin/dynamics.hpp"
#include "loglin/ode.hpp"
#include "loglin/sim/orbit.hpp"

namespace loglin::sim {

enum class Mode { validate, bound, stabilize };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& s);

/// Body-frame chief thrust a(t) = max_accel * sin(2 pi t / period + phase) * axis.
struct ThrustProfile {
  std::string type = "sinusoidal";
  double max_accel_m_s2 = 0.002;
  double period_s = 0.0;  // 0 selects orbital period / 8
  Vec3 axis = Vec3::UnitX();
  double phase_rad = 0.0;

  [[nodiscard]] Vec3 acceleration(double t) const;
  /// True when the profile is identically zero.
  [[nodiscard]] bool is_constant() const { return max_accel_m_s2 == 0.0; }
};

/// Deputy relative to chief at t = 0: p = p_ref + position, v = v_ref + velocity,
/// R = R_ref Exp(attitude). Position and velocity are inertial.
struct InitialOffsets {
  Vec3 position_m = Vec3::Zero();
  Vec3 velocity_m_s = Vec3::Zero();
  Vec3 attitude_rad = Vec3::Zero();
};

struct Scenario {
  std::string name = "scenario";
  Mode mode = Mode::validate;
  std::uint64_t seed = 1;
  double mu_m3_s2 = kEarthMu;
  OrbitElements orbit;
  double duration_orbits = 2.0;
  ThrustProfile chief_thrust;
  Vec3 omega_ref_rad_s = Vec3::Zero();
  Vec3 omega_actual_rad_s = Vec3::Zero();
  InitialOffsets initial_offsets;
  IntegratorConfig integrator;
  double control_decay_rate_per_s = 0.01;  // stabilize mode

  [[nodiscard]] double orbit_period_s() const;
  [[nodiscard]] double duration_s() const;
  [[nodiscard]] GravityModel gravity() const { return {mu_m3_s2}; }

  /// Fills defaults that depend on other fields (thrust period). Idempotent.
  void resolve_defaults();

  /// Throws DomainError / std::invalid_argument for invalid scenarios.
  void validate() const;
};

/// The highly elliptical chief/deputy formation used throughout the examples.
Scenario molniya_scenario();

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

/// Canonical YAML text: fixed key order, shortest round-trip number formatting.
std::string serialize_scenario(const Scenario& sc);

}  // namespace loglin::sim
