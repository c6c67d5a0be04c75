#pragma once

// The three experiments on a chief/deputy formation: agreement of the two
// log-error computations, the gravity-mismatch bound, and closed-loop
// stabilization.

#include <string>
#include <vector>

#include "loglin/lie.hpp"
#include "loglin/sim/scenario.hpp"
#include "loglin/sim/table.hpp"

namespace loglin::sim {

/// Residual limits for the agreement run.
inline constexpr double kPositionResidualLimit = 4e-3;          // m
inline constexpr double kVelocityResidualLimit = 4e-6;          // m/s
inline constexpr double kAttitudeResidualLimit = 1e-11;         // rad
inline constexpr double kRelativeResidualLimitPercent = 1.6e-6; // %
/// Log error of the inversion-only run against xi' = A(t) xi, relative to |xi_lin(t)|.
inline constexpr double kInversionAgreementLimit = 1e-8;
/// Closed-loop log error against xi' = (A + B K) xi, relative to |xi(0)|.
inline constexpr double kClosedLoopAgreementLimit = 1e-6;
/// Random (state, error) pairs drawn for the bound dominance spot check.
inline constexpr int kDominanceSamples = 10000;

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
};

struct RunSummary {
  std::string scenario;
  Mode mode = Mode::validate;
  std::size_t samples = 0;
  long accepted_steps = 0;
  long rejected_steps = 0;

  double max_position_error_m = 0.0;
  double max_velocity_error_m_s = 0.0;
  double max_attitude_error_rad = 0.0;

  double max_residual_position_m = 0.0;
  double max_residual_velocity_m_s = 0.0;
  double max_residual_attitude_rad = 0.0;
  double max_relative_residual_percent = 0.0;

  double max_mismatch_m_s2 = 0.0;
  double max_pointwise_bound_m_s2 = 0.0;
  double global_bound_m_s2 = 0.0;
  double ratio_actual_to_global = 0.0;
  double max_pointwise_ratio = 0.0;

  double perigee_radius_m = 0.0;
  double min_reference_radius_m = 0.0;

  double max_inversion_deviation = 0.0;
  double max_closed_loop_deviation = 0.0;
  double closed_loop_decay_rate_per_s = 0.0;
  double final_closed_loop_error_norm = 0.0;

  double wall_time_s = 0.0;
  std::vector<Check> checks;

  [[nodiscard]] bool passed() const;
};

struct RunResult {
  RunSummary summary;
  Table table;
};

/// Chief and deputy states at t = 0.
struct FormationStart {
  GroupElement chief;
  GroupElement deputy;
};
FormationStart initial_states(const Scenario& sc);

/// Truth-model formation vs. integration of the log-error ODE along the chief.
/// Table columns: t_s, classical_*, log_*, delta_* for each of the nine coordinates.
RunResult run_validate(const Scenario& sc);

/// Actual gravity mismatch against its pointwise and global bounds.
/// Table columns: t_s, actual_mismatch_m_s2, pointwise_bound_m_s2, ratio.
RunResult run_bound(const Scenario& sc);

/// Inversion-only and closed-loop runs against their linear predictions.
RunResult run_stabilize(const Scenario& sc);

RunResult run_mode(const Scenario& sc, Mode mode);

/// Column names for the nine log-error coordinates with a prefix, e.g. log_pos_x.
std::vector<std::string> xi_columns(const std::string& prefix);

/// JSON rendering of a summary. Wall time is omitted unless requested so that
/// identical scenarios give identical files.
std::string summary_to_json(const RunSummary& s, bool include_wall_time = false);

/// Throws BoundViolation naming every failed check.
void require_passed(const RunSummary& s);

}  // namespace loglin::sim
