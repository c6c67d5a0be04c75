// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <Eigen/Geometry>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "loglin/dynamics.hpp"
#include "loglin/integrate.hpp"
#include "loglin/sim/orbit.hpp"
#include "loglin/sim/runs.hpp"
#include "loglin/sim/scenario.hpp"
#include "property_checks.hpp"

using namespace loglin;
using namespace loglin::sim;
using namespace loglin::testing;

namespace {

struct Item {
  std::string what;
  bool ok;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

bool within(double x, double target, double rel) { return std::abs(x - target) <= rel * target; }

int failures = 0;

void criterion(int n, const std::string& title, const std::vector<Item>& items) {
  bool all = true;
  for (const Item& i : items) all = all && i.ok;
  if (!all) ++failures;
  std::printf("[%s] criterion %d: %s\n", all ? "PASS" : "FAIL", n, title.c_str());
  for (const Item& i : items) {
    std::printf("       %s %-34s %s\n", i.ok ? "ok  " : "FAIL", i.what.c_str(), i.detail.c_str());
  }
}

}  // namespace

int main() {
  const Scenario sc = load_scenario(std::filesystem::path(LOGLIN_SCENARIO_DIR) / "molniya.scenario");

  // 1. Classical and log-error propagation agree.
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult val = run_validate(sc);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const RunSummary& v = val.summary;
  criterion(1, "validation agreement over two orbits",
            {{"relative residual", v.max_relative_residual_percent <= 1.6e-6,
              fmt("%.3e %% (<= 1.6e-6 %%)", v.max_relative_residual_percent)},
             {"position residual", v.max_residual_position_m < 4e-3,
              fmt("%.3e m (< 4e-3)", v.max_residual_position_m)},
             {"velocity residual", v.max_residual_velocity_m_s < 4e-6,
              fmt("%.3e m/s (< 4e-6)", v.max_residual_velocity_m_s)},
             {"attitude residual", v.max_residual_attitude_rad < 1e-11,
              fmt("%.3e rad (< 1e-11)", v.max_residual_attitude_rad)},
             {"runtime", seconds < 60.0, fmt("%.2f s (< 60)", seconds)}});

  // 2. Open-loop error growth.
  double rot_dev = 0.0;
  const std::size_t rx = val.table.column_index("classical_rot_x");
  for (const auto& row : val.table.rows) {
    rot_dev = std::max(rot_dev, std::abs(std::hypot(row[rx], row[rx + 1], row[rx + 2]) - 0.05));
  }
  criterion(2, "error growth magnitudes",
            {{"max |xi_p|", v.max_position_error_m >= 2.3e6 && v.max_position_error_m <= 2.5e6,
              fmt("%.2f km (in [2300, 2500])", v.max_position_error_m / 1e3)},
             {"max |xi_v|",
              v.max_velocity_error_m_s >= 1.9e3 && v.max_velocity_error_m_s <= 2.05e3,
              fmt("%.4f km/s (in [1.9, 2.05])", v.max_velocity_error_m_s / 1e3)},
             {"|xi_R| constant", rot_dev <= 1e-10, fmt("max | |xi_R| - 0.05 | = %.3e rad", rot_dev)}});

  // 3. Gravity mismatch bounds.
  const RunSummary b = run_bound(sc).summary;
  criterion(3, "gravity mismatch bound",
            {{"pointwise ratio < 1", b.max_pointwise_ratio < 1.0,
              fmt("max %.5f", b.max_pointwise_ratio)},
             {"max actual mismatch", within(b.max_mismatch_m_s2, 2.85, 0.05),
              fmt("%.4f m/s^2 (2.85 +- 5%%)", b.max_mismatch_m_s2)},
             {"max pointwise bound", within(b.max_pointwise_bound_m_s2, 10.1, 0.05),
              fmt("%.4f m/s^2 (10.1 +- 5%%)", b.max_pointwise_bound_m_s2)},
             {"global bound", within(b.global_bound_m_s2, 11.6, 0.02),
              fmt("%.4f m/s^2 (11.6 +- 2%%)", b.global_bound_m_s2)},
             {"actual / global", std::abs(b.ratio_actual_to_global - 0.25) <= 0.02,
              fmt("%.4f (0.25 +- 0.02)", b.ratio_actual_to_global)}});

  // 4. Dynamic inversion leaves the linear error system.
  const RunSummary s = run_stabilize(sc).summary;
  criterion(4, "exact cancellation under dynamic inversion",
            {{"relative deviation from xi' = A xi", s.max_inversion_deviation <= 1e-8,
              fmt("%.3e (<= 1e-8)", s.max_inversion_deviation)}});

  // 5. Coupling identity.
  const auto comm = coupling_commutator_check(10000, 5);
  criterion(5, "coupling commutator identity on 1e4 random xi",
            {{"|vee(xi^ C - C xi^) - A_C xi|", comm.identity_error <= 1e-15,
              fmt("%.3e (<= 1e-15)", comm.identity_error)},
             {"|C xi^|", comm.c_wedge_max == 0.0, fmt("%.3e (== 0)", comm.c_wedge_max)}});

  // 6. Structural property suites.
  const auto rt = exp_log_round_trips(1000, 6);
  const double ad = adjoint_exponential_check(1000, 7);
  const double mixed = mixed_invariant_check(1000, 8);
  const auto grav = gravity_term_checks(10000, 9);
  const double jn = inverse_jacobian_norm_check(100, 20, 10);
  criterion(6, "structural properties",
            {{"Exp/Log round trip", rt.so3 <= 1e-9 && rt.se23 <= 1e-9,
              fmt("SO(3) %.2e, SE2(3) %.2e (<= 1e-9)", rt.so3, rt.se23)},
             {"Ad of Exp = exp of ad", ad <= 1e-10, fmt("%.3e (<= 1e-10)", ad)},
             {"mixed-invariant = classical", mixed <= 1e-12, fmt("%.3e (<= 1e-12)", mixed)},
             {"gravity term velocity-slot only", grav.off_slot_max == 0.0,
              fmt("%.3e (== 0)", grav.off_slot_max)},
             {"bound dominance, 1e4 pairs", grav.worst_ratio < 1.0,
              fmt("max ratio %.5f (< 1)", grav.worst_ratio)},
             {"inverse Jacobian norm bound", jn <= 1e-12,
              fmt("max relative excess %.3e (<= 1e-12)", jn)},
             {"d <= |xi_p|, 1e4 pairs", grav.d_excess <= 1e-12,
              fmt("max (d - |xi_p|)/|xi_p| = %.3e", grav.d_excess)}});

  // 7. Zero-mismatch block structure.
  const double blocks = block_structure_check(10000, 11);
  criterion(7, "zero-mismatch block equations",
            {{"error_rhs vs block equations", blocks <= 1e-12, fmt("%.3e (<= 1e-12)", blocks)}});

  // 8. Two-body conservation.
  const GravityModel model = sc.gravity();
  const CartesianState c0 = elements_to_state(sc.orbit, model.mu);
  GroupElement X0;
  X0.p = c0.p;
  X0.v = c0.v;
  const ClassicalRun coast = propagate_classical(
      X0, [](double, const GroupElement&) { return BodyInput{}; }, model, IntegratorConfig{},
      2.0 * sc.orbit_period_s());
  const double E0 = specific_energy(c0.p, c0.v, model);
  const Vec3 h0 = c0.p.cross(c0.v);
  double dE = 0.0, dh = 0.0;
  for (const auto& smp : coast.samples) {
    dE = std::max(dE, std::abs(specific_energy(smp.X.p, smp.X.v, model) - E0) / std::abs(E0));
    dh = std::max(dh, (smp.X.p.cross(smp.X.v) - h0).norm() / h0.norm());
  }
  criterion(8, "two-body conservation over two orbits",
            {{"specific energy", dE <= 1e-7, fmt("max relative drift %.3e (<= 1e-7)", dE)},
             {"angular momentum", dh <= 1e-7, fmt("max relative drift %.3e (<= 1e-7)", dh)}});

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
