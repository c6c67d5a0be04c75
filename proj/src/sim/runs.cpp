#include "loglin/sim/runs.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "loglin/control.hpp"
#include "loglin/errors.hpp"
#include "loglin/integrate.hpp"
#include "loglin/log_error.hpp"
#include "loglin/sim/orbit.hpp"

namespace loglin::sim {

namespace {

using Clock = std::chrono::steady_clock;

// Re-raises library errors with the scenario and mode prepended, keeping the type.
template <class Fn>
RunResult with_context(const Scenario& sc, Mode mode, Fn&& fn) {
  const std::string ctx = "[" + sc.name + "/" + to_string(mode) + "] ";
  const auto start = Clock::now();
  RunResult r;
  try {
    r = fn();
  } catch (const NearSingularity& e) {
    throw NearSingularity(ctx + e.what(), e.last_valid_time());
  } catch (const OriginSingularity& e) {
    throw OriginSingularity(ctx + e.what());
  } catch (const DomainError& e) {
    throw DomainError(ctx + e.what());
  } catch (const StepSizeUnderflow& e) {
    throw StepSizeUnderflow(ctx + e.what());
  } catch (const GainSynthesisFailure& e) {
    throw GainSynthesisFailure(ctx + e.what());
  }
  r.summary.scenario = sc.name;
  r.summary.mode = mode;
  r.summary.samples = r.table.rows.size();
  r.summary.perigee_radius_m = sc.orbit.perigee_radius();
  r.summary.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

Scenario prepared(const Scenario& in) {
  Scenario sc = in;
  sc.resolve_defaults();
  sc.validate();
  return sc;
}

InputLaw chief_law(const Scenario& sc) {
  return [thrust = sc.chief_thrust, omega = sc.omega_ref_rad_s](double t,
                                                                const GroupElement&) {
    BodyInput u;
    u.a = thrust.acceleration(t);
    u.omega = omega;
    return u;
  };
}

Vec9 chief_input_vector(const Scenario& sc, double t) {
  return input_vector(chief_law(sc)(t, GroupElement{}));
}

void append_xi(std::vector<double>& row, const Vec9& xi) {
  row.insert(row.end(), xi.data(), xi.data() + 9);
}

void add_check(RunSummary& s, std::string name, double value, double limit) {
  s.checks.push_back({std::move(name), value < limit, value, limit});
}

void record_error_extremes(RunSummary& s, const Vec9& xi) {
  s.max_position_error_m = std::max(s.max_position_error_m, position_slot(xi).norm());
  s.max_velocity_error_m_s = std::max(s.max_velocity_error_m_s, velocity_slot(xi).norm());
  s.max_attitude_error_rad = std::max(s.max_attitude_error_rad, rotation_slot(xi).norm());
}

void record_stats(RunSummary& s, const SolveStats& st) {
  s.accepted_steps += st.accepted;
  s.rejected_steps += st.rejected;
}

double min_chief_radius(const FormationRun& run) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& smp : run.chief.samples) r = std::min(r, smp.X.p.norm());
  return r;
}

// Condition number of the eigenvector matrix of a diagonalizable A.
double eigenvector_condition(const Mat9& A) {
  Eigen::EigenSolver<Mat9> es(A);
  if (es.info() != Eigen::Success) throw GainSynthesisFailure("eigen-decomposition failed");
  // Singular values of V are the square roots of the eigenvalues of V^H V.
  const Eigen::Matrix<std::complex<double>, 9, 9> V = es.eigenvectors();
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<std::complex<double>, 9, 9>> gram(
      V.adjoint() * V, Eigen::EigenvaluesOnly);
  const auto& ev = gram.eigenvalues();  // ascending
  return std::sqrt(ev(8) / ev(0));
}

}  // namespace

bool RunSummary::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

FormationStart initial_states(const Scenario& sc) {
  const CartesianState cs = elements_to_state(sc.orbit, sc.mu_m3_s2);
  FormationStart f;
  f.chief = {Mat3::Identity(), cs.v, cs.p};
  f.deputy.p = cs.p + sc.initial_offsets.position_m;
  f.deputy.v = cs.v + sc.initial_offsets.velocity_m_s;
  f.deputy.R = f.chief.R * so3_exp(sc.initial_offsets.attitude_rad);
  return f;
}

std::vector<std::string> xi_columns(const std::string& prefix) {
  std::vector<std::string> out;
  for (const char* s : {"pos", "vel", "rot"}) {
    for (const char* c : {"x", "y", "z"}) out.push_back(prefix + "_" + s + "_" + c);
  }
  return out;
}

RunResult run_validate(const Scenario& input) {
  const Scenario sc = prepared(input);
  return with_context(sc, Mode::validate, [&] {
    const GravityModel model = sc.gravity();
    const FormationStart start = initial_states(sc);
    const InputLaw chief = chief_law(sc);
    BodyInput coast;
    coast.omega = sc.omega_actual_rad_s;
    const RelativeInputLaw deputy = [coast](double, const GroupElement&,
                                            const GroupElement&) { return coast; };
    const double t_end = sc.duration_s();

    const FormationRun truth = propagate_formation(start.chief, chief, start.deputy, deputy,
                                                   model, sc.integrator, t_end);
    const Vec9 n_deputy = input_vector(coast);
    const MismatchLaw mm = [&](double, const GroupElement& X_ref, const Vec9& n_ref,
                               const Vec9& xi) {
      return mismatch(n_ref, n_deputy, X_ref.p, actual_from_error(X_ref, xi).p, model);
    };
    const Vec9 xi0 = log_error(start.deputy, start.chief);
    const std::vector<ErrorSample> lie =
        propagate_log_error(xi0, truth.chief.dense, chief, mm, sc.integrator, t_end);

    RunResult r;
    RunSummary& s = r.summary;
    r.table.columns = {"t_s"};
    for (const char* p : {"classical", "log", "delta"}) {
      const auto cols = xi_columns(p);
      r.table.columns.insert(r.table.columns.end(), cols.begin(), cols.end());
    }
    const double relative_floor = sc.integrator.abs_tol / sc.integrator.rel_tol;
    for (std::size_t k = 0; k < truth.deputy.size(); ++k) {
      const Vec9 xi_c = log_error(truth.deputy[k].X, truth.chief.samples[k].X);
      const Vec9& xi_l = lie[k].xi;
      const Vec9 d = xi_l - xi_c;
      std::vector<double> row{truth.deputy[k].t};
      append_xi(row, xi_c);
      append_xi(row, xi_l);
      append_xi(row, d);
      r.table.add_row(std::move(row));

      record_error_extremes(s, xi_c);
      s.max_residual_position_m = std::max(s.max_residual_position_m, position_slot(d).norm());
      s.max_residual_velocity_m_s =
          std::max(s.max_residual_velocity_m_s, velocity_slot(d).norm());
      s.max_residual_attitude_rad =
          std::max(s.max_residual_attitude_rad, rotation_slot(d).norm());
      // Below abs_tol / rel_tol the step control is absolute, so a relative
      // figure there only measures round-off.
      s.max_relative_residual_percent =
          std::max(s.max_relative_residual_percent,
                   100.0 * d.norm() / std::max(xi_c.norm(), relative_floor));
    }
    record_stats(s, truth.chief.stats);
    s.min_reference_radius_m = min_chief_radius(truth);
    add_check(s, "position_residual_m", s.max_residual_position_m, kPositionResidualLimit);
    add_check(s, "velocity_residual_m_s", s.max_residual_velocity_m_s,
              kVelocityResidualLimit);
    add_check(s, "attitude_residual_rad", s.max_residual_attitude_rad,
              kAttitudeResidualLimit);
    s.checks.push_back({"relative_residual_percent",
                        s.max_relative_residual_percent <= kRelativeResidualLimitPercent,
                        s.max_relative_residual_percent, kRelativeResidualLimitPercent});
    return r;
  });
}

RunResult run_bound(const Scenario& input) {
  const Scenario sc = prepared(input);
  return with_context(sc, Mode::bound, [&] {
    const GravityModel model = sc.gravity();
    const FormationStart start = initial_states(sc);
    BodyInput coast;
    coast.omega = sc.omega_actual_rad_s;
    const FormationRun truth = propagate_formation(
        start.chief, chief_law(sc), start.deputy,
        [coast](double, const GroupElement&, const GroupElement&) { return coast; }, model,
        sc.integrator, sc.duration_s());

    RunResult r;
    RunSummary& s = r.summary;
    r.table.columns = {"t_s", "actual_mismatch_m_s2", "pointwise_bound_m_s2", "ratio"};
    std::vector<Vec9> xis;
    xis.reserve(truth.deputy.size());
    for (std::size_t k = 0; k < truth.deputy.size(); ++k) {
      const GroupElement& Xc = truth.chief.samples[k].X;
      const GroupElement& Xd = truth.deputy[k].X;
      const Vec9 xi = log_error(Xd, Xc);
      xis.push_back(xi);
      const double actual = gravity_mismatch_term(xi, Xc, Xd.p, model).norm();
      const double bound = pointwise_bound(
          {Xc.p.norm(), position_slot(xi).norm(), rotation_slot(xi).norm(), model.mu});
      // 0/0 at zero offset counts as perfectly bounded.
      const double ratio = bound > 0.0 ? actual / bound : (actual > 0.0 ? INFINITY : 0.0);
      r.table.add_row({truth.deputy[k].t, actual, bound, ratio});

      record_error_extremes(s, xi);
      s.max_mismatch_m_s2 = std::max(s.max_mismatch_m_s2, actual);
      s.max_pointwise_bound_m_s2 = std::max(s.max_pointwise_bound_m_s2, bound);
      s.max_pointwise_ratio = std::max(s.max_pointwise_ratio, ratio);
    }
    record_stats(s, truth.chief.stats);
    s.min_reference_radius_m = min_chief_radius(truth);
    s.global_bound_m_s2 = global_bound(s.min_reference_radius_m, s.max_position_error_m,
                                       s.max_attitude_error_rad, model.mu);
    s.ratio_actual_to_global =
        s.global_bound_m_s2 > 0.0 ? s.max_mismatch_m_s2 / s.global_bound_m_s2 : 0.0;
    add_check(s, "pointwise_ratio", s.max_pointwise_ratio, 1.0);
    s.checks.push_back({"global_bound_dominates", s.max_mismatch_m_s2 <= s.global_bound_m_s2,
                        s.max_mismatch_m_s2, s.global_bound_m_s2});

    // Spot check on random errors around the stored chief states, with norms up
    // to the observed extremes.
    std::mt19937_64 rng(sc.seed);
    std::uniform_int_distribution<std::size_t> pick(0, xis.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss;
    auto direction = [&] {
      Vec3 d(gauss(rng), gauss(rng), gauss(rng));
      return d.norm() > 0.0 ? Vec3(d.normalized()) : Vec3(Vec3::UnitX());
    };
    const double rho_max = std::max(s.max_position_error_m, 1.0);
    const double theta_max = std::max(s.max_attitude_error_rad, 1e-3);
    double worst = 0.0;
    for (int i = 0; i < kDominanceSamples; ++i) {
      const GroupElement& Xc = truth.chief.samples[pick(rng)].X;
      const Vec3 xp = unit(rng) * std::min(rho_max, 0.5 * Xc.p.norm()) * direction();
      const Vec3 xv = unit(rng) * std::max(s.max_velocity_error_m_s, 1.0) * direction();
      const Vec3 xr = unit(rng) * theta_max * direction();
      const Vec9 xi = stack(xp, xv, xr);
      const double actual =
          gravity_mismatch_term(xi, Xc, actual_from_error(Xc, xi).p, model).norm();
      const double bound = pointwise_bound({Xc.p.norm(), xp.norm(), xr.norm(), model.mu});
      if (bound > 0.0) worst = std::max(worst, actual / bound);
    }
    s.checks.push_back({"random_pair_dominance", worst <= 1.0, worst, 1.0});
    return r;
  });
}

RunResult run_stabilize(const Scenario& input) {
  const Scenario sc = prepared(input);
  return with_context(sc, Mode::stabilize, [&] {
    const GravityModel model = sc.gravity();
    const FormationStart start = initial_states(sc);
    const InputLaw chief = chief_law(sc);
    const double t_end = sc.duration_s();
    const double decay = sc.control_decay_rate_per_s;
    const Vec9 xi0 = log_error(start.deputy, start.chief);
    const double xi0_norm = xi0.norm();
    // Relative deviations use the crossover of the mixed tolerance as a floor.
    const double eps = sc.integrator.abs_tol / sc.integrator.rel_tol;
    auto n_ref = [&](double t) { return chief_input_vector(sc, t); };

    // Inversion only: u1 cancels the gravity mismatch; the deputy otherwise
    // flies the chief's nominal input.
    const RelativeInputLaw inversion = [&](double t, const GroupElement& X,
                                           const GroupElement& Xc) {
      return apply_mismatch_as_input(n_ref(t), u1_dynamic_inversion(X, Xc, model));
    };
    const FormationRun inv = propagate_formation(start.chief, chief, start.deputy, inversion,
                                                 model, sc.integrator, t_end);
    const auto inv_lin = propagate_linear_error(
        xi0, [&](double t) { return closed_loop_A(n_ref(t)); }, sc.integrator, t_end);

    // Inversion plus linear feedback, with the gain re-designed for n_ref(t).
    auto gain_at = [&](double t) { return default_gain(n_ref(t), decay); };
    const RelativeInputLaw feedback = [&](double t, const GroupElement& X,
                                          const GroupElement& Xc) {
      const Vec9 xi = log_error(X, Xc);
      const Vec9 n_tilde = u1_dynamic_inversion(X, Xc, model) + u2_stabilizing(xi, gain_at(t));
      return apply_mismatch_as_generalized_input(n_ref(t), n_tilde);
    };
    const FormationRun cl = propagate_formation(start.chief, chief, start.deputy, feedback,
                                                model, sc.integrator, t_end);
    const auto cl_lin = propagate_linear_error(
        xi0, [&](double t) { return gain_at(t).closed_loop(); }, sc.integrator, t_end);

    const bool constant_ref = sc.chief_thrust.is_constant();
    const double c_env = eigenvector_condition(gain_at(0.0).closed_loop());

    RunResult r;
    RunSummary& s = r.summary;
    r.table.columns = {"t_s",
                       "xi_norm_inversion",
                       "xi_norm_inversion_linear",
                       "xi_norm_closed_loop",
                       "xi_norm_closed_loop_linear",
                       "envelope"};
    double envelope_excess = 0.0;
    for (std::size_t k = 0; k < cl.deputy.size(); ++k) {
      const double t = cl.deputy[k].t;
      const Vec9 xi_inv = log_error(inv.deputy[k].X, inv.chief.samples[k].X);
      const Vec9 xi_cl = log_error(cl.deputy[k].X, cl.chief.samples[k].X);
      const double env = c_env * xi0_norm * std::exp(-0.5 * decay * t);
      r.table.add_row({t, xi_inv.norm(), inv_lin[k].xi.norm(), xi_cl.norm(),
                       cl_lin[k].xi.norm(), env});

      record_error_extremes(s, xi_cl);
      s.max_inversion_deviation =
          std::max(s.max_inversion_deviation,
                   (xi_inv - inv_lin[k].xi).norm() / std::max(inv_lin[k].xi.norm(), eps));
      s.max_closed_loop_deviation =
          std::max(s.max_closed_loop_deviation,
                   (xi_cl - cl_lin[k].xi).norm() / std::max(xi0_norm, eps));
      // Ratio above 1 means the envelope is exceeded; the floor absorbs round-off
      // once the error has decayed to the level of the state difference.
      envelope_excess = std::max(envelope_excess, xi_cl.norm() / std::max(env, 1e-6));
    }
    record_stats(s, inv.chief.stats);
    record_stats(s, cl.chief.stats);
    s.min_reference_radius_m = min_chief_radius(cl);
    s.closed_loop_decay_rate_per_s = -gain_at(0.0).spectral_abscissa();
    s.final_closed_loop_error_norm = r.table.rows.back()[3];
    s.checks.push_back({"inversion_linear_agreement",
                        s.max_inversion_deviation <= kInversionAgreementLimit,
                        s.max_inversion_deviation, kInversionAgreementLimit});
    s.checks.push_back({"closed_loop_linear_agreement",
                        s.max_closed_loop_deviation <= kClosedLoopAgreementLimit,
                        s.max_closed_loop_deviation, kClosedLoopAgreementLimit});
    if (constant_ref) {
      s.checks.push_back({"closed_loop_envelope", envelope_excess <= 1.0, envelope_excess, 1.0});
    }
    return r;
  });
}

RunResult run_mode(const Scenario& sc, Mode mode) {
  switch (mode) {
    case Mode::validate:
      return run_validate(sc);
    case Mode::bound:
      return run_bound(sc);
    case Mode::stabilize:
      return run_stabilize(sc);
  }
  throw std::invalid_argument("unknown mode");
}

std::string summary_to_json(const RunSummary& s, bool include_wall_time) {
  nlohmann::ordered_json j;
  j["scenario"] = s.scenario;
  j["mode"] = to_string(s.mode);
  j["samples"] = s.samples;
  j["accepted_steps"] = s.accepted_steps;
  j["rejected_steps"] = s.rejected_steps;
  j["max_position_error_m"] = s.max_position_error_m;
  j["max_velocity_error_m_s"] = s.max_velocity_error_m_s;
  j["max_attitude_error_rad"] = s.max_attitude_error_rad;
  j["max_residual"] = {{"position_m", s.max_residual_position_m},
                       {"velocity_m_s", s.max_residual_velocity_m_s},
                       {"attitude_rad", s.max_residual_attitude_rad}};
  j["max_relative_residual_percent"] = s.max_relative_residual_percent;
  j["max_mismatch_m_s2"] = s.max_mismatch_m_s2;
  j["max_pointwise_bound_m_s2"] = s.max_pointwise_bound_m_s2;
  j["global_bound_m_s2"] = s.global_bound_m_s2;
  j["ratio_actual_to_global"] = s.ratio_actual_to_global;
  j["max_pointwise_ratio"] = s.max_pointwise_ratio;
  j["perigee_radius_m"] = s.perigee_radius_m;
  j["min_reference_radius_m"] = s.min_reference_radius_m;
  j["max_inversion_deviation"] = s.max_inversion_deviation;
  j["max_closed_loop_deviation"] = s.max_closed_loop_deviation;
  j["closed_loop_decay_rate_per_s"] = s.closed_loop_decay_rate_per_s;
  j["final_closed_loop_error_norm"] = s.final_closed_loop_error_norm;
  if (include_wall_time) j["wall_time_s"] = s.wall_time_s;
  auto checks = nlohmann::ordered_json::array();
  for (const Check& c : s.checks) {
    checks.push_back(
        {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"limit", c.limit}});
  }
  j["checks"] = checks;
  j["passed"] = s.passed();
  return j.dump(2) + "\n";
}

void require_passed(const RunSummary& s) {
  if (s.passed()) return;
  std::ostringstream os;
  os << to_string(s.mode) << " checks failed:";
  for (const Check& c : s.checks) {
    if (!c.passed) os << " " << c.name << " (" << c.value << " vs limit " << c.limit << ")";
  }
  throw BoundViolation(os.str());
}

}  // namespace loglin::sim
