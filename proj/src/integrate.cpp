#include "loglin/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "loglin/errors.hpp"
#include "loglin/log_error.hpp"

namespace loglin {

void IntegratorConfig::validate() const {
  auto fail = [](const char* what) { throw std::invalid_argument(what); };
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) fail("integrator tolerances must be positive");
  if (!(min_dt > 0.0) || !(min_dt <= max_dt)) fail("integrator needs 0 < min_dt <= max_dt");
  if (!(sample_dt > 0.0)) fail("sample_dt must be positive");
  if (method == Method::rk4 && !(fixed_dt > 0.0)) fail("fixed_dt must be positive");
}

std::vector<double> sample_grid(double t_end, double sample_dt) {
  if (!(t_end > 0.0) || !(sample_dt > 0.0)) {
    throw std::invalid_argument("sample_grid needs t_end > 0 and sample_dt > 0");
  }
  std::vector<double> grid;
  const auto n = static_cast<long>(std::floor(t_end / sample_dt + 1e-9));
  grid.reserve(static_cast<std::size_t>(n) + 2);
  for (long k = 0; k <= n; ++k) grid.push_back(static_cast<double>(k) * sample_dt);
  if (t_end - grid.back() > 1e-9 * sample_dt) {
    grid.push_back(t_end);
  } else {
    grid.back() = t_end;
  }
  return grid;
}

// --- DenseTrajectory --------------------------------------------------------

void DenseTrajectory::append(const Knot& knot) {
  if (!knots_.empty() && !(knot.t > knots_.back().t)) {
    if (knot.t == knots_.back().t) return;
    throw std::invalid_argument("DenseTrajectory knots must have increasing times");
  }
  knots_.push_back(knot);
}

GroupElement DenseTrajectory::state_at(double t) const {
  if (knots_.empty()) throw std::out_of_range("empty trajectory");
  const double slack = 1e-9 * std::max(1.0, std::abs(t_end()));
  if (t < t_begin() - slack || t > t_end() + slack) {
    std::ostringstream os;
    os << "time " << t << " s outside stored trajectory [" << t_begin() << ", " << t_end()
       << "]";
    throw std::out_of_range(os.str());
  }
  if (knots_.size() == 1) return {knots_[0].R, knots_[0].v, knots_[0].p};
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double value, const Knot& k) { return value < k.t; });
  if (it == knots_.begin()) ++it;
  if (it == knots_.end()) --it;
  const Knot& k1 = *it;
  const Knot& k0 = *(it - 1);
  if (t == k1.t) return {k1.R, k1.v, k1.p};
  if (t == k0.t) return {k0.R, k0.v, k0.p};

  const double h = k1.t - k0.t;
  const double s = std::clamp((t - k0.t) / h, 0.0, 1.0);
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double s4 = s3 * s;
  const double s5 = s4 * s;
  GroupElement X;
  // Quintic Hermite on p (value, velocity, acceleration at both ends).
  const double q0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
  const double q1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
  const double q2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  const double q3 = 0.5 * s3 - s4 + 0.5 * s5;
  const double q4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
  const double q5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
  X.p = q0 * k0.p + q1 * h * k0.v + q2 * h * h * k0.acc + q3 * h * h * k1.acc +
        q4 * h * k1.v + q5 * k1.p;
  // Cubic Hermite on v (value and acceleration at both ends).
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  X.v = h00 * k0.v + h10 * h * k0.acc + h01 * k1.v + h11 * h * k1.acc;
  X.R = k0.R * so3_exp(s * so3_log(k0.R.transpose() * k1.R));
  return X;
}

// --- truth model ------------------------------------------------------------

namespace {

using BodyVec = Eigen::Matrix<double, 9, 1>;

// Per-body integration state: (p, v, u) with R = R_base Exp(u).
struct BodyChart {
  Mat3 R_base = Mat3::Identity();

  [[nodiscard]] GroupElement state(const BodyVec& y) const {
    return {R_base * so3_exp(y.segment<3>(6)), y.segment<3>(3), y.segment<3>(0)};
  }

  static BodyVec derivative(const GroupElement& X, const Vec3& u, const BodyInput& in,
                            const GravityModel& model) {
    const StateDerivative d = classical_rhs(X, in, model);
    BodyVec dy;
    dy.segment<3>(0) = d.p_dot;
    dy.segment<3>(3) = d.v_dot;
    dy.segment<3>(6) = so3_right_jacobian_inv(u) * in.omega;
    return dy;
  }

  void rebase(BodyVec& y) {
    R_base = project_to_so3(R_base * so3_exp(y.segment<3>(6)));
    y.segment<3>(6).setZero();
  }

  static BodyVec initial(const GroupElement& X) {
    BodyVec y;
    y << X.p, X.v, Vec3::Zero();
    return y;
  }
};

DenseTrajectory::Knot make_knot(double t, const GroupElement& X, const BodyInput& in,
                                const GravityModel& model) {
  return {t, X.p, X.v, X.R * in.a + gravity(X.p, model), X.R};
}

void check_t_end(double t_end) {
  if (!(t_end > 0.0)) throw std::invalid_argument("propagation needs t_end > 0");
}

void check_initial(const GroupElement& X) {
  if (!X.is_valid()) throw std::invalid_argument("initial state is not a valid SE2(3) element");
}

}  // namespace

ClassicalRun propagate_classical(const GroupElement& X0, const InputLaw& input,
                                 const GravityModel& model, const IntegratorConfig& cfg,
                                 double t_end) {
  check_t_end(t_end);
  check_initial(X0);
  BodyChart chart{X0.R};
  auto rhs = [&](double t, const BodyVec& y) {
    const GroupElement X = chart.state(y);
    return BodyChart::derivative(X, y.segment<3>(6), input(t, X), model);
  };
  ClassicalRun run;
  const std::vector<double> grid = sample_grid(t_end, cfg.sample_dt);
  run.samples.resize(grid.size());
  auto on_sample = [&](std::size_t k, double t, const BodyVec& y) {
    const GroupElement X = chart.state(y);
    run.samples[k] = {t, X, input(t, X)};
    if (k == 0) run.dense.append(make_knot(t, X, run.samples[k].u, model));
  };
  auto on_accept = [&](double t, BodyVec& y) {
    chart.rebase(y);
    const GroupElement X = chart.state(y);
    run.dense.append(make_knot(t, X, input(t, X), model));
  };
  const OdeSolver<9> solver(rhs, cfg);
  run.stats = solver.solve(BodyChart::initial(X0), grid, on_sample, on_accept);
  return run;
}

FormationRun propagate_formation(const GroupElement& X_ref0, const InputLaw& ref_input,
                                 const GroupElement& X0, const RelativeInputLaw& input,
                                 const GravityModel& model, const IntegratorConfig& cfg,
                                 double t_end) {
  check_t_end(t_end);
  check_initial(X_ref0);
  check_initial(X0);
  using PairVec = Eigen::Matrix<double, 18, 1>;
  BodyChart chief{X_ref0.R};
  BodyChart deputy{X0.R};

  auto rhs = [&](double t, const PairVec& y) {
    const BodyVec yc = y.head<9>();
    const BodyVec yd = y.tail<9>();
    const GroupElement Xc = chief.state(yc);
    const GroupElement Xd = deputy.state(yd);
    PairVec dy;
    dy.head<9>() = BodyChart::derivative(Xc, yc.segment<3>(6), ref_input(t, Xc), model);
    dy.tail<9>() = BodyChart::derivative(Xd, yd.segment<3>(6), input(t, Xd, Xc), model);
    return dy;
  };

  FormationRun run;
  const std::vector<double> grid = sample_grid(t_end, cfg.sample_dt);
  run.chief.samples.resize(grid.size());
  run.deputy.resize(grid.size());
  auto on_sample = [&](std::size_t k, double t, const PairVec& y) {
    const GroupElement Xc = chief.state(y.head<9>());
    const GroupElement Xd = deputy.state(y.tail<9>());
    run.chief.samples[k] = {t, Xc, ref_input(t, Xc)};
    run.deputy[k] = {t, Xd, input(t, Xd, Xc)};
    if (k == 0) run.chief.dense.append(make_knot(t, Xc, run.chief.samples[k].u, model));
  };
  auto on_accept = [&](double t, PairVec& y) {
    BodyVec yc = y.head<9>();
    BodyVec yd = y.tail<9>();
    chief.rebase(yc);
    deputy.rebase(yd);
    y.head<9>() = yc;
    y.tail<9>() = yd;
    const GroupElement Xc = chief.state(yc);
    run.chief.dense.append(make_knot(t, Xc, ref_input(t, Xc), model));
  };
  PairVec y0;
  y0 << BodyChart::initial(X_ref0), BodyChart::initial(X0);
  const OdeSolver<18> solver(rhs, cfg);
  run.chief.stats = solver.solve(y0, grid, on_sample, on_accept);
  return run;
}

// --- log-error ODE ----------------------------------------------------------

std::vector<ErrorSample> propagate_log_error(const Vec9& xi0, const DenseTrajectory& ref,
                                             const InputLaw& ref_input,
                                             const MismatchLaw& mismatch,
                                             const IntegratorConfig& cfg, double t_end) {
  check_t_end(t_end);
  const std::vector<double> grid = sample_grid(t_end, cfg.sample_dt);
  std::vector<ErrorSample> out;
  out.reserve(grid.size());
  double last_valid = grid.front();

  auto guard = [&](const Vec9& xi) {
    if (rotation_slot(xi).norm() >= std::numbers::pi - kSingularityMargin) {
      std::ostringstream os;
      os << "log-error rotation reached " << rotation_slot(xi).norm()
         << " rad; last valid sample at t = " << last_valid << " s";
      throw NearSingularity(os.str(), last_valid);
    }
  };
  guard(xi0);

  auto rhs = [&](double t, const Vec9& xi) -> Vec9 {
    const GroupElement X_ref = ref.state_at(t);
    const Vec9 n_ref = input_vector(ref_input(t, X_ref));
    try {
      return error_rhs(xi, n_ref, mismatch(t, X_ref, n_ref, xi), X_ref);
    } catch (const NearSingularity& e) {
      throw NearSingularity(e.what(), last_valid);
    }
  };
  auto on_sample = [&](std::size_t, double t, const Vec9& xi) {
    guard(xi);
    out.push_back({t, xi});
    last_valid = t;
  };
  auto on_accept = [&](double, Vec9& xi) { guard(xi); };
  OdeSolver<9>(rhs, cfg).solve(xi0, grid, on_sample, on_accept);
  return out;
}

std::vector<ErrorSample> propagate_linear_error(const Vec9& xi0,
                                                const std::function<Mat9(double)>& A,
                                                const IntegratorConfig& cfg, double t_end) {
  check_t_end(t_end);
  const std::vector<double> grid = sample_grid(t_end, cfg.sample_dt);
  std::vector<ErrorSample> out;
  out.reserve(grid.size());
  auto rhs = [&](double t, const Vec9& xi) -> Vec9 { return A(t) * xi; };
  auto on_sample = [&](std::size_t, double t, const Vec9& xi) { out.push_back({t, xi}); };
  OdeSolver<9>(rhs, cfg).solve(xi0, grid, on_sample);
  return out;
}

}  // namespace loglin
