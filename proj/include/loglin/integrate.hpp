#pragma once

// Propagation of the Newtonian truth model and of the log-error ODE on a
// shared output grid.

#include <functional>
#include <vector>

#include "loglin/dynamics.hpp"
#include "loglin/lie.hpp"
#include "loglin/ode.hpp"

namespace loglin {

struct TrajectorySample {
  double t = 0.0;
  GroupElement X;
  BodyInput u;
};

struct ErrorSample {
  double t = 0.0;
  Vec9 xi = Vec9::Zero();
};

/// Open-loop or state-feedback input for a single body.
using InputLaw = std::function<BodyInput(double t, const GroupElement& X)>;

/// Input for a body that may feed back on a reference body's state.
using RelativeInputLaw =
    std::function<BodyInput(double t, const GroupElement& X, const GroupElement& X_ref)>;

/// Mismatch supplied to the log-error ODE at (t, Xref(t), n_ref(t), xi).
using MismatchLaw = std::function<MismatchPair(double t, const GroupElement& X_ref,
                                               const Vec9& n_ref, const Vec9& xi)>;

/// Dense reference trajectory between the integrator's accepted steps: quintic
/// Hermite on p (using v and v' at the knots), cubic Hermite on v, geodesic
/// interpolation on R. Assumes p' = v, i.e. no position-rate input.
class DenseTrajectory {
 public:
  struct Knot {
    double t;
    Vec3 p;
    Vec3 v;
    Vec3 acc;  // v'
    Mat3 R;
  };

  void append(const Knot& knot);

  /// Throws std::out_of_range outside [t_begin, t_end].
  [[nodiscard]] GroupElement state_at(double t) const;

  [[nodiscard]] double t_begin() const { return knots_.front().t; }
  [[nodiscard]] double t_end() const { return knots_.back().t; }
  [[nodiscard]] std::size_t size() const { return knots_.size(); }

 private:
  std::vector<Knot> knots_;
};

struct ClassicalRun {
  std::vector<TrajectorySample> samples;
  DenseTrajectory dense;
  SolveStats stats;
};

/// Chief and deputy propagated together with one step sequence.
struct FormationRun {
  ClassicalRun chief;
  std::vector<TrajectorySample> deputy;
};

/// Integrates p' = v + R b, v' = R a + g(p), R' = R [omega]x. The attitude is
/// advanced as R_n Exp(u) with u integrated inside each step and folded back (and
/// polar-projected) after every accepted step.
ClassicalRun propagate_classical(const GroupElement& X0, const InputLaw& input,
                                 const GravityModel& model, const IntegratorConfig& cfg,
                                 double t_end);

FormationRun propagate_formation(const GroupElement& X_ref0, const InputLaw& ref_input,
                                 const GroupElement& X0, const RelativeInputLaw& input,
                                 const GravityModel& model, const IntegratorConfig& cfg,
                                 double t_end);

/// Integrates the log-error ODE along a stored reference. `ref_input` gives the
/// reference body's input, evaluated on the interpolated reference state.
/// Throws NearSingularity (carrying the last valid sample time) if |xi_R|
/// approaches pi.
std::vector<ErrorSample> propagate_log_error(const Vec9& xi0, const DenseTrajectory& ref,
                                             const InputLaw& ref_input,
                                             const MismatchLaw& mismatch,
                                             const IntegratorConfig& cfg, double t_end);

/// Integrates xi' = A(t) xi.
std::vector<ErrorSample> propagate_linear_error(const Vec9& xi0,
                                                const std::function<Mat9(double)>& A,
                                                const IntegratorConfig& cfg, double t_end);

}  // namespace loglin
