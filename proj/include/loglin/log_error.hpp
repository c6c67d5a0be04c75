#pragma once

// Left-invariant logarithmic tracking error xi = Log(X^-1 Xref)^v and its
// dynamics
//
//   xi' = (-ad_{n_ref} + A_C) xi + Jl^-1(xi) n~ + Jr^-1(xi) Ad_{Xref^-1} m~,
//
// together with the bound on the gravity mismatch term.

#include "loglin/dynamics.hpp"
#include "loglin/lie.hpp"

namespace loglin {

/// eta = X^-1 Xref.
GroupElement left_error(const GroupElement& X, const GroupElement& X_ref);

/// xi = se23_log(left_error(X, X_ref)). Throws NearSingularity.
Vec9 log_error(const GroupElement& X, const GroupElement& X_ref,
               double margin = kSingularityMargin);

/// Actual state recovered from the reference and the log error: X = Xref Exp(-xi).
GroupElement actual_from_error(const GroupElement& X_ref, const Vec9& xi);

/// Constant 9x9 matrix with I3 in the (position, velocity) block.
Mat9 a_c_matrix();

/// Right-hand side of the log-error ODE. Throws NearSingularity.
Vec9 error_rhs(const Vec9& xi, const Vec9& n_ref, const MismatchPair& mm,
               const GroupElement& X_ref, double margin = kSingularityMargin);

/// Jr^-1(xi) Ad_{Xref^-1} m~ in the reduced form (0, Jr^-1_SO3(xi_R) Rref^T (g(pref) - g(p)), 0).
Vec9 gravity_mismatch_term(const Vec9& xi, const GroupElement& X_ref, const Vec3& p,
                           const GravityModel& model, double margin = kSingularityMargin);

/// (theta/2) / sin(theta/2), equal to 1 at theta = 0.
double half_angle_factor(double theta);

struct BoundInputs {
  double r = 0.0;          // |p_ref|, m
  double xi_p_norm = 0.0;  // m
  double theta = 0.0;      // |xi_R|, rad
  double mu = kEarthMu;    // m^3/s^2
};

/// Upper bound on |gravity_mismatch_term|:
///   (theta/2)/sin(theta/2) * mu |xi_p| (2r - |xi_p|) / (r^2 (r - |xi_p|)^2).
/// Throws DomainError unless 0 <= xi_p_norm < r and 0 <= theta < pi.
double pointwise_bound(const BoundInputs& b);

/// pointwise_bound at the worst case (r_min, xi_p_max, theta_max).
double global_bound(double r_min, double xi_p_max, double theta_max, double mu);

}  // namespace loglin
