#include "loglin/log_error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "loglin/errors.hpp"

namespace loglin {

GroupElement left_error(const GroupElement& X, const GroupElement& X_ref) {
  return compose(inverse(X), X_ref);
}

Vec9 log_error(const GroupElement& X, const GroupElement& X_ref, double margin) {
  return se23_log(left_error(X, X_ref), margin);
}

GroupElement actual_from_error(const GroupElement& X_ref, const Vec9& xi) {
  return compose(X_ref, se23_exp(-xi));
}

Mat9 a_c_matrix() {
  Mat9 A = Mat9::Zero();
  A.block<3, 3>(slot::kPosition, slot::kVelocity) = Mat3::Identity();
  return A;
}

Vec9 error_rhs(const Vec9& xi, const Vec9& n_ref, const MismatchPair& mm,
               const GroupElement& X_ref, double margin) {
  const Mat9 A = -ad_matrix(n_ref) + a_c_matrix();
  return A * xi + jl_inv(xi, margin) * mm.n_tilde +
         jr_inv(xi, margin) * (big_adjoint(inverse(X_ref)) * mm.m_tilde);
}

Vec9 gravity_mismatch_term(const Vec9& xi, const GroupElement& X_ref, const Vec3& p,
                           const GravityModel& model, double margin) {
  const Vec3 dg = gravity(X_ref.p, model) - gravity(p, model);
  Vec9 out = Vec9::Zero();
  velocity_slot(out) =
      so3_right_jacobian_inv(rotation_slot(xi), margin) * (X_ref.R.transpose() * dg);
  return out;
}

double half_angle_factor(double theta) {
  const double h = 0.5 * theta;
  if (std::abs(theta) < kSmallAngle) return 1.0 + h * h / 6.0;
  return h / std::sin(h);
}

double pointwise_bound(const BoundInputs& b) {
  if (!(b.r > 0.0) || !(b.xi_p_norm >= 0.0) || !(b.xi_p_norm < b.r) ||
      !(b.theta >= 0.0) || !(b.theta < std::numbers::pi) || !(b.mu > 0.0)) {
    std::ostringstream os;
    os << "pointwise_bound: need 0 <= |xi_p| < r, 0 <= theta < pi, mu > 0 (r = " << b.r
       << ", |xi_p| = " << b.xi_p_norm << ", theta = " << b.theta << ")";
    throw DomainError(os.str());
  }
  const double d = b.xi_p_norm;
  const double gap = b.r - d;
  return half_angle_factor(b.theta) * b.mu * d * (2.0 * b.r - d) /
         (b.r * b.r * gap * gap);
}

double global_bound(double r_min, double xi_p_max, double theta_max, double mu) {
  return pointwise_bound({r_min, xi_p_max, theta_max, mu});
}

}  // namespace loglin
