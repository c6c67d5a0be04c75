#pragma once

// SO(3) and SE2(3) primitives.
//
// Group elements are (R, v, p) embedded as
//
//   X = [ R  v  p ]
//       [ 0  1  0 ]
//       [ 0  0  1 ]
//
// Algebra coordinates are stacked xi = (xi_p, xi_v, xi_R) in R^9, with
//
//   xi^ = [ [xi_R]x  xi_v  xi_p ]
//         [   0       0     0   ]
//         [   0       0     0   ]
//
// Every 9x9 operator in this library (ad, Ad, Jacobians, A_C, closed-loop A)
// uses that (position, velocity, rotation) block order.

#include <Eigen/Core>

namespace loglin {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

/// Offsets of the three 3-vector slots inside a 9-vector.
namespace slot {
inline constexpr int kPosition = 0;
inline constexpr int kVelocity = 3;
inline constexpr int kRotation = 6;
}  // namespace slot

inline auto position_slot(Vec9& xi) { return xi.segment<3>(slot::kPosition); }
inline auto velocity_slot(Vec9& xi) { return xi.segment<3>(slot::kVelocity); }
inline auto rotation_slot(Vec9& xi) { return xi.segment<3>(slot::kRotation); }
inline Vec3 position_slot(const Vec9& xi) { return xi.segment<3>(slot::kPosition); }
inline Vec3 velocity_slot(const Vec9& xi) { return xi.segment<3>(slot::kVelocity); }
inline Vec3 rotation_slot(const Vec9& xi) { return xi.segment<3>(slot::kRotation); }

/// Stacks (xi_p, xi_v, xi_R) into a 9-vector.
Vec9 stack(const Vec3& xi_p, const Vec3& xi_v, const Vec3& xi_R);

/// Tolerance on R^T R = I and det R = 1.
inline constexpr double kOrthonormalityTol = 1e-10;
/// Log and inverse Jacobians refuse angles >= pi - kSingularityMargin.
inline constexpr double kSingularityMargin = 1e-6;
/// Below this angle closed forms switch to Taylor expansions.
inline constexpr double kSmallAngle = 1e-4;

/// Pose-velocity state on SE2(3).
struct GroupElement {
  Mat3 R = Mat3::Identity();
  Vec3 v = Vec3::Zero();
  Vec3 p = Vec3::Zero();

  static GroupElement identity() { return {}; }

  /// 5x5 matrix embedding.
  [[nodiscard]] Mat5 matrix() const;

  /// Inverse of matrix(); does not validate the rotation block.
  static GroupElement from_matrix(const Mat5& m);

  /// True when R is orthonormal with det +1 to within `tol`.
  [[nodiscard]] bool is_valid(double tol = kOrthonormalityTol) const;
};

bool is_rotation(const Mat3& R, double tol = kOrthonormalityTol);

/// Nearest rotation in the Frobenius sense (polar factor).
Mat3 project_to_so3(const Mat3& M);

// --- so(3) / SO(3) ---------------------------------------------------------

Mat3 hat3(const Vec3& w);

Mat3 so3_exp(const Vec3& w);

/// Throws NearSingularity when the angle is within `margin` of pi.
Vec3 so3_log(const Mat3& R, double margin = kSingularityMargin);

Mat3 so3_left_jacobian(const Vec3& w);
Mat3 so3_right_jacobian(const Vec3& w);
Mat3 so3_left_jacobian_inv(const Vec3& w, double margin = kSingularityMargin);
Mat3 so3_right_jacobian_inv(const Vec3& w, double margin = kSingularityMargin);

// --- se2(3) / SE2(3) -------------------------------------------------------

Mat5 wedge(const Vec9& xi);

/// Throws NotInAlgebra if `A` departs from the se2(3) pattern by more than `tol`.
Vec9 vee(const Mat5& A, double tol = 1e-12);

GroupElement se23_exp(const Vec9& xi);
Vec9 se23_log(const GroupElement& X, double margin = kSingularityMargin);

GroupElement compose(const GroupElement& X, const GroupElement& Y);
GroupElement inverse(const GroupElement& X);

inline GroupElement operator*(const GroupElement& X, const GroupElement& Y) {
  return compose(X, Y);
}

/// Matrix of zeta -> vee([xi^, zeta^]).
Mat9 ad_matrix(const Vec9& xi);

/// Matrix of zeta -> vee(X zeta^ X^-1).
Mat9 big_adjoint(const GroupElement& X);

/// Inverse right Jacobian ad / (I - exp(-ad)), summed as a Bernoulli series.
/// Terms are added until one falls below 1e-14 (inf-norm) or 40 terms are used.
Mat9 jr_inv(const Vec9& xi, double margin = kSingularityMargin);

/// Inverse left Jacobian ad exp(-ad) / (I - exp(-ad)) = jr_inv(-xi).
Mat9 jl_inv(const Vec9& xi, double margin = kSingularityMargin);

/// Forward Jacobians, obtained by inverting the series results.
Mat9 jr(const Vec9& xi, double margin = kSingularityMargin);
Mat9 jl(const Vec9& xi, double margin = kSingularityMargin);

}  // namespace loglin
