#pragma once

// Newtonian truth model of a thrusting rigid body and its mixed-invariant form
//
//   X' = (M - C) X + X (N + C).

#include "loglin/lie.hpp"

namespace loglin {

/// Minimum distance from the attracting center at which gravity is evaluated.
inline constexpr double kGravityGuardRadius = 1.0;  // m

/// Standard Earth gravitational parameter.
inline constexpr double kEarthMu = 3.986004418e14;  // m^3/s^2

/// Point-mass gravity g(p) = -mu p / |p|^3.
struct GravityModel {
  double mu = kEarthMu;  // m^3/s^2
};

/// Body-frame inputs: commanded acceleration and angular velocity.
///
/// `position_rate` fills the position slot of n = N^v, i.e. adds R * position_rate
/// to p'. No physical spacecraft has that channel; it is zero everywhere except
/// in closed-loop runs that apply a full se2(3) feedback.
struct BodyInput {
  Vec3 a = Vec3::Zero();      // m/s^2
  Vec3 omega = Vec3::Zero();  // rad/s
  Vec3 position_rate = Vec3::Zero();  // m/s
};

/// Time derivative of (R, v, p).
struct StateDerivative {
  Mat3 R_dot = Mat3::Zero();
  Vec3 v_dot = Vec3::Zero();
  Vec3 p_dot = Vec3::Zero();

  /// As a 5x5 matrix with the layout of GroupElement::matrix() (bottom rows zero).
  [[nodiscard]] Mat5 embedded() const;
};

/// Control mismatch n~ = n_ref - n and world-frame gravity mismatch m~.
struct MismatchPair {
  Vec9 n_tilde = Vec9::Zero();
  Vec9 m_tilde = Vec9::Zero();
};

/// Throws OriginSingularity when |p| < kGravityGuardRadius.
Vec3 gravity(const Vec3& p, const GravityModel& model);
Mat3 gravity_jacobian(const Vec3& p, const GravityModel& model);

/// n = N^v = (position_rate, a, omega).
Vec9 input_vector(const BodyInput& u);

/// The constant coupling matrix C (single 1 at row 4, column 5).
Mat5 c_matrix();

/// M = wedge((0, g(p), 0)).
Mat5 gravity_matrix(const Vec3& p, const GravityModel& model);

StateDerivative classical_rhs(const GroupElement& X, const BodyInput& u,
                              const GravityModel& model);

Mat5 mixed_invariant_rhs(const GroupElement& X, const BodyInput& u,
                         const GravityModel& model);

MismatchPair mismatch(const Vec9& n_ref, const Vec9& n, const Vec3& p_ref,
                      const Vec3& p, const GravityModel& model);

/// Specific orbital energy v^2/2 - mu/r.
double specific_energy(const Vec3& p, const Vec3& v, const GravityModel& model);

}  // namespace loglin
