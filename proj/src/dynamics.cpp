#include "loglin/dynamics.hpp"

#include <sstream>

#include "loglin/errors.hpp"

namespace loglin {

namespace {

double guarded_radius(const Vec3& p) {
  const double r = p.norm();
  if (!(r >= kGravityGuardRadius)) {
    std::ostringstream os;
    os << "gravity evaluated at |p| = " << r << " m, inside the " << kGravityGuardRadius
       << " m guard radius";
    throw OriginSingularity(os.str());
  }
  return r;
}

}  // namespace

Mat5 StateDerivative::embedded() const {
  Mat5 m = Mat5::Zero();
  m.block<3, 3>(0, 0) = R_dot;
  m.block<3, 1>(0, 3) = v_dot;
  m.block<3, 1>(0, 4) = p_dot;
  return m;
}

Vec3 gravity(const Vec3& p, const GravityModel& model) {
  const double r = guarded_radius(p);
  return (-model.mu / (r * r * r)) * p;
}

Mat3 gravity_jacobian(const Vec3& p, const GravityModel& model) {
  const double r = guarded_radius(p);
  const Vec3 n = p / r;
  return (-model.mu / (r * r * r)) * (Mat3::Identity() - 3.0 * n * n.transpose());
}

Vec9 input_vector(const BodyInput& u) { return stack(u.position_rate, u.a, u.omega); }

Mat5 c_matrix() {
  Mat5 C = Mat5::Zero();
  C(3, 4) = 1.0;
  return C;
}

Mat5 gravity_matrix(const Vec3& p, const GravityModel& model) {
  return wedge(stack(Vec3::Zero(), gravity(p, model), Vec3::Zero()));
}

StateDerivative classical_rhs(const GroupElement& X, const BodyInput& u,
                              const GravityModel& model) {
  StateDerivative d;
  d.p_dot = X.v + X.R * u.position_rate;
  d.v_dot = X.R * u.a + gravity(X.p, model);
  d.R_dot = X.R * hat3(u.omega);
  return d;
}

Mat5 mixed_invariant_rhs(const GroupElement& X, const BodyInput& u,
                         const GravityModel& model) {
  const Mat5 M = gravity_matrix(X.p, model);
  const Mat5 N = wedge(input_vector(u));
  const Mat5 C = c_matrix();
  const Mat5 Xm = X.matrix();
  return (M - C) * Xm + Xm * (N + C);
}

MismatchPair mismatch(const Vec9& n_ref, const Vec9& n, const Vec3& p_ref,
                      const Vec3& p, const GravityModel& model) {
  MismatchPair mm;
  mm.n_tilde = n_ref - n;
  velocity_slot(mm.m_tilde) = gravity(p_ref, model) - gravity(p, model);
  return mm;
}

double specific_energy(const Vec3& p, const Vec3& v, const GravityModel& model) {
  return 0.5 * v.squaredNorm() - model.mu / p.norm();
}

}  // namespace loglin
