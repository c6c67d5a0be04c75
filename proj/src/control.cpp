#include "loglin/control.hpp"

#include <Eigen/Eigenvalues>

#include <sstream>

#include "loglin/errors.hpp"
#include "loglin/log_error.hpp"

namespace loglin {

Mat96 input_matrix() {
  Mat96 B = Mat96::Zero();
  B.block<3, 3>(slot::kVelocity, 0) = Mat3::Identity();
  B.block<3, 3>(slot::kRotation, 3) = Mat3::Identity();
  return B;
}

Mat9 closed_loop_A(const Vec9& n_ref) { return -ad_matrix(n_ref) + a_c_matrix(); }

double spectral_abscissa(const Mat9& A) {
  Eigen::EigenSolver<Mat9> es(A, false);
  if (es.info() != Eigen::Success) {
    throw GainSynthesisFailure("eigenvalue computation did not converge");
  }
  return es.eigenvalues().real().maxCoeff();
}

GainMatrix::GainMatrix(const Mat69& K, const Vec9& n_ref, double min_decay)
    : K_(K), closed_loop_(closed_loop_A(n_ref) + input_matrix() * K) {
  if (!K.allFinite() || !n_ref.allFinite()) {
    throw GainSynthesisFailure("gain or reference input has non-finite entries");
  }
  abscissa_ = loglin::spectral_abscissa(closed_loop_);
  if (!(abscissa_ < 0.0) || !(abscissa_ <= -min_decay)) {
    std::ostringstream os;
    os << "A + BK is not Hurwitz with margin " << min_decay << " (spectral abscissa "
       << abscissa_ << ")";
    throw GainSynthesisFailure(os.str());
  }
}

GainMatrix default_gain(const Vec9& n_ref, double decay_rate) {
  if (!(decay_rate > 0.0)) {
    throw GainSynthesisFailure("decay rate must be positive");
  }
  if (position_slot(n_ref).cwiseAbs().maxCoeff() != 0.0) {
    throw GainSynthesisFailure("reference input must have a zero position slot");
  }
  // The rotation channel closes xi_R on itself; the acceleration channel cancels the
  // -[a]x xi_R coupling and turns each (xi_p, xi_v) axis into s^2 + kv s + kp with
  // roots -2 decay_rate and -3 decay_rate. The residual -[omega]x terms commute
  // with the rest and only add imaginary parts.
  const double s1 = 2.0 * decay_rate;
  const double s2 = 3.0 * decay_rate;
  const double kp = s1 * s2;
  const double kv = s1 + s2;
  const double kr = 2.0 * decay_rate;

  Mat69 K = Mat69::Zero();
  K.block<3, 3>(0, slot::kPosition) = -kp * Mat3::Identity();
  K.block<3, 3>(0, slot::kVelocity) = -kv * Mat3::Identity();
  K.block<3, 3>(0, slot::kRotation) = hat3(velocity_slot(n_ref));
  K.block<3, 3>(3, slot::kRotation) = -kr * Mat3::Identity();
  // Verified on construction; the eigenvalue solver needs a little slack.
  return GainMatrix(K, n_ref, decay_rate * (1.0 - 1e-9));
}

Vec9 u1_dynamic_inversion(const GroupElement& X, const GroupElement& X_ref,
                          const GravityModel& model) {
  Vec9 u = Vec9::Zero();
  velocity_slot(u) = X.R.transpose() * (gravity(X.p, model) - gravity(X_ref.p, model));
  return u;
}

Vec9 u2_stabilizing(const Vec9& xi, const GainMatrix& K) {
  return jl(xi) * (input_matrix() * (K.matrix() * xi));
}

BodyInput apply_mismatch_as_input(const Vec9& n_ref, const Vec9& n_tilde) {
  if (position_slot(n_tilde).cwiseAbs().maxCoeff() != 0.0) {
    throw DomainError(
        "control mismatch has a position-slot component, which no body input can realize");
  }
  return apply_mismatch_as_generalized_input(n_ref, n_tilde);
}

BodyInput apply_mismatch_as_generalized_input(const Vec9& n_ref, const Vec9& n_tilde) {
  const Vec9 n = n_ref - n_tilde;
  BodyInput u;
  u.position_rate = position_slot(n);
  u.a = velocity_slot(n);
  u.omega = rotation_slot(n);
  return u;
}

}  // namespace loglin
