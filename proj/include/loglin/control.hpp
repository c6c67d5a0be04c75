#pragma once

// Dynamic inversion of the gravity mismatch (u1) and linear stabilizing
// feedback (u2) for the log-error system.

#include "loglin/dynamics.hpp"
#include "loglin/lie.hpp"

namespace loglin {

using Mat96 = Eigen::Matrix<double, 9, 6>;
using Mat69 = Eigen::Matrix<double, 6, 9>;

/// 9x6 input matrix: channel 0..2 drives the velocity slot, 3..5 the rotation slot.
Mat96 input_matrix();

/// A(t) = -ad_{n_ref} + A_C.
Mat9 closed_loop_A(const Vec9& n_ref);

/// Largest real part among the eigenvalues of `A`.
double spectral_abscissa(const Mat9& A);

/// State-feedback gain K (rows: acceleration channel, angular-velocity channel).
///
/// Construction verifies that A(n_ref) + B K is Hurwitz with spectral abscissa
/// <= -min_decay and throws GainSynthesisFailure otherwise.
class GainMatrix {
 public:
  GainMatrix(const Mat69& K, const Vec9& n_ref, double min_decay = 0.0);

  [[nodiscard]] const Mat69& matrix() const { return K_; }
  /// A(n_ref) + B K for the n_ref used at construction.
  [[nodiscard]] const Mat9& closed_loop() const { return closed_loop_; }
  [[nodiscard]] double spectral_abscissa() const { return abscissa_; }

 private:
  Mat69 K_;
  Mat9 closed_loop_;
  double abscissa_;
};

/// Gain for constant n_ref placing every eigenvalue of A + B K at real part <= -decay_rate.
GainMatrix default_gain(const Vec9& n_ref, double decay_rate = 0.01);

/// u1 = -Ad_{X^-1} m~: velocity slot R^T (g(p) - g(pref)), other slots zero.
Vec9 u1_dynamic_inversion(const GroupElement& X, const GroupElement& X_ref,
                          const GravityModel& model);

/// u2 = Jl(xi) B K xi, so that Jl^-1(xi) u2 = B K xi.
Vec9 u2_stabilizing(const Vec9& xi, const GainMatrix& K);

/// Actual input n = n_ref - n~ for a mismatch with zero position slot.
/// Throws DomainError if the position slot of `n_tilde` is nonzero.
BodyInput apply_mismatch_as_input(const Vec9& n_ref, const Vec9& n_tilde);

/// Same as apply_mismatch_as_input but routes the position slot into
/// BodyInput::position_rate instead of rejecting it.
BodyInput apply_mismatch_as_generalized_input(const Vec9& n_ref, const Vec9& n_tilde);

}  // namespace loglin
