#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "loglin/control.hpp"
#include "loglin/errors.hpp"
#include "loglin/log_error.hpp"
#include "property_checks.hpp"
#include "test_support.hpp"

using namespace loglin;
using loglin::testing::Rng;

namespace {

const GravityModel kEarth;

Vec9 reference_input(Rng& rng) {
  Vec9 n;
  n << 0, 0, 0, rng.vec3(0.01), rng.vec3(1e-3);
  return n;
}

GroupElement orbital_state(Rng& rng) {
  GroupElement X;
  X.R = so3_exp(rng.rotvec(3.0));
  X.p = rng.uniform(6.6e6, 4e7) * rng.unit3();
  X.v = rng.uniform(1e3, 1e4) * rng.unit3();
  return X;
}

/// Classical RK4 for xi' = A xi with a fixed step.
Vec9 rk4_linear(const Mat9& A, Vec9 x, double t, int steps) {
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Vec9 k1 = A * x;
    const Vec9 k2 = A * (x + 0.5 * h * k1);
    const Vec9 k3 = A * (x + 0.5 * h * k2);
    const Vec9 k4 = A * (x + h * k3);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

}  // namespace

TEST(InputMatrix, LayoutAndOrthonormalColumns) {
  const Mat96 B = input_matrix();
  EXPECT_EQ(B.transpose() * B, (Eigen::Matrix<double, 6, 6>::Identity()));
  EXPECT_EQ(B.topRows<3>(), (Eigen::Matrix<double, 3, 6>::Zero()));
  EXPECT_EQ(Mat3(B.block<3, 3>(slot::kVelocity, 0)), Mat3::Identity());
  EXPECT_EQ(Mat3(B.block<3, 3>(slot::kRotation, 3)), Mat3::Identity());
}

TEST(ClosedLoopA, ZeroInputGivesCouplingOnly) {
  EXPECT_EQ(closed_loop_A(Vec9::Zero()), a_c_matrix());
}

TEST(ClosedLoopA, BlockStructure) {
  Rng rng(1);
  const Vec9 n = reference_input(rng);
  const Vec3 a = velocity_slot(n), w = rotation_slot(n);
  const Mat9 A = closed_loop_A(n);
  Mat9 expected = Mat9::Zero();
  expected.block<3, 3>(0, 0) = -hat3(w);
  expected.block<3, 3>(0, 3) = Mat3::Identity();
  expected.block<3, 3>(3, 3) = -hat3(w);
  expected.block<3, 3>(3, 6) = -hat3(a);
  expected.block<3, 3>(6, 6) = -hat3(w);
  EXPECT_LE((A - expected).cwiseAbs().maxCoeff(), 1e-18);
}

TEST(ClosedLoopA, ExponentialMatchesRk4) {
  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    const Mat9 A = closed_loop_A(reference_input(rng));
    const Vec9 x0 = rng.xi(100.0, 0.5);
    const double t = 600.0;
    const Vec9 exact = loglin::testing::expm_scaled<Mat9>(A * t) * x0;
    const Vec9 rk = rk4_linear(A, x0, t, 6000);
    EXPECT_LE((exact - rk).norm(), 1e-9 * exact.norm());
  }
}

TEST(SpectralAbscissa, DiagonalAndRotation) {
  Mat9 A = Mat9::Zero();
  A.diagonal() << -1, -2, -3, -4, -0.5, -6, -7, -8, -9;
  EXPECT_NEAR(spectral_abscissa(A), -0.5, 1e-15);
  A.block<2, 2>(0, 0) << -0.1, 5, -5, -0.1;  // eigenvalues -0.1 +- 5i
  EXPECT_NEAR(spectral_abscissa(A), -0.1, 1e-14);
}

TEST(DefaultGain, HurwitzWithRequestedDecay) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Vec9 n = reference_input(rng);
    const GainMatrix K = default_gain(n, 0.01);
    const Mat9 Acl = closed_loop_A(n) + input_matrix() * K.matrix();
    EXPECT_LE((Acl - K.closed_loop()).cwiseAbs().maxCoeff(), 0.0);
    const Eigen::EigenSolver<Mat9> es(Acl, false);
    for (int k = 0; k < 9; ++k) EXPECT_LE(es.eigenvalues()(k).real(), -0.01 * (1 - 1e-8));
  }
}

TEST(DefaultGain, ZeroInputEigenvalues) {
  const GainMatrix K = default_gain(Vec9::Zero(), 0.01);
  const Eigen::EigenSolver<Mat9> es(K.closed_loop(), false);
  std::vector<double> re;
  for (int k = 0; k < 9; ++k) {
    EXPECT_NEAR(es.eigenvalues()(k).imag(), 0.0, 1e-9);
    re.push_back(es.eigenvalues()(k).real());
  }
  std::sort(re.begin(), re.end());
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(re[k], -0.03, 1e-9);
  for (int k = 3; k < 9; ++k) EXPECT_NEAR(re[k], -0.02, 1e-6);
}

TEST(DefaultGain, ClosedLoopDecays) {
  Rng rng(4);
  const Vec9 n = reference_input(rng);
  const GainMatrix K = default_gain(n, 0.01);
  const Vec9 x0 = rng.xi(100.0, 0.5);
  const Vec9 x = loglin::testing::expm_scaled<Mat9>(K.closed_loop() * 2000.0) * x0;
  EXPECT_LT(x.norm(), 1e-3 * x0.norm());
}

TEST(GainMatrix, RejectsUnstableOrInvalid) {
  EXPECT_THROW(GainMatrix(Mat69::Zero(), Vec9::Zero()), GainSynthesisFailure);
  EXPECT_THROW(default_gain(Vec9::Zero(), 0.0), GainSynthesisFailure);
  EXPECT_THROW(default_gain(Vec9::Zero(), -1.0), GainSynthesisFailure);
  Vec9 n = Vec9::Zero();
  n(0) = 1.0;
  EXPECT_THROW(default_gain(n, 0.01), GainSynthesisFailure);
  Mat69 K = default_gain(Vec9::Zero(), 0.01).matrix();
  K(0, 0) = std::nan("");
  EXPECT_THROW(GainMatrix(K, Vec9::Zero()), GainSynthesisFailure);
  // Stable but slower than requested.
  EXPECT_THROW(GainMatrix(default_gain(Vec9::Zero(), 0.01).matrix(), Vec9::Zero(), 0.05),
               GainSynthesisFailure);
}

TEST(DynamicInversion, ZeroWhenPositionsCoincide) {
  Rng rng(5);
  const GroupElement X_ref = orbital_state(rng);
  GroupElement X = X_ref;
  X.R = so3_exp(rng.rotvec(2.0));
  X.v += rng.vec3(10);
  EXPECT_EQ(u1_dynamic_inversion(X, X_ref, kEarth), Vec9::Zero());
}

TEST(DynamicInversion, IdentityAttitudeGivesGravityDifference) {
  Rng rng(6);
  const GroupElement X_ref = orbital_state(rng);
  GroupElement X;
  X.p = X_ref.p + rng.vec3(1e4);
  const Vec9 u = u1_dynamic_inversion(X, X_ref, kEarth);
  EXPECT_EQ(position_slot(u), Vec3::Zero());
  EXPECT_EQ(rotation_slot(u), Vec3::Zero());
  EXPECT_EQ(velocity_slot(u), gravity(X.p, kEarth) - gravity(X_ref.p, kEarth));
}

TEST(DynamicInversion, CancelsGravityMismatchTerm) {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto e = loglin::testing::random_error_pair(rng);
    const GroupElement X = actual_from_error(e.X_ref, e.xi);
    const Vec9 u1 = u1_dynamic_inversion(X, e.X_ref, kEarth);
    const MismatchPair mm = mismatch(Vec9::Zero(), Vec9::Zero(), e.X_ref.p, X.p, kEarth);
    const Vec9 grav = jr_inv(e.xi) * (big_adjoint(inverse(e.X_ref)) * mm.m_tilde);
    const Vec9 sum = jl_inv(e.xi) * u1 + grav;
    EXPECT_LE(sum.norm(), 1e-11 * std::max(1e-12, grav.norm()));
  }
}

TEST(DynamicInversion, ErrorDynamicsBecomeLinear) {
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const auto e = loglin::testing::random_error_pair(rng);
    const GroupElement X = actual_from_error(e.X_ref, e.xi);
    const Vec9 n_ref = reference_input(rng);
    MismatchPair mm = mismatch(n_ref, n_ref, e.X_ref.p, X.p, kEarth);
    mm.n_tilde = u1_dynamic_inversion(X, e.X_ref, kEarth);
    const Vec9 rhs = error_rhs(e.xi, n_ref, mm, e.X_ref);
    const Vec9 lin = closed_loop_A(n_ref) * e.xi;
    EXPECT_LE((rhs - lin).norm(), 1e-11 * std::max(1.0, lin.norm()));
  }
}

TEST(Stabilizing, ZeroCases) {
  const GainMatrix K = default_gain(Vec9::Zero(), 0.01);
  EXPECT_EQ(u2_stabilizing(Vec9::Zero(), K), Vec9::Zero());
}

TEST(Stabilizing, InverseJacobianRecoversFeedback) {
  Rng rng(9);
  for (int i = 0; i < 500; ++i) {
    const Vec9 n = reference_input(rng);
    const GainMatrix K = default_gain(n, 0.01);
    const Vec9 xi = rng.xi(1e5, 3.0);
    const Vec9 target = input_matrix() * (K.matrix() * xi);
    const Vec9 got = jl_inv(xi) * u2_stabilizing(xi, K);
    EXPECT_LE((got - target).norm(), 1e-10 * std::max(1.0, target.norm()));
  }
}

TEST(Stabilizing, CombinedInputGivesClosedLoopMatrix) {
  Rng rng(10);
  for (int i = 0; i < 500; ++i) {
    const auto e = loglin::testing::random_error_pair(rng);
    const GroupElement X = actual_from_error(e.X_ref, e.xi);
    const Vec9 n_ref = reference_input(rng);
    const GainMatrix K = default_gain(n_ref, 0.01);
    MismatchPair mm = mismatch(n_ref, n_ref, e.X_ref.p, X.p, kEarth);
    mm.n_tilde = u1_dynamic_inversion(X, e.X_ref, kEarth) + u2_stabilizing(e.xi, K);
    const Vec9 rhs = error_rhs(e.xi, n_ref, mm, e.X_ref);
    const Vec9 lin = K.closed_loop() * e.xi;
    EXPECT_LE((rhs - lin).norm(), 1e-10 * std::max(1.0, lin.norm()));
  }
}

TEST(ApplyMismatch, ZeroMismatchReturnsReference) {
  Rng rng(11);
  const Vec9 n = reference_input(rng);
  const BodyInput u = apply_mismatch_as_input(n, Vec9::Zero());
  EXPECT_EQ(u.a, velocity_slot(n));
  EXPECT_EQ(u.omega, rotation_slot(n));
  EXPECT_EQ(u.position_rate, Vec3::Zero());
}

TEST(ApplyMismatch, RoundTripThroughMismatch) {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const Vec9 n_ref = reference_input(rng);
    Vec9 n_tilde;
    n_tilde << 0, 0, 0, rng.vec3(0.01), rng.vec3(1e-3);
    const BodyInput u = apply_mismatch_as_input(n_ref, n_tilde);
    const Vec3 p(7e6, 0, 0);
    const MismatchPair mm = mismatch(n_ref, input_vector(u), p, p, kEarth);
    EXPECT_LE((mm.n_tilde - n_tilde).norm(), 1e-17);
  }
}

TEST(ApplyMismatch, PositionSlotRejectedOrRouted) {
  Vec9 n_tilde = Vec9::Zero();
  n_tilde(1) = 0.5;
  EXPECT_THROW(apply_mismatch_as_input(Vec9::Zero(), n_tilde), DomainError);
  const BodyInput u = apply_mismatch_as_generalized_input(Vec9::Zero(), n_tilde);
  EXPECT_EQ(u.position_rate, Vec3(0, -0.5, 0));
  EXPECT_EQ(input_vector(u), -n_tilde);
}
