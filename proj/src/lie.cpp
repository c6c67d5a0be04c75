#include "loglin/lie.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "loglin/errors.hpp"

namespace loglin {

namespace {

void check_angle(double theta, double margin, const char* where) {
  if (theta >= std::numbers::pi - margin) {
    std::ostringstream os;
    os << where << ": rotation angle " << theta << " rad is within " << margin
       << " rad of pi";
    throw NearSingularity(os.str());
  }
}

// Coefficients B_k / k! of x / (1 - exp(-x)), i.e. Bernoulli numbers with B_1 = +1/2.
// Obtained from the recurrence sum_{j<=k} c_j / (k + 1 - j)! = 0 for the x / (e^x - 1)
// convention, then flipping the sign of the k = 1 term.
constexpr int kMaxSeriesTerms = 40;

const std::array<double, kMaxSeriesTerms + 1>& bernoulli_plus_over_factorial() {
  static const auto coeffs = [] {
    std::array<double, kMaxSeriesTerms + 2> inv_fact{};
    inv_fact[0] = 1.0;
    for (int i = 1; i < static_cast<int>(inv_fact.size()); ++i) {
      inv_fact[i] = inv_fact[i - 1] / i;
    }
    std::array<double, kMaxSeriesTerms + 1> c{};
    c[0] = 1.0;
    for (int k = 1; k <= kMaxSeriesTerms; ++k) {
      double s = 0.0;
      for (int j = 0; j < k; ++j) s += c[j] * inv_fact[k + 1 - j];
      c[k] = -s;
    }
    for (int k = 3; k <= kMaxSeriesTerms; k += 2) c[k] = 0.0;  // exact zeros
    c[1] = 0.5;
    return c;
  }();
  return coeffs;
}

}  // namespace

Vec9 stack(const Vec3& xi_p, const Vec3& xi_v, const Vec3& xi_R) {
  Vec9 xi;
  xi << xi_p, xi_v, xi_R;
  return xi;
}

Mat5 GroupElement::matrix() const {
  Mat5 m = Mat5::Identity();
  m.block<3, 3>(0, 0) = R;
  m.block<3, 1>(0, 3) = v;
  m.block<3, 1>(0, 4) = p;
  return m;
}

GroupElement GroupElement::from_matrix(const Mat5& m) {
  return {m.block<3, 3>(0, 0), m.block<3, 1>(0, 3), m.block<3, 1>(0, 4)};
}

bool GroupElement::is_valid(double tol) const {
  return is_rotation(R, tol) && v.allFinite() && p.allFinite();
}

bool is_rotation(const Mat3& R, double tol) {
  if (!R.allFinite()) return false;
  return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(R.determinant() - 1.0) <= tol;
}

Mat3 project_to_so3(const Mat3& M) {
  Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 U = svd.matrixU();
  const Mat3& V = svd.matrixV();
  if ((U * V.transpose()).determinant() < 0.0) U.col(2) *= -1.0;
  return U * V.transpose();
}

Mat3 hat3(const Vec3& w) {
  Mat3 S;
  // clang-format off
  S <<    0.0, -w.z(),  w.y(),
        w.z(),    0.0, -w.x(),
       -w.y(),  w.x(),    0.0;
  // clang-format on
  return S;
}

Mat3 so3_exp(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Mat3 W = hat3(w);
  double a;  // sin(t)/t
  double b;  // (1 - cos(t))/t^2
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    const double s = std::sin(0.5 * theta);
    a = std::sin(theta) / theta;
    b = 2.0 * s * s / theta2;
  }
  return Mat3::Identity() + a * W + b * W * W;
}

Vec3 so3_log(const Mat3& R, double margin) {
  const Vec3 axial(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  const double sin_theta = 0.5 * axial.norm();
  const double cos_theta = std::clamp(0.5 * (R.trace() - 1.0), -1.0, 1.0);
  const double theta = std::atan2(sin_theta, cos_theta);
  check_angle(theta, margin, "so3_log");

  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    return 0.5 * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0) * axial;
  }
  if (cos_theta > -0.8) {
    return (0.5 * theta / sin_theta) * axial;
  }
  // Near pi the antisymmetric part loses precision; read the axis from the
  // symmetric part (R + R^T)/2 - cos(t) I = (1 - cos(t)) n n^T instead.
  const Mat3 S = 0.5 * (R + R.transpose()) - cos_theta * Mat3::Identity();
  Eigen::Index k = 0;
  S.diagonal().maxCoeff(&k);
  Vec3 n = S.col(k) / std::sqrt(S(k, k) * (1.0 - cos_theta));
  n.normalize();
  if (n.dot(axial) < 0.0) n = -n;
  return theta * n;
}

Mat3 so3_left_jacobian(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Mat3 W = hat3(w);
  double b;  // (1 - cos(t))/t^2
  double c;  // (t - sin(t))/t^3
  if (theta < kSmallAngle) {
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    c = 1.0 / 6.0 - theta2 / 120.0 + theta2 * theta2 / 5040.0;
  } else {
    const double s = std::sin(0.5 * theta);
    b = 2.0 * s * s / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }
  return Mat3::Identity() + b * W + c * W * W;
}

Mat3 so3_right_jacobian(const Vec3& w) { return so3_left_jacobian(-w); }

Mat3 so3_left_jacobian_inv(const Vec3& w, double margin) {
  const double theta2 = w.squaredNorm();
  const double theta = std::sqrt(theta2);
  check_angle(theta, margin, "so3_left_jacobian_inv");
  const Mat3 W = hat3(w);
  double d;  // 1/t^2 - (1 + cos(t)) / (2 t sin(t))
  if (theta < 1e-2) {
    d = 1.0 / 12.0 + theta2 / 720.0 + theta2 * theta2 / 30240.0 +
        theta2 * theta2 * theta2 / 1209600.0;
  } else {
    const double half = 0.5 * theta;
    d = (1.0 - half / std::tan(half)) / theta2;
  }
  return Mat3::Identity() - 0.5 * W + d * W * W;
}

Mat3 so3_right_jacobian_inv(const Vec3& w, double margin) {
  return so3_left_jacobian_inv(-w, margin);
}

Mat5 wedge(const Vec9& xi) {
  Mat5 m = Mat5::Zero();
  m.block<3, 3>(0, 0) = hat3(rotation_slot(xi));
  m.block<3, 1>(0, 3) = velocity_slot(xi);
  m.block<3, 1>(0, 4) = position_slot(xi);
  return m;
}

Vec9 vee(const Mat5& A, double tol) {
  const double bottom = A.block<2, 5>(3, 0).cwiseAbs().maxCoeff();
  const Mat3 top = A.block<3, 3>(0, 0);
  const double asym = (top + top.transpose()).cwiseAbs().maxCoeff();
  if (!(bottom <= tol) || !(asym <= tol)) {
    std::ostringstream os;
    os << "vee: matrix is not in se2(3) (bottom rows " << bottom
       << ", symmetric part " << asym << ", tol " << tol << ")";
    throw NotInAlgebra(os.str());
  }
  const Vec3 xi_R(0.5 * (top(2, 1) - top(1, 2)), 0.5 * (top(0, 2) - top(2, 0)),
                  0.5 * (top(1, 0) - top(0, 1)));
  return stack(A.block<3, 1>(0, 4), A.block<3, 1>(0, 3), xi_R);
}

GroupElement se23_exp(const Vec9& xi) {
  const Vec3 w = rotation_slot(xi);
  const Mat3 J = so3_left_jacobian(w);
  return {so3_exp(w), J * velocity_slot(xi), J * position_slot(xi)};
}

Vec9 se23_log(const GroupElement& X, double margin) {
  const Vec3 w = so3_log(X.R, margin);
  const Mat3 Jinv = so3_left_jacobian_inv(w, margin);
  return stack(Jinv * X.p, Jinv * X.v, w);
}

GroupElement compose(const GroupElement& X, const GroupElement& Y) {
  return {X.R * Y.R, X.R * Y.v + X.v, X.R * Y.p + X.p};
}

GroupElement inverse(const GroupElement& X) {
  const Mat3 Rt = X.R.transpose();
  return {Rt, -Rt * X.v, -Rt * X.p};
}

Mat9 ad_matrix(const Vec9& xi) {
  const Mat3 W = hat3(rotation_slot(xi));
  Mat9 ad = Mat9::Zero();
  ad.block<3, 3>(slot::kPosition, slot::kPosition) = W;
  ad.block<3, 3>(slot::kVelocity, slot::kVelocity) = W;
  ad.block<3, 3>(slot::kRotation, slot::kRotation) = W;
  ad.block<3, 3>(slot::kPosition, slot::kRotation) = hat3(position_slot(xi));
  ad.block<3, 3>(slot::kVelocity, slot::kRotation) = hat3(velocity_slot(xi));
  return ad;
}

Mat9 big_adjoint(const GroupElement& X) {
  Mat9 Ad = Mat9::Zero();
  Ad.block<3, 3>(slot::kPosition, slot::kPosition) = X.R;
  Ad.block<3, 3>(slot::kVelocity, slot::kVelocity) = X.R;
  Ad.block<3, 3>(slot::kRotation, slot::kRotation) = X.R;
  Ad.block<3, 3>(slot::kPosition, slot::kRotation) = hat3(X.p) * X.R;
  Ad.block<3, 3>(slot::kVelocity, slot::kRotation) = hat3(X.v) * X.R;
  return Ad;
}

Mat9 jr_inv(const Vec9& xi, double margin) {
  check_angle(rotation_slot(xi).norm(), margin, "jr_inv");
  const auto& c = bernoulli_plus_over_factorial();
  const Mat9 ad = ad_matrix(xi);
  Mat9 sum = Mat9::Identity();
  Mat9 power = Mat9::Identity();
  for (int k = 1; k <= kMaxSeriesTerms; ++k) {
    power = power * ad;
    if (c[k] == 0.0) continue;
    const Mat9 term = c[k] * power;
    sum += term;
    if (term.cwiseAbs().rowwise().sum().maxCoeff() < 1e-14) break;
  }
  return sum;
}

Mat9 jl_inv(const Vec9& xi, double margin) { return jr_inv(-xi, margin); }

Mat9 jr(const Vec9& xi, double margin) {
  return jr_inv(xi, margin).partialPivLu().inverse();
}

Mat9 jl(const Vec9& xi, double margin) {
  return jl_inv(xi, margin).partialPivLu().inverse();
}

}  // namespace loglin
