#include "loglin/sim/orbit.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <sstream>

#include "loglin/errors.hpp"

namespace loglin::sim {

CartesianState elements_to_state(const OrbitElements& el, double mu) {
  if (!(el.eccentricity >= 0.0) || !(el.eccentricity < 1.0)) {
    std::ostringstream os;
    os << "eccentricity " << el.eccentricity << " outside [0, 1)";
    throw DomainError(os.str());
  }
  if (!(el.semi_major_axis_m > 0.0) || !(mu > 0.0)) {
    throw DomainError("semi-major axis and mu must be positive");
  }
  const double e = el.eccentricity;
  const double slr = el.semi_major_axis_m * (1.0 - e * e);
  const double nu = el.true_anomaly_rad;
  const double r = slr / (1.0 + e * std::cos(nu));
  const Vec3 p_pf(r * std::cos(nu), r * std::sin(nu), 0.0);
  const Vec3 v_pf = std::sqrt(mu / slr) * Vec3(-std::sin(nu), e + std::cos(nu), 0.0);

  // Perifocal to inertial: Rz(raan) Rx(i) Rz(argp).
  const Mat3 Q = (Eigen::AngleAxisd(el.raan_rad, Vec3::UnitZ()) *
                  Eigen::AngleAxisd(el.inclination_rad, Vec3::UnitX()) *
                  Eigen::AngleAxisd(el.arg_perigee_rad, Vec3::UnitZ()))
                     .toRotationMatrix();
  return {Q * p_pf, Q * v_pf};
}

double orbital_period(double semi_major_axis_m, double mu) {
  return 2.0 * std::numbers::pi * std::sqrt(std::pow(semi_major_axis_m, 3) / mu);
}

}  // namespace loglin::sim
