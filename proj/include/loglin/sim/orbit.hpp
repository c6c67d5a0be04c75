#pragma once

#include <utility>

#include "loglin/lie.hpp"

namespace loglin::sim {

struct OrbitElements {
  double semi_major_axis_m = 0.0;
  double eccentricity = 0.0;
  double inclination_rad = 0.0;
  double raan_rad = 0.0;
  double arg_perigee_rad = 0.0;
  double true_anomaly_rad = 0.0;

  [[nodiscard]] double perigee_radius() const {
    return semi_major_axis_m * (1.0 - eccentricity);
  }
};

struct CartesianState {
  Vec3 p;  // m
  Vec3 v;  // m/s
};

/// Classical Keplerian elements to inertial position and velocity.
/// Throws DomainError for e outside [0, 1) or a non-positive semi-major axis.
CartesianState elements_to_state(const OrbitElements& el, double mu);

/// Two-body period 2 pi sqrt(a^3 / mu).
double orbital_period(double semi_major_axis_m, double mu);

}  // namespace loglin::sim
