#pragma once

// Fixed-step RK4 and adaptive Dormand-Prince 5(4) on R^N, with outputs landing
// exactly on a caller-supplied time grid.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <span>
#include <stdexcept>
#include <vector>

#include "loglin/errors.hpp"

namespace loglin {

enum class Method { rk4, adaptive45 };

struct IntegratorConfig {
  Method method = Method::adaptive45;
  double fixed_dt = 10.0;   // s, rk4 only
  double rel_tol = 1e-12;
  double abs_tol = 1e-9;    // m, m/s, rad
  double max_dt = 600.0;    // s
  double min_dt = 1e-6;     // s
  double sample_dt = 60.0;  // s, output grid

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;
};

struct SolveStats {
  long accepted = 0;
  long rejected = 0;
  /// Largest scaled error estimate among accepted steps (<= 1 by construction).
  double max_error_ratio = 0.0;
};

/// Uniform grid 0, dt, 2 dt, ... ending exactly at t_end.
std::vector<double> sample_grid(double t_end, double sample_dt);

template <int N>
class OdeSolver {
 public:
  using Vec = Eigen::Matrix<double, N, 1>;
  using Rhs = std::function<Vec(double, const Vec&)>;
  /// Called after every accepted step; may rewrite the state (e.g. re-basing a chart).
  using OnAccept = std::function<void(double, Vec&)>;
  /// Called at every grid time, including the first, with the grid index.
  using OnSample = std::function<void(std::size_t, double, const Vec&)>;

  OdeSolver(Rhs rhs, IntegratorConfig cfg) : rhs_(std::move(rhs)), cfg_(cfg) {
    cfg_.validate();
  }

  SolveStats solve(Vec y, std::span<const double> grid, const OnSample& on_sample,
                   const OnAccept& on_accept = {}) const {
    SolveStats stats;
    if (grid.empty()) return stats;
    double t = grid.front();
    on_sample(0, t, y);
    double h_proposed = initial_step(t, y, grid);
    for (std::size_t k = 1; k < grid.size(); ++k) {
      const double t_next = grid[k];
      if (cfg_.method == Method::rk4) {
        const double span = t_next - t;
        const auto n = static_cast<long>(std::ceil(span / cfg_.fixed_dt - 1e-9));
        const double h = span / static_cast<double>(std::max(n, 1L));
        for (long i = 0; i < std::max(n, 1L); ++i) {
          y = rk4_step(t, y, h);
          t = (i + 1 == std::max(n, 1L)) ? t_next : t + h;
          if (on_accept) on_accept(t, y);
          ++stats.accepted;
        }
      } else {
        while (t < t_next) {
          double h = std::min(h_proposed, cfg_.max_dt);
          const bool lands = t + h >= t_next - 1e-12 * std::max(1.0, std::abs(t_next));
          if (lands) h = t_next - t;
          Vec y_new;
          const double err = dopri_step(t, y, h, y_new);
          const double factor =
              err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
          if (err <= 1.0) {
            t = lands ? t_next : t + h;
            y = y_new;
            if (on_accept) on_accept(t, y);
            ++stats.accepted;
            stats.max_error_ratio = std::max(stats.max_error_ratio, err);
            // A step shortened to hit the grid says nothing about the natural step.
            h_proposed = lands ? std::max(h_proposed, h * factor) : h * factor;
          } else {
            ++stats.rejected;
            h_proposed = h * factor;
          }
          if (h_proposed < cfg_.min_dt) {
            std::ostringstream os;
            os << "step size " << h_proposed << " s fell below min_dt " << cfg_.min_dt
               << " s at t = " << t << " s";
            throw StepSizeUnderflow(os.str());
          }
        }
      }
      on_sample(k, t, y);
    }
    return stats;
  }

  /// Scaled error of an embedded pair, max over components of
  /// |err_i| / (abs_tol + rel_tol * max(|y_i|, |y_new_i|)).
  [[nodiscard]] double scaled_error(const Vec& err, const Vec& y, const Vec& y_new) const {
    const Vec scale =
        (y.cwiseAbs().cwiseMax(y_new.cwiseAbs()) * cfg_.rel_tol).array() + cfg_.abs_tol;
    return (err.cwiseAbs().array() / scale.array()).maxCoeff();
  }

  Vec rk4_step(double t, const Vec& y, double h) const {
    const Vec k1 = rhs_(t, y);
    const Vec k2 = rhs_(t + 0.5 * h, y + 0.5 * h * k1);
    const Vec k3 = rhs_(t + 0.5 * h, y + 0.5 * h * k2);
    const Vec k4 = rhs_(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  /// One Dormand-Prince step; returns the scaled error and writes the 5th-order solution.
  double dopri_step(double t, const Vec& y, double h, Vec& y_new) const {
    // clang-format off
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // clang-format on
    const Vec k1 = rhs_(t, y);
    const Vec k2 = rhs_(t + c2 * h, y + h * a21 * k1);
    const Vec k3 = rhs_(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Vec k4 = rhs_(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = rhs_(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 =
        rhs_(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = rhs_(t + h, y_new);
    const Vec err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    return scaled_error(err, y, y_new);
  }

 private:
  double initial_step(double t, const Vec& y, std::span<const double> grid) const {
    if (cfg_.method == Method::rk4) return cfg_.fixed_dt;
    // Hairer & Wanner's starting-step heuristic for a 5th-order method.
    const Vec f0 = rhs_(t, y);
    const Vec scale = (y.cwiseAbs() * cfg_.rel_tol).array() + cfg_.abs_tol;
    const double d0 = (y.array() / scale.array()).matrix().norm();
    const double d1 = (f0.array() / scale.array()).matrix().norm();
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min({h0, cfg_.max_dt, grid.back() - grid.front()});
    const Vec f1 = rhs_(t + h0, y + h0 * f0);
    const double d2 = ((f1 - f0).array() / scale.array()).matrix().norm() / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::max(std::min(100.0 * h0, h1), cfg_.min_dt);
  }

  Rhs rhs_;
  IntegratorConfig cfg_;
};

}  // namespace loglin
