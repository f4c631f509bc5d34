#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>

#include "error.hpp"

namespace cavnet {

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-10;
  double max_step = 0.0;  // 0: no cap beyond the span
  std::size_t max_steps = 200'000'000;
};

struct IntegratorStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Dormand–Prince 5(4) with the classic fifth-order FSAL pair and fourth-order
/// continuous extension. Y is a dense Eigen vector or matrix; the solution is
/// reported only at the requested grid times via dense output.
///
/// rhs(t, y, dy) writes dy = f(t, y). observe(i, t_i, y(t_i)) is called once
/// per grid point in order. check(t, y) runs after each accepted step and may
/// throw to abort.
template <typename Y>
IntegratorStats integrate_dopri5(const std::function<void(double, const Y&, Y&)>& rhs, Y y, std::span<const double> grid,
                                 const IntegratorOptions& opt,
                                 const std::function<void(std::size_t, double, const Y&)>& observe,
                                 const std::function<void(double, const Y&)>& check = {}) {
  if (grid.empty()) throw ArgumentError("time grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ArgumentError("time grid must be strictly increasing");
  }
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw ArgumentError("integrator tolerances must be positive");

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                   e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

  IntegratorStats stats;
  double t = grid.front();
  const double t_end = grid.back();
  std::size_t next = 0;
  observe(next++, t, y);
  if (grid.size() == 1) return stats;

  const double span = t_end - t;
  const double max_step = opt.max_step > 0.0 ? std::min(opt.max_step, span) : span;

  Y k1, k2, k3, k4, k5, k6, k7, stage, y_new, err, r2, r3, r4, r5, out;
  rhs(t, y, k1);
  ++stats.rhs_evaluations;

  auto error_norm = [&](const Y& y0, const Y& y1, const Y& e) {
    const auto scale = opt.atol + opt.rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array();
    const double n = static_cast<double>(e.size());
    return std::sqrt((e.cwiseAbs().array() / scale).square().sum() / n);
  };

  // Initial step from the size of the derivative.
  double h;
  {
    const auto scale = opt.atol + opt.rtol * y.cwiseAbs().array();
    const double n = static_cast<double>(y.size());
    const double d0 = std::sqrt((y.cwiseAbs().array() / scale).square().sum() / n);
    const double d1n = std::sqrt((k1.cwiseAbs().array() / scale).square().sum() / n);
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h = std::min({h, max_step, span});
  }

  bool last_rejected = false;
  while (t < t_end) {
    if (stats.steps + stats.rejected >= opt.max_steps) {
      throw NumericalError("integrator exceeded " + std::to_string(opt.max_steps) + " steps at t = " + std::to_string(t));
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw NumericalError("integrator step size underflow at t = " + std::to_string(t));
    }
    if (t + h > t_end) h = t_end - t;

    stage = y + h * a21 * k1;
    rhs(t + c2 * h, stage, k2);
    stage = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, stage, k3);
    stage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, stage, k4);
    stage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, stage, k5);
    stage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, stage, k6);
    y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + h, y_new, k7);
    stats.rhs_evaluations += 6;

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(y, y_new, err);
    if (!std::isfinite(en)) throw NumericalError("integrator produced non-finite values at t = " + std::to_string(t));

    if (en <= 1.0) {
      const double t_new = (t + h >= t_end || t_end - (t + h) < 1e-12 * std::abs(t_end)) ? t_end : t + h;
      // Dense output for grid points inside (t, t_new].
      if (next < grid.size() && grid[next] <= t_new) {
        r2 = y_new - y;
        r3 = h * k1 - r2;
        r4 = r2 - h * k7 - r3;
        r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (next < grid.size() && grid[next] <= t_new) {
          if (grid[next] == t_new) {
            observe(next, grid[next], y_new);
          } else {
            const double th = (grid[next] - t) / h;
            const double th1 = 1.0 - th;
            out = y + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
            observe(next, grid[next], out);
          }
          ++next;
        }
      }
      t = t_new;
      y.swap(y_new);
      k1.swap(k7);
      ++stats.steps;
      if (check) check(t, y);

      double factor = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
      factor = std::clamp(factor, 0.2, last_rejected ? 1.0 : 5.0);
      h = std::min(h * factor, max_step);
      last_rejected = false;
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
    }
  }
  while (next < grid.size()) observe(next, grid[next], y), ++next;
  return stats;
}

}  // namespace cavnet
