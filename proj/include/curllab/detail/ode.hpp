#pragma once

// Dormand-Prince 5(4) integrator with embedded error control.

#include "curllab/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curllab::detail {

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

/// Integrates y' = f(t, y) from t0 to t1 (t1 > t0). The observer is called as
/// observer(t, y) after every accepted step, including the final one. `h` is
/// the initial step guess on entry and the last proposed step on exit.
/// Mixed error control: |err_i| <= tol * (1 + |y_i|) in the RMS sense.
template <int Dim, class Rhs, class Observer>
Eigen::Matrix<double, Dim, 1> dopri5(const Rhs& f, double t0, Eigen::Matrix<double, Dim, 1> y, double t1, double tol,
                                     Observer&& observer, double& h, double max_step = 0.0,
                                     OdeStats* stats = nullptr) {
  using Vec = Eigen::Matrix<double, Dim, 1>;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (!(t1 > t0)) return y;
  const double span = t1 - t0;
  if (max_step <= 0.0) max_step = span;
  if (!(h > 0.0)) h = std::min(max_step, std::max(1e-6, 0.01 * span));
  h = std::min(h, max_step);
  double t = t0;
  Vec k1 = f(t, y);
  long steps = 0;
  while (t < t1) {
    if (++steps > 50'000'000) throw StiffnessError("integrator exceeded the step budget");
    const bool last = t + h >= t1 - 1e-15 * std::max(1.0, std::abs(t1));
    const double hs = last ? t1 - t : h;
    const Vec k2 = f(t + c2 * hs, y + hs * (a21 * k1));
    const Vec k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
    const Vec k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Vec yn = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = f(t + hs, yn);
    const Vec err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = tol * (1.0 + std::max(std::abs(y[i]), std::abs(yn[i])));
      en += (err[i] / sc) * (err[i] / sc);
    }
    en = std::sqrt(en / double(y.size()));
    if (!std::isfinite(en)) en = 1e10;
    const double factor = std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
    if (en <= 1.0) {
      t = last ? t1 : t + hs;
      y = yn;
      k1 = k7;
      if (stats) ++stats->accepted;
      observer(t, y);
      if (!last) h = std::min(max_step, hs * factor);
    } else {
      if (stats) ++stats->rejected;
      h = hs * std::min(factor, 0.9);
      if (h < 1e-13 * std::max(1.0, std::abs(t))) {
        std::ostringstream msg;
        msg << "step size underflow at t = " << t;
        throw StiffnessError(msg.str());
      }
    }
  }
  return y;
}

}  // namespace curllab::detail
