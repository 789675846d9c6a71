#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "specshift/common.hpp"

namespace specshift::num {

inline double state_norm(double x) { return std::abs(x); }
inline double state_norm(const std::complex<double>& x) { return std::abs(x); }
template <class Derived>
double state_norm(const Eigen::MatrixBase<Derived>& x) {
  return x.norm();
}

struct StepControl {
  double tol = 1e-10;  // local truncation error per unit length
  double max_step = std::numeric_limits<double>::infinity();
  double max_change = std::numeric_limits<double>::infinity();  // |y1 - y0| cap per step
  double min_step = 1e-14;  // relative to interval length; underflow throws
};

// Piecewise record of a scalar solution: accepted nodes with derivatives,
// evaluated in between by cubic Hermite interpolation.
class Trajectory {
 public:
  std::vector<double> t, y, dy;

  std::size_t size() const { return t.size(); }
  double front_value() const { return y.front(); }
  double back_value() const { return y.back(); }
  double back_time() const { return t.back(); }

  double operator()(double s) const {
    const std::size_t i = segment_index(s);
    return hermite(i, s);
  }

  // Index i with t[i] <= s <= t[i+1] (clamped).
  std::size_t segment_index(double s) const {
    if (s <= t.front()) return 0;
    if (s >= t.back()) return t.size() - 2;
    const auto it = std::upper_bound(t.begin(), t.end(), s);
    return static_cast<std::size_t>(it - t.begin()) - 1;
  }

  double hermite(std::size_t i, double s) const {
    const double h = t[i + 1] - t[i];
    if (h == 0.0) return y[i];
    const double u = (s - t[i]) / h;
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * y[i] + (u3 - 2 * u2 + u) * h * dy[i] +
           (-2 * u3 + 3 * u2) * y[i + 1] + (u3 - u2) * h * dy[i + 1];
  }

  void append_node(double ti, double yi, double di) {
    t.push_back(ti);
    y.push_back(yi);
    dy.push_back(di);
  }
};

namespace detail {
// Dormand-Prince 5(4) tableau.
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                        e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640,
                        e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
}  // namespace detail

// Adaptive embedded Runge-Kutta 5(4).  Direction follows sign(t1 - t0).
// When `record` is non-null (scalar state only) every accepted node is stored.
template <class State, class Rhs>
State rk45(Rhs&& f, double t0, double t1, State y, const StepControl& ctl,
           Trajectory* record = nullptr) {
  using namespace detail;
  const double span = t1 - t0;
  if (span == 0.0) {
    if (record && record->t.empty()) {
      if constexpr (std::is_same_v<State, double>)
        record->append_node(t0, y, f(t0, y));
    }
    return y;
  }
  const double dir = span > 0 ? 1.0 : -1.0;
  const double hmin = ctl.min_step * std::abs(span);
  double t = t0;
  State k1 = f(t, y);
  if (record) {
    if constexpr (std::is_same_v<State, double>) record->append_node(t, y, k1);
  }
  double h = dir * std::min({std::abs(span), ctl.max_step,
                             std::max(1e-6 * std::abs(span), hmin * 16)});
  bool last = std::abs(h) >= std::abs(t1 - t);
  if (last) h = t1 - t;
  while (true) {
    const State k2 = f(t + a21 * h, y + h * (a21 * k1));
    const State k3 = f(t + 0.3 * h, y + h * (a31 * k1 + a32 * k2));
    const State k4 = f(t + 0.8 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 =
        f(t + (8.0 / 9) * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 =
        f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = f(t + h, y1);
    const State err_state =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err = state_norm(err_state);
    const double budget = ctl.tol * std::abs(h);
    const double change = state_norm(State(y1 - y));
    const bool accept = err <= budget && change <= ctl.max_change;
    if (accept) {
      t += h;
      y = y1;
      k1 = k7;  // FSAL
      if (record) {
        if constexpr (std::is_same_v<State, double>)
          record->append_node(t, y, k1);
      }
      if (last) return y;
    }
    double factor =
        err > 0 ? 0.9 * std::pow(budget / err, 0.2) : 5.0;
    if (change > ctl.max_change)
      factor = std::min(factor, 0.5 * ctl.max_change / change);
    factor = std::clamp(factor, 0.2, 5.0);
    h *= factor;
    if (std::abs(h) > ctl.max_step) h = dir * ctl.max_step;
    if (std::abs(h) < hmin)
      throw SingularIntegration("ode step size underflow", t);
    last = std::abs(h) >= std::abs(t1 - t);
    if (last) h = t1 - t;
  }
}

}  // namespace specshift::num
