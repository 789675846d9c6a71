#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace specshift::limits {

// Compactly supported continuous weight.  Hat and spline integrals are exact
// (polynomial pieces); the bump falls back to adaptive quadrature.
class TestFunction {
 public:
  // piecewise linear: 0 at a, 1 at peak, 0 at b
  static TestFunction hat(double a, double b, double peak);
  // exp(1 - 1/(1 - u^2)) on |u| < 1, u = (x - center)/width
  static TestFunction bump(double center, double width);
  // natural cubic spline through (knots, values); support [first, last]
  static TestFunction spline(Eigen::ArrayXd knots, Eigen::ArrayXd values);

  double operator()(double x) const;
  double support_lo() const { return a_; }
  double support_hi() const { return b_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  double integral(double lo, double hi, double tol) const;
  double derivative(double x) const;
  std::optional<double> lipschitz_bound() const { return lipschitz_; }
  // continuity on the whole line needs zero endpoint values
  bool vanishes_at_support_ends(double eps = 0.0) const;
  std::string describe() const;

 private:
  enum class Kind { Hat, Bump, Spline };
  TestFunction() = default;

  Kind kind_ = Kind::Hat;
  double a_ = 0, b_ = 0, peak_ = 0;
  Eigen::ArrayXd knots_, values_, second_;  // spline data
  std::vector<double> breaks_;
  std::optional<double> lipschitz_;
};

// Bounded measurable probe with a known limit at infinity.
class ProbeFunction {
 public:
  static ProbeFunction constant(double limit);
  static ProbeFunction exp_decay(double limit, double coeff);    // limit + c e^{-x}
  static ProbeFunction damped_sine(double limit, double coeff);  // limit + c sin(x)/(1+x)
  // piecewise constant: values[i] on [breaks[i-1], breaks[i]), last value holds to infinity
  static ProbeFunction step(std::vector<double> breaks, std::vector<double> values);

  double operator()(double x) const;
  double sup_abs() const { return sup_abs_; }
  double limit_at_infinity() const { return limit_; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  ProbeFunction shifted(double c) const;  // h + c
  std::string describe() const;

 private:
  enum class Kind { Constant, ExpDecay, DampedSine, Step };
  ProbeFunction() = default;

  Kind kind_ = Kind::Constant;
  double limit_ = 0, coeff_ = 0, sup_abs_ = 0;
  std::vector<double> breaks_, step_values_;
};

}  // namespace specshift::limits
