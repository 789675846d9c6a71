#include "specshift/test_function.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "specshift/common.hpp"
#include "specshift/quadrature.hpp"

namespace specshift::limits {

TestFunction TestFunction::hat(double a, double b, double peak) {
  if (!(a < peak && peak < b))
    throw NumericalError("hat needs a < peak < b");
  TestFunction g;
  g.kind_ = Kind::Hat;
  g.a_ = a;
  g.b_ = b;
  g.peak_ = peak;
  g.breaks_ = {a, peak, b};
  g.lipschitz_ = std::max(1.0 / (peak - a), 1.0 / (b - peak));
  return g;
}

TestFunction TestFunction::bump(double center, double width) {
  if (!(width > 0)) throw NumericalError("bump needs width > 0");
  TestFunction g;
  g.kind_ = Kind::Bump;
  g.a_ = center - width;
  g.b_ = center + width;
  g.peak_ = center;
  g.breaks_ = {g.a_, g.b_};
  // max slope of exp(1 - 1/(1-u^2)) is below 2.3; scale by 1/width
  g.lipschitz_ = 2.3 / width;
  return g;
}

TestFunction TestFunction::spline(Eigen::ArrayXd knots, Eigen::ArrayXd values) {
  const Eigen::Index n = knots.size();
  if (n < 3 || values.size() != n)
    throw NumericalError("spline needs at least three knots with matching values");
  for (Eigen::Index i = 1; i < n; ++i)
    if (!(knots[i] > knots[i - 1]))
      throw NumericalError("spline knots must be strictly increasing");
  TestFunction g;
  g.kind_ = Kind::Spline;
  g.a_ = knots[0];
  g.b_ = knots[n - 1];
  // natural cubic spline: second derivatives from the standard tridiagonal system
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  A(0, 0) = 1.0;
  A(n - 1, n - 1) = 1.0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double h0 = knots[i] - knots[i - 1];
    const double h1 = knots[i + 1] - knots[i];
    A(i, i - 1) = h0;
    A(i, i) = 2.0 * (h0 + h1);
    A(i, i + 1) = h1;
    rhs[i] = 6.0 * ((values[i + 1] - values[i]) / h1 -
                    (values[i] - values[i - 1]) / h0);
  }
  g.second_ = A.partialPivLu().solve(rhs).array();
  g.knots_ = std::move(knots);
  g.values_ = std::move(values);
  for (Eigen::Index i = 0; i < n; ++i) g.breaks_.push_back(g.knots_[i]);
  double lip = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double h = g.knots_[i + 1] - g.knots_[i];
    const double slope = std::abs((g.values_[i + 1] - g.values_[i]) / h) +
                         h * (std::abs(g.second_[i]) + std::abs(g.second_[i + 1])) / 3.0;
    lip = std::max(lip, slope);
  }
  g.lipschitz_ = lip;
  return g;
}

double TestFunction::operator()(double x) const {
  if (x <= a_ || x >= b_) return 0.0;
  switch (kind_) {
    case Kind::Hat:
      return x <= peak_ ? (x - a_) / (peak_ - a_) : (b_ - x) / (b_ - peak_);
    case Kind::Bump: {
      const double u = (x - peak_) / (0.5 * (b_ - a_));
      const double d = 1.0 - u * u;
      if (d <= 0.0) return 0.0;
      return std::exp(1.0 - 1.0 / d);
    }
    case Kind::Spline: {
      const double* begin = knots_.data();
      const double* end = begin + knots_.size();
      const double* it = std::upper_bound(begin, end, x);
      Eigen::Index i = std::max<Eigen::Index>(1, it - begin);
      i = std::min<Eigen::Index>(i, knots_.size() - 1);
      const double h = knots_[i] - knots_[i - 1];
      const double t = (knots_[i] - x) / h, u = (x - knots_[i - 1]) / h;
      return t * values_[i - 1] + u * values_[i] +
             ((t * t * t - t) * second_[i - 1] + (u * u * u - u) * second_[i]) *
                 h * h / 6.0;
    }
  }
  return 0.0;
}

double TestFunction::derivative(double x) const {
  if (x <= a_ || x >= b_) return 0.0;
  switch (kind_) {
    case Kind::Hat:
      return x <= peak_ ? 1.0 / (peak_ - a_) : -1.0 / (b_ - peak_);
    case Kind::Bump: {
      const double w = 0.5 * (b_ - a_);
      const double u = (x - peak_) / w;
      const double d = 1.0 - u * u;
      if (d <= 0.0) return 0.0;
      return std::exp(1.0 - 1.0 / d) * (-2.0 * u / (d * d)) / w;
    }
    case Kind::Spline: {
      const double* begin = knots_.data();
      const double* end = begin + knots_.size();
      const double* it = std::upper_bound(begin, end, x);
      Eigen::Index i = std::max<Eigen::Index>(1, it - begin);
      i = std::min<Eigen::Index>(i, knots_.size() - 1);
      const double h = knots_[i] - knots_[i - 1];
      const double t = (knots_[i] - x) / h, u = (x - knots_[i - 1]) / h;
      return (values_[i] - values_[i - 1]) / h +
             ((1.0 - 3.0 * t * t) * second_[i - 1] + (3.0 * u * u - 1.0) * second_[i]) *
                 h / 6.0;
    }
  }
  return 0.0;
}

double TestFunction::integral(double lo, double hi, double tol) const {
  lo = std::max(lo, a_);
  hi = std::min(hi, b_);
  if (!(hi > lo)) return 0.0;
  switch (kind_) {
    case Kind::Hat: {
      auto prim_left = [&](double x) {  // antiderivative of (x-a)/(peak-a)
        return 0.5 * (x - a_) * (x - a_) / (peak_ - a_);
      };
      auto prim_right = [&](double x) {
        return -0.5 * (b_ - x) * (b_ - x) / (b_ - peak_);
      };
      double total = 0.0;
      const double m = std::clamp(peak_, lo, hi);
      if (m > lo) total += prim_left(m) - prim_left(lo);
      if (hi > m) total += prim_right(hi) - prim_right(m);
      return total;
    }
    case Kind::Bump:
      return num::integrate([&](double x) { return (*this)(x); }, lo, hi,
                            std::max(tol, 1e-14));
    case Kind::Spline: {
      double total = 0.0;
      for (Eigen::Index i = 0; i + 1 < knots_.size(); ++i) {
        const double s0 = std::max(lo, knots_[i]);
        const double s1 = std::min(hi, knots_[i + 1]);
        if (!(s1 > s0)) continue;
        const double h = knots_[i + 1] - knots_[i];
        auto quart = [](double w) { return w * w * w * w / 4.0 - w * w / 2.0; };
        auto prim = [&](double x) {
          const double t = (knots_[i + 1] - x) / h, u = (x - knots_[i]) / h;
          return h * (-0.5 * t * t * values_[i] + 0.5 * u * u * values_[i + 1]) +
                 h * h * h / 6.0 *
                     (-quart(t) * second_[i] + quart(u) * second_[i + 1]);
        };
        total += prim(s1) - prim(s0);
      }
      return total;
    }
  }
  return 0.0;
}

bool TestFunction::vanishes_at_support_ends(double eps) const {
  if (kind_ != Kind::Spline) return true;
  return std::abs(values_[0]) <= eps &&
         std::abs(values_[values_.size() - 1]) <= eps;
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Hat:
      os << "hat[" << a_ << "," << b_ << "] peak=" << peak_;
      break;
    case Kind::Bump:
      os << "bump center=" << peak_ << " width=" << 0.5 * (b_ - a_);
      break;
    case Kind::Spline:
      os << "spline";
      for (Eigen::Index i = 0; i < knots_.size(); ++i)
        os << " " << knots_[i] << ":" << values_[i];
      break;
  }
  return os.str();
}

ProbeFunction ProbeFunction::constant(double limit) {
  ProbeFunction h;
  h.kind_ = Kind::Constant;
  h.limit_ = limit;
  h.sup_abs_ = std::abs(limit);
  return h;
}

ProbeFunction ProbeFunction::exp_decay(double limit, double coeff) {
  ProbeFunction h;
  h.kind_ = Kind::ExpDecay;
  h.limit_ = limit;
  h.coeff_ = coeff;
  h.sup_abs_ = std::abs(limit) + std::abs(coeff);
  return h;
}

ProbeFunction ProbeFunction::damped_sine(double limit, double coeff) {
  ProbeFunction h;
  h.kind_ = Kind::DampedSine;
  h.limit_ = limit;
  h.coeff_ = coeff;
  h.sup_abs_ = std::abs(limit) + std::abs(coeff);
  return h;
}

ProbeFunction ProbeFunction::step(std::vector<double> breaks,
                                  std::vector<double> values) {
  if (values.size() != breaks.size() + 1)
    throw NumericalError("step probe needs one more value than breakpoints");
  for (std::size_t i = 1; i < breaks.size(); ++i)
    if (!(breaks[i] > breaks[i - 1]))
      throw NumericalError("step probe breakpoints must increase");
  ProbeFunction h;
  h.kind_ = Kind::Step;
  h.limit_ = values.back();
  h.breaks_ = std::move(breaks);
  h.step_values_ = std::move(values);
  h.sup_abs_ = 0.0;
  for (double v : h.step_values_) h.sup_abs_ = std::max(h.sup_abs_, std::abs(v));
  return h;
}

double ProbeFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::Constant:
      return limit_;
    case Kind::ExpDecay:
      return limit_ + coeff_ * std::exp(-x);
    case Kind::DampedSine:
      return limit_ + coeff_ * std::sin(x) / (1.0 + x);
    case Kind::Step: {
      std::size_t i = 0;
      while (i < breaks_.size() && x >= breaks_[i]) ++i;
      return step_values_[i];
    }
  }
  return limit_;
}

ProbeFunction ProbeFunction::shifted(double c) const {
  ProbeFunction h = *this;
  h.limit_ += c;
  if (kind_ == Kind::Step)
    for (double& v : h.step_values_) v += c;
  h.sup_abs_ += std::abs(c);
  return h;
}

std::string ProbeFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Constant:
      os << "constant " << limit_;
      break;
    case Kind::ExpDecay:
      os << "exp_decay limit=" << limit_ << " coeff=" << coeff_;
      break;
    case Kind::DampedSine:
      os << "damped_sine limit=" << limit_ << " coeff=" << coeff_;
      break;
    case Kind::Step:
      os << "step";
      for (std::size_t i = 0; i < step_values_.size(); ++i) os << " " << step_values_[i];
      break;
  }
  return os.str();
}

}  // namespace specshift::limits
