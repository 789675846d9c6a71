#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "specshift/common.hpp"

namespace specshift::potentials {

enum class SegmentKind { Constant, Exponential, SechSquared, PowerLaw, Tabulated };

// One primitive piece of a potential, living on [lo, hi).  The decaying kinds
// (exponential, sech-squared) admit hi = +inf; every moment below has a closed
// form, which is what keeps tail bounds and admissibility checks exact.
class Segment {
 public:
  static Segment constant(double value, double lo, double hi);
  // amplitude * exp(-rate * x), rate > 0
  static Segment exponential(double amplitude, double rate, double lo, double hi);
  // amplitude * sech(x / scale)^2, scale > 0
  static Segment sech_squared(double amplitude, double scale, double lo, double hi);
  // amplitude * (x - lo)^(-alpha), 0 < alpha < 1: integrable blow-up at lo
  static Segment power_law(double amplitude, double alpha, double lo, double hi);
  // linear interpolation through (xs, vs); compact support [xs.front(), xs.back()]
  static Segment tabulated(Eigen::ArrayXd xs, Eigen::ArrayXd vs);

  SegmentKind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool singular_at_lo() const { return kind_ == SegmentKind::PowerLaw; }

  double value(double x) const;                 // x inside [lo, hi)
  double integral(double a, double b) const;    // int V
  double abs_integral(double a, double b) const;          // int |V|
  double weighted_abs_integral(double a, double b) const; // int (1+x)|V|
  double x_negative_part_integral(double a, double b) const;  // int x max(-V, 0)
  std::optional<double> negative_sup() const;   // sup of V_-; nullopt if unbounded
  Segment truncated(double r) const;            // clip to [lo, min(hi, r)]
  std::vector<double> interior_breakpoints() const;  // tabulated knots
  void scale_amplitude(double factor);
  void describe(std::string& out) const;

 private:
  Segment() = default;
  void validate() const;

  SegmentKind kind_ = SegmentKind::Constant;
  double lo_ = 0, hi_ = 0;
  double p0_ = 0, p1_ = 0;  // value | amplitude,rate | amplitude,scale | amplitude,alpha
  Eigen::ArrayXd xs_, vs_;  // tabulated only
};

// Short-range potential on [0, inf): an ordered list of disjoint segments,
// zero in between and beyond.  Admissibility (finite first moment
// int (1+x)|V| dx) is established at construction; descriptors that cannot
// satisfy it are rejected with InadmissiblePotential.
class Potential {
 public:
  Potential() = default;  // V == 0
  explicit Potential(std::vector<Segment> segments);

  static Potential zero() { return Potential(); }
  static Potential square_well(double depth, double width);  // -depth on [0, width]
  static Potential constant_step(double value, double lo, double hi);
  static Potential exponential(double amplitude, double rate);  // on [0, inf)
  static Potential sech_squared(double amplitude, double scale);
  static Potential power_law(double amplitude, double alpha, double lo, double hi);
  static Potential tabulated(Eigen::ArrayXd xs, Eigen::ArrayXd vs);
  static Potential scaled(const Potential& v, double factor);

  double operator()(double x) const;  // 0 off the segments
  double first_moment() const { return first_moment_; }
  double tail_integral(double r) const;
  double negative_part_moment() const;
  Potential cutoff(double r) const;
  double support_radius() const { return support_radius_; }
  bool is_zero() const { return segments_.empty(); }
  // sup of the negative part, when every segment is bounded
  std::optional<double> depth_bound() const;

  const std::vector<Segment>& segments() const { return segments_; }
  std::string describe() const;
  std::uint64_t hash() const;

 private:
  std::vector<Segment> segments_;
  double first_moment_ = 0;
  double support_radius_ = 0;
};

}  // namespace specshift::potentials
