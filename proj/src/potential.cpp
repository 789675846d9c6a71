#include "specshift/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace specshift::potentials {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln cosh without overflow for large |u|.
double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double exp_int(double rate, double a, double b) {  // int_a^b e^{-rate x}
  const double ea = std::exp(-rate * a);
  const double eb = std::isinf(b) ? 0.0 : std::exp(-rate * b);
  return (ea - eb) / rate;
}
double exp_x_int(double rate, double a, double b) {  // int_a^b x e^{-rate x}
  auto g = [rate](double x) {
    return std::isinf(x) ? 0.0 : std::exp(-rate * x) * (x / rate + 1.0 / (rate * rate));
  };
  return g(a) - g(b);
}

// int x sech^2(x/s) dx, fixed so that the x -> inf limit is s^2 ln 2.
double sech2_x_prim(double s, double x) {
  if (std::isinf(x)) return s * s * std::log(2.0);
  return s * x * std::tanh(x / s) - s * s * log_cosh(x / s);
}
double tanh_or_one(double s, double x) { return std::isinf(x) ? 1.0 : std::tanh(x / s); }

double linear_int(double p0, double p1, double a, double b) {
  auto prim = [&](double x) { return p0 * x + 0.5 * p1 * x * x; };
  return prim(b) - prim(a);
}
double linear_weighted_abs(double p0, double p1, double a, double b) {
  auto prim = [&](double x) {
    return p0 * x + 0.5 * (p0 + p1) * x * x + p1 * x * x * x / 3.0;
  };
  return std::abs(prim(b) - prim(a));
}
double linear_x_int(double p0, double p1, double a, double b) {
  auto prim = [&](double x) { return 0.5 * p0 * x * x + p1 * x * x * x / 3.0; };
  return prim(b) - prim(a);
}

}  // namespace

Segment Segment::constant(double value, double lo, double hi) {
  Segment s;
  s.kind_ = SegmentKind::Constant;
  s.lo_ = lo;
  s.hi_ = hi;
  s.p0_ = value;
  s.validate();
  if (std::isinf(hi) && value != 0.0)
    throw InadmissiblePotential(
        "constant segment with infinite support has divergent first moment");
  return s;
}

Segment Segment::exponential(double amplitude, double rate, double lo, double hi) {
  Segment s;
  s.kind_ = SegmentKind::Exponential;
  s.lo_ = lo;
  s.hi_ = hi;
  s.p0_ = amplitude;
  s.p1_ = rate;
  s.validate();
  if (!(rate > 0))
    throw InadmissiblePotential(
        "exponential segment requires rate > 0 (first moment diverges)");
  return s;
}

Segment Segment::sech_squared(double amplitude, double scale, double lo, double hi) {
  Segment s;
  s.kind_ = SegmentKind::SechSquared;
  s.lo_ = lo;
  s.hi_ = hi;
  s.p0_ = amplitude;
  s.p1_ = scale;
  s.validate();
  if (!(scale > 0)) throw InadmissiblePotential("sech-squared segment requires scale > 0");
  return s;
}

Segment Segment::power_law(double amplitude, double alpha, double lo, double hi) {
  Segment s;
  s.kind_ = SegmentKind::PowerLaw;
  s.lo_ = lo;
  s.hi_ = hi;
  s.p0_ = amplitude;
  s.p1_ = alpha;
  s.validate();
  if (!(alpha > 0 && alpha < 1))
    throw InadmissiblePotential(
        "power-law segment requires 0 < alpha < 1 for an integrable singularity");
  if (std::isinf(hi))
    throw InadmissiblePotential(
        "power-law segment with infinite support has divergent first moment");
  return s;
}

Segment Segment::tabulated(Eigen::ArrayXd xs, Eigen::ArrayXd vs) {
  Segment s;
  s.kind_ = SegmentKind::Tabulated;
  if (xs.size() < 2 || xs.size() != vs.size())
    throw InadmissiblePotential(
        "tabulated segment needs matching xs/vs with at least two samples");
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(vs[i]))
      throw InadmissiblePotential("tabulated segment has non-finite samples");
    if (i > 0 && xs[i] <= xs[i - 1])
      throw InadmissiblePotential("tabulated segment abscissae must be strictly increasing");
  }
  s.lo_ = xs[0];
  s.hi_ = xs[xs.size() - 1];
  s.xs_ = std::move(xs);
  s.vs_ = std::move(vs);
  s.validate();
  return s;
}

void Segment::validate() const {
  if (!(lo_ >= 0))
    throw InadmissiblePotential("segment must live on the half line (lo >= 0)");
  if (!(hi_ > lo_)) throw InadmissiblePotential("segment interval is empty");
  if (kind_ != SegmentKind::Tabulated && (!std::isfinite(p0_) || std::isnan(p1_)))
    throw InadmissiblePotential("segment has non-finite parameters");
}

double Segment::value(double x) const {
  switch (kind_) {
    case SegmentKind::Constant:
      return p0_;
    case SegmentKind::Exponential:
      return p0_ * std::exp(-p1_ * x);
    case SegmentKind::SechSquared: {
      const double c = std::cosh(x / p1_);
      return p0_ / (c * c);
    }
    case SegmentKind::PowerLaw: {
      const double u = x - lo_;
      if (u <= 0.0) return p0_ > 0 ? kInf : -kInf;
      return p0_ * std::pow(u, -p1_);
    }
    case SegmentKind::Tabulated: {
      const double* begin = xs_.data();
      const double* end = begin + xs_.size();
      const double* it = std::upper_bound(begin, end, x);
      Eigen::Index i = std::max<Eigen::Index>(1, it - begin);
      i = std::min<Eigen::Index>(i, xs_.size() - 1);
      const double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
      return vs_[i - 1] + w * (vs_[i] - vs_[i - 1]);
    }
  }
  return 0.0;
}

double Segment::integral(double a, double b) const {
  a = std::max(a, lo_);
  b = std::min(b, hi_);
  if (!(b > a)) return 0.0;
  switch (kind_) {
    case SegmentKind::Constant:
      return p0_ * (b - a);
    case SegmentKind::Exponential:
      return p0_ * exp_int(p1_, a, b);
    case SegmentKind::SechSquared:
      return p0_ * p1_ * (tanh_or_one(p1_, b) - std::tanh(a / p1_));
    case SegmentKind::PowerLaw: {
      const double q = 1.0 - p1_;
      return p0_ * (std::pow(b - lo_, q) - std::pow(a - lo_, q)) / q;
    }
    case SegmentKind::Tabulated: {
      double total = 0.0;
      for (Eigen::Index i = 0; i + 1 < xs_.size(); ++i) {
        const double s0 = std::max(a, xs_[i]);
        const double s1 = std::min(b, xs_[i + 1]);
        if (!(s1 > s0)) continue;
        const double m = (vs_[i + 1] - vs_[i]) / (xs_[i + 1] - xs_[i]);
        const double p0 = vs_[i] - m * xs_[i];
        total += linear_int(p0, m, s0, s1);
      }
      return total;
    }
  }
  return 0.0;
}

double Segment::abs_integral(double a, double b) const {
  a = std::max(a, lo_);
  b = std::min(b, hi_);
  if (!(b > a)) return 0.0;
  if (kind_ != SegmentKind::Tabulated) return std::abs(integral(a, b));
  double total = 0.0;
  for (Eigen::Index i = 0; i + 1 < xs_.size(); ++i) {
    const double s0 = std::max(a, xs_[i]);
    const double s1 = std::min(b, xs_[i + 1]);
    if (!(s1 > s0)) continue;
    const double m = (vs_[i + 1] - vs_[i]) / (xs_[i + 1] - xs_[i]);
    const double p0 = vs_[i] - m * xs_[i];
    const double root = m != 0.0 ? -p0 / m : s0 - 1.0;
    if (root > s0 && root < s1) {
      total += std::abs(linear_int(p0, m, s0, root));
      total += std::abs(linear_int(p0, m, root, s1));
    } else {
      total += std::abs(linear_int(p0, m, s0, s1));
    }
  }
  return total;
}

double Segment::weighted_abs_integral(double a, double b) const {
  a = std::max(a, lo_);
  b = std::min(b, hi_);
  if (!(b > a)) return 0.0;
  switch (kind_) {
    case SegmentKind::Constant:
      return std::abs(p0_) * ((b - a) + 0.5 * (b * b - a * a));
    case SegmentKind::Exponential:
      return std::abs(p0_) * (exp_int(p1_, a, b) + exp_x_int(p1_, a, b));
    case SegmentKind::SechSquared: {
      const double s = p1_;
      const double i0 = s * (tanh_or_one(s, b) - std::tanh(a / s));
      const double i1 = sech2_x_prim(s, b) - sech2_x_prim(s, a);
      return std::abs(p0_) * (i0 + i1);
    }
    case SegmentKind::PowerLaw: {
      const double q1 = 1.0 - p1_, q2 = 2.0 - p1_;
      const double ua = a - lo_, ub = b - lo_;
      const double m0 = (std::pow(ub, q1) - std::pow(ua, q1)) / q1;
      const double m1 = (std::pow(ub, q2) - std::pow(ua, q2)) / q2;
      return std::abs(p0_) * ((1.0 + lo_) * m0 + m1);
    }
    case SegmentKind::Tabulated: {
      double total = 0.0;
      for (Eigen::Index i = 0; i + 1 < xs_.size(); ++i) {
        const double s0 = std::max(a, xs_[i]);
        const double s1 = std::min(b, xs_[i + 1]);
        if (!(s1 > s0)) continue;
        const double m = (vs_[i + 1] - vs_[i]) / (xs_[i + 1] - xs_[i]);
        const double p0 = vs_[i] - m * xs_[i];
        const double root = m != 0.0 ? -p0 / m : s0 - 1.0;
        if (root > s0 && root < s1) {
          total += linear_weighted_abs(p0, m, s0, root);
          total += linear_weighted_abs(p0, m, root, s1);
        } else {
          total += linear_weighted_abs(p0, m, s0, s1);
        }
      }
      return total;
    }
  }
  return 0.0;
}

double Segment::x_negative_part_integral(double a, double b) const {
  a = std::max(a, lo_);
  b = std::min(b, hi_);
  if (!(b > a)) return 0.0;
  switch (kind_) {
    case SegmentKind::Constant:
      return p0_ < 0 ? -p0_ * 0.5 * (b * b - a * a) : 0.0;
    case SegmentKind::Exponential:
      return p0_ < 0 ? -p0_ * exp_x_int(p1_, a, b) : 0.0;
    case SegmentKind::SechSquared:
      if (p0_ >= 0) return 0.0;
      return -p0_ * (sech2_x_prim(p1_, b) - sech2_x_prim(p1_, a));
    case SegmentKind::PowerLaw: {
      if (p0_ >= 0) return 0.0;
      const double q1 = 1.0 - p1_, q2 = 2.0 - p1_;
      const double ua = a - lo_, ub = b - lo_;
      const double m0 = (std::pow(ub, q1) - std::pow(ua, q1)) / q1;
      const double m1 = (std::pow(ub, q2) - std::pow(ua, q2)) / q2;
      return -p0_ * (lo_ * m0 + m1);
    }
    case SegmentKind::Tabulated: {
      double total = 0.0;
      for (Eigen::Index i = 0; i + 1 < xs_.size(); ++i) {
        const double s0 = std::max(a, xs_[i]);
        const double s1 = std::min(b, xs_[i + 1]);
        if (!(s1 > s0)) continue;
        const double m = (vs_[i + 1] - vs_[i]) / (xs_[i + 1] - xs_[i]);
        const double p0 = vs_[i] - m * xs_[i];
        auto piece = [&](double u0, double u1) {
          if (u1 <= u0) return;
          if (p0 + m * 0.5 * (u0 + u1) < 0) total -= linear_x_int(p0, m, u0, u1);
        };
        const double root = m != 0.0 ? -p0 / m : s0 - 1.0;
        if (root > s0 && root < s1) {
          piece(s0, root);
          piece(root, s1);
        } else {
          piece(s0, s1);
        }
      }
      return total;
    }
  }
  return 0.0;
}

std::optional<double> Segment::negative_sup() const {
  switch (kind_) {
    case SegmentKind::Constant:
      return std::max(-p0_, 0.0);
    case SegmentKind::Exponential:
      return p0_ < 0 ? -p0_ * std::exp(-p1_ * lo_) : 0.0;
    case SegmentKind::SechSquared: {
      if (p0_ >= 0) return 0.0;
      const double x = std::clamp(0.0, lo_, std::isinf(hi_) ? lo_ + 1.0 : hi_);
      const double c = std::cosh(x / p1_);
      return -p0_ / (c * c);
    }
    case SegmentKind::PowerLaw:
      if (p0_ >= 0) return 0.0;
      return std::nullopt;  // blows up at lo
    case SegmentKind::Tabulated:
      return std::max(0.0, -vs_.minCoeff());
  }
  return 0.0;
}

Segment Segment::truncated(double r) const {
  if (r >= hi_) return *this;
  Segment s = *this;
  if (kind_ == SegmentKind::Tabulated) {
    Eigen::Index n = 0;
    while (n < xs_.size() && xs_[n] < r) ++n;
    Eigen::ArrayXd xs(n + 1), vs(n + 1);
    xs.head(n) = xs_.head(n);
    vs.head(n) = vs_.head(n);
    xs[n] = r;
    vs[n] = value(r);
    s.xs_ = std::move(xs);
    s.vs_ = std::move(vs);
  }
  s.hi_ = r;
  return s;
}

std::vector<double> Segment::interior_breakpoints() const {
  std::vector<double> out;
  if (kind_ == SegmentKind::Tabulated)
    for (Eigen::Index i = 1; i + 1 < xs_.size(); ++i) out.push_back(xs_[i]);
  return out;
}

void Segment::describe(std::string& out) const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case SegmentKind::Constant:
      os << "constant[" << lo_ << "," << hi_ << "] value=" << p0_;
      break;
    case SegmentKind::Exponential:
      os << "exponential[" << lo_ << "," << hi_ << "] amplitude=" << p0_ << " rate=" << p1_;
      break;
    case SegmentKind::SechSquared:
      os << "sech2[" << lo_ << "," << hi_ << "] amplitude=" << p0_ << " scale=" << p1_;
      break;
    case SegmentKind::PowerLaw:
      os << "power_law[" << lo_ << "," << hi_ << "] amplitude=" << p0_ << " alpha=" << p1_;
      break;
    case SegmentKind::Tabulated:
      os << "table[" << lo_ << "," << hi_ << "]";
      for (Eigen::Index i = 0; i < xs_.size(); ++i) os << " " << xs_[i] << ":" << vs_[i];
      break;
  }
  out += os.str();
}

Potential::Potential(std::vector<Segment> segments) : segments_(std::move(segments)) {
  std::sort(segments_.begin(), segments_.end(),
            [](const Segment& a, const Segment& b) { return a.lo() < b.lo(); });
  for (std::size_t i = 0; i + 1 < segments_.size(); ++i)
    if (segments_[i].hi() > segments_[i + 1].lo() + 1e-15)
      throw InadmissiblePotential("potential segments overlap");
  first_moment_ = 0;
  support_radius_ = 0;
  for (const auto& s : segments_) {
    first_moment_ += s.weighted_abs_integral(s.lo(), s.hi());
    support_radius_ = std::max(support_radius_, s.hi());
  }
  if (!std::isfinite(first_moment_))
    throw InadmissiblePotential("first moment of the potential is not finite");
}

Potential Potential::square_well(double depth, double width) {
  return Potential({Segment::constant(-depth, 0.0, width)});
}

Potential Potential::constant_step(double value, double lo, double hi) {
  return Potential({Segment::constant(value, lo, hi)});
}

Potential Potential::exponential(double amplitude, double rate) {
  return Potential({Segment::exponential(amplitude, rate, 0.0, kInf)});
}

Potential Potential::sech_squared(double amplitude, double scale) {
  return Potential({Segment::sech_squared(amplitude, scale, 0.0, kInf)});
}

Potential Potential::power_law(double amplitude, double alpha, double lo, double hi) {
  return Potential({Segment::power_law(amplitude, alpha, lo, hi)});
}

Potential Potential::tabulated(Eigen::ArrayXd xs, Eigen::ArrayXd vs) {
  return Potential({Segment::tabulated(std::move(xs), std::move(vs))});
}

Potential Potential::scaled(const Potential& v, double factor) {
  if (factor == 0.0) return Potential();
  std::vector<Segment> out;
  for (auto s : v.segments()) {
    s.scale_amplitude(factor);
    out.push_back(std::move(s));
  }
  return Potential(std::move(out));
}

double Potential::operator()(double x) const {
  for (const auto& s : segments_) {
    if (x < s.lo()) return 0.0;
    if (x < s.hi()) return s.value(x);
  }
  return 0.0;
}

double Potential::tail_integral(double r) const {
  double total = 0.0;
  for (const auto& s : segments_)
    if (s.hi() > r) total += s.abs_integral(std::max(r, s.lo()), s.hi());
  return total;
}

double Potential::negative_part_moment() const {
  double total = 0.0;
  for (const auto& s : segments_) total += s.x_negative_part_integral(s.lo(), s.hi());
  return total;
}

Potential Potential::cutoff(double r) const {
  std::vector<Segment> out;
  for (const auto& s : segments_) {
    if (s.lo() >= r) break;
    out.push_back(s.truncated(r));
  }
  return Potential(std::move(out));
}

std::optional<double> Potential::depth_bound() const {
  double best = 0.0;
  for (const auto& s : segments_) {
    const auto d = s.negative_sup();
    if (!d) return std::nullopt;
    best = std::max(best, *d);
  }
  return best;
}

std::string Potential::describe() const {
  if (segments_.empty()) return "zero";
  std::string out;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (i) out += "; ";
    segments_[i].describe(out);
  }
  return out;
}

std::uint64_t Potential::hash() const { return fnv1a(describe()); }

void Segment::scale_amplitude(double factor) {
  if (kind_ == SegmentKind::Tabulated)
    vs_ *= factor;
  else
    p0_ *= factor;
}

}  // namespace specshift::potentials
