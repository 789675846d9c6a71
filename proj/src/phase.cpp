#include "specshift/phase.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "specshift/csv.hpp"

namespace specshift::phase {

using potentials::Potential;
using potentials::Segment;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Step over [lo, lo+eps] of a segment with an integrable singularity at lo,
// freezing the smooth factor at the left endpoint.  eps is shrunk until the
// frozen-factor error estimate is far below the integration tolerance.
double singular_startup(const Segment& seg, double k, double delta0, double tol,
                        double* eps_out) {
  const double len = seg.hi() - seg.lo();
  double eps = std::min(0.5 * len, 0.05);
  for (int i = 0; i < 200; ++i) {
    const double I = seg.abs_integral(seg.lo(), seg.lo() + eps);
    const double err = (2.0 / k) * (k * eps + I / k) * I;
    if (err <= 0.01 * tol) break;
    eps *= 0.5;
    if (eps < 1e-280)
      throw SingularIntegration("phase startup cannot meet tolerance", seg.lo());
  }
  *eps_out = eps;
  const double s = std::sin(k * seg.lo() + delta0);
  return -(s * s / k) * seg.integral(seg.lo(), seg.lo() + eps);
}

struct PhaseDriver {
  const Potential& V;
  double k;
  double tol;
  double max_step;
  num::Trajectory* rec;

  double delta = 0.0;
  double x = 0.0;

  void record_constant_until(double x1) {
    if (rec) {
      if (rec->t.empty()) rec->append_node(x, delta, 0.0);
      if (x1 > x) rec->append_node(x1, delta, 0.0);
    }
    x = x1;
  }

  void integrate_smooth(double x1) {
    if (!(x1 > x)) return;
    auto rhs = [&](double t, double d) {
      const double s = std::sin(k * t + d);
      return -(V(t) * s * s) / k;
    };
    num::StepControl ctl;
    ctl.tol = tol;
    ctl.max_step = max_step;
    ctl.max_change = 0.45 * kPi;
    if (rec && rec->t.empty()) rec->append_node(x, delta, rhs(x, delta));
    delta = num::rk45<double>(rhs, x, x1, delta, ctl, rec);
    x = x1;
  }

  double run(double r) {
    for (const auto& seg : V.segments()) {
      if (x >= r) break;
      if (seg.lo() > x) record_constant_until(std::min(seg.lo(), r));
      if (x >= r) break;
      if (seg.hi() <= x) continue;
      double begin = std::max(x, seg.lo());
      const double end = std::min(seg.hi(), r);
      if (seg.singular_at_lo() && begin == seg.lo() && begin < end) {
        double eps = 0.0;
        const double dd = singular_startup(seg, k, delta, tol, &eps);
        eps = std::min(eps, end - begin);
        delta += dd;
        x = begin + eps;
        if (rec) {
          if (rec->t.empty()) rec->append_node(begin, delta - dd, 0.0);
          rec->append_node(x, delta, 0.0);
        }
        begin = x;
      }
      x = begin;
      // split at interpolation knots so the integrator sees smooth pieces
      for (double cut : seg.interior_breakpoints())
        if (cut > x && cut < end) integrate_smooth(cut);
      integrate_smooth(end);
    }
    if (x < r) record_constant_until(r);
    return delta;
  }
};

}  // namespace

double phase_at(const Potential& V, double k, double r, double tol) {
  if (!(k > 0)) throw NumericalError("phase_at requires k > 0");
  if (!(r >= 0)) throw NumericalError("phase_at requires r >= 0");
  if (V.is_zero() || r == 0.0) return 0.0;
  PhaseDriver drv{V, k, tol, kInf, nullptr};
  return drv.run(r);
}

num::Trajectory phase_sweep(const Potential& V, double k, double R, double tol,
                            double max_step) {
  if (!(k > 0)) throw NumericalError("phase_sweep requires k > 0");
  num::Trajectory traj;
  PhaseDriver drv{V, k, tol, max_step, &traj};
  drv.run(R);
  if (traj.t.empty()) {
    traj.append_node(0.0, 0.0, 0.0);
    traj.append_node(R, 0.0, 0.0);
  }
  return traj;
}

double truncation_radius_for(const Potential& V, double k, double tol,
                             double r_cap) {
  if (V.tail_integral(0.0) <= k * tol) return 0.0;
  const double support = V.support_radius();
  if (std::isfinite(support)) return support;
  double R = 1.0;
  while (V.tail_integral(R) > k * tol) {
    R *= 2.0;
    if (R > r_cap)
      throw TailTooSlow("potential tail decays too slowly to certify the phase");
  }
  return R;
}

PhaseValue full_phase(const Potential& V, double k, double tol, double r_cap) {
  if (V.is_zero()) return {0.0, 0.0};
  const double R = truncation_radius_for(V, k, 0.5 * tol, r_cap);
  if (R == 0.0) return {0.0, V.tail_integral(0.0) / k};
  const double ode_tol = 0.5 * tol / std::max(1.0, R);
  const double delta = phase_at(V, k, R, ode_tol);
  return {delta, V.tail_integral(R) / k + 0.5 * tol};
}

namespace {

using Vec2c = Eigen::Vector2cd;

// Backward pass of f'' = (V - k^2) f from X down to 0.
Vec2c jost_integrate(const Potential& V, double k, double X, double tol) {
  const std::complex<double> ik(0.0, k);
  Vec2c y;
  if (k > 0) {
    const std::complex<double> e = std::exp(ik * X);
    y << e, ik * e;
  } else {
    y << 1.0, 0.0;
  }
  double x = X;
  const auto& segs = V.segments();
  auto free_propagate = [&](double x1) {
    // V = 0 stretch: rotate analytically
    const double d = x1 - x;  // negative
    if (d == 0.0) return;
    if (k > 0) {
      const double c = std::cos(k * d), s = std::sin(k * d);
      const std::complex<double> f = y[0], fp = y[1];
      y[0] = f * c + fp * (s / k);
      y[1] = -f * k * s + fp * c;
    } else {
      y[0] += y[1] * d;
    }
    x = x1;
  };
  auto rk_piece = [&](double x1) {
    if (!(x1 < x)) return;
    auto rhs = [&](double t, const Vec2c& s) {
      Vec2c out;
      out << s[1], (V(t) - k * k) * s[0];
      return out;
    };
    num::StepControl ctl;
    ctl.tol = tol;
    y = num::rk45<Vec2c>(rhs, x, x1, y, ctl);
    x = x1;
  };
  for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
    const Segment& seg = *it;
    if (seg.lo() >= x) continue;
    const double top = std::min(seg.hi(), x);
    if (top < x) free_propagate(top);
    double bottom = seg.lo();
    double eps = 0.0;
    if (seg.singular_at_lo()) {
      // stop short of the singular endpoint, then apply the frozen-state kick
      eps = std::min(0.5 * (top - bottom), 0.05);
      for (int i = 0; i < 200; ++i) {
        const double I = seg.abs_integral(bottom, bottom + eps);
        const double scale = std::max(1.0, y.norm());
        if ((I + k * k * eps) * eps * scale + I * eps * scale <= 0.01 * tol * scale) break;
        eps *= 0.5;
        if (eps < 1e-280)
          throw SingularIntegration("jost startup cannot meet tolerance", bottom);
      }
    }
    for (double cut : seg.interior_breakpoints())
      if (cut < x && cut > bottom + eps) rk_piece(cut);
    rk_piece(bottom + eps);
    if (eps > 0.0) {
      const double Iv = seg.integral(bottom, bottom + eps);
      const Vec2c f = y;
      y[0] = f[0] - eps * f[1];
      y[1] = f[1] - (Iv - k * k * eps) * f[0];
      x = bottom;
    }
  }
  if (x > 0.0) free_propagate(0.0);
  return y;
}

}  // namespace

JostValue jost(const Potential& V, double k, double tol) {
  if (!(k >= 0)) throw NumericalError("jost requires k >= 0");
  double X = 0.0;
  if (!V.is_zero()) {
    const double support = V.support_radius();
    X = std::isfinite(support)
            ? support
            : truncation_radius_for(V, std::max(k, 1.0), tol);
  }
  const Vec2c y = jost_integrate(V, k, X, std::min(tol, 1e-8));
  const std::complex<double> f0 = y[0];
  return {k, f0, std::abs(f0), std::arg(f0)};
}

ResonanceResult detect_resonance(const Potential& V, double tol) {
  const JostValue j = jost(V, 0.0, 1e-10);
  return {j.modulus <= tol, j.modulus};
}

LevinsonResult levinson_count(const Potential& V, double tol) {
  if (V.is_zero()) return {0, false, 0.0};
  constexpr int kLevels = 9;
  double table[kLevels][kLevels];
  double k = 0.4;
  for (int j = 0; j < kLevels; ++j, k *= 0.5)
    table[j][0] = full_phase(V, k, 1e-9).delta;
  // the phase is smooth in k near zero; successive column m removes the k^m term
  for (int m = 1; m < kLevels; ++m) {
    const double w = std::pow(2.0, m);
    for (int j = kLevels - 1; j >= m; --j)
      table[j][m] = (w * table[j][m - 1] - table[j - 1][m - 1]) / (w - 1.0);
  }
  const double p = table[kLevels - 1][kLevels - 1] / kPi;
  const double d_int = std::abs(p - std::nearbyint(p));
  const double half = std::floor(p) + 0.5;
  const double d_half = std::abs(p - half);
  if (d_int <= tol)
    return {static_cast<int>(std::lround(p)), false, p};
  if (d_half <= tol)
    return {static_cast<int>(std::floor(p)), true, p};
  throw InconclusiveRounding(
      "levinson limit is neither an integer nor a half-integer within tolerance (delta(0+)/pi = " +
      std::to_string(p) + ")");
}

PhaseCurve sample_phase_curve(const Potential& V, double k_min, double k_max,
                              int n, double radius, double tol, int threads) {
  if (!(k_min > 0 && k_max > k_min && n >= 2))
    throw NumericalError("phase curve needs 0 < k_min < k_max and n >= 2");
  std::vector<double> ks(n);
  for (int i = 0; i < n; ++i)
    ks[i] = k_min + (k_max - k_min) * static_cast<double>(i) / (n - 1);
  std::vector<double> vals(n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t i) {
    vals[i] = phase_at(V, ks[i], radius, tol);
  });
  // densify until neighbouring samples differ by < pi/2: the floor formulas
  // downstream are branch-sensitive
  for (int round = 0; round < 8; ++round) {
    std::vector<double> nk, nv;
    bool refined = false;
    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
      nk.push_back(ks[i]);
      nv.push_back(vals[i]);
      if (std::abs(vals[i + 1] - vals[i]) >= 0.5 * kPi) {
        const double km = 0.5 * (ks[i] + ks[i + 1]);
        nk.push_back(km);
        nv.push_back(phase_at(V, km, radius, tol));
        refined = true;
      }
    }
    nk.push_back(ks.back());
    nv.push_back(vals.back());
    ks.swap(nk);
    vals.swap(nv);
    if (!refined) break;
  }
  PhaseCurve out;
  const auto m = static_cast<Eigen::Index>(ks.size());
  out.momenta = Eigen::Map<const Eigen::ArrayXd>(ks.data(), m);
  out.values = Eigen::Map<const Eigen::ArrayXd>(vals.data(), m);
  out.truncation_radius = radius;
  const double tail = V.tail_integral(radius);
  out.error_bounds = tail / out.momenta;
  return out;
}

PhaseCurve sample_phase_curve_full(const Potential& V, double k_min, double k_max,
                                   int n, double tol, int threads) {
  const double R = truncation_radius_for(V, k_min, 0.5 * tol);
  return sample_phase_curve(V, k_min, k_max, n, R, tol, threads);
}

void PhaseCurve::write_csv(std::ostream& os) const {
  io::write_comment(os, std::string("convention = ") + convention_tag);
  io::write_comment(os, "truncation_radius = " + io::format_double(truncation_radius));
  os << "k,delta,error_bound\n";
  for (Eigen::Index i = 0; i < momenta.size(); ++i)
    os << io::format_double(momenta[i]) << ',' << io::format_double(values[i])
       << ',' << io::format_double(error_bounds[i]) << '\n';
}

}  // namespace specshift::phase
