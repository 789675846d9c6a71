#include "specshift/counting.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <sstream>

#include "specshift/csv.hpp"
#include "specshift/roots.hpp"

namespace specshift::counting {

using potentials::Potential;
using potentials::Segment;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PruferDriver {
  const Potential& V;
  double lambda;
  double tol;
  double max_step;
  num::Trajectory* rec;

  double theta = 0.0;
  double x = 0.0;

  double rhs_at(double t, double th) const {
    const double s = std::sin(th), c = std::cos(th);
    return c * c + (lambda - V(t)) * s * s;
  }

  void integrate(double x1, bool potential_on) {
    if (!(x1 > x)) return;
    auto rhs = [&](double t, double th) {
      const double s = std::sin(th), c = std::cos(th);
      const double v = potential_on ? V(t) : 0.0;
      return c * c + (lambda - v) * s * s;
    };
    num::StepControl ctl;
    ctl.tol = tol;
    ctl.max_step = max_step;
    ctl.max_change = 0.45 * kPi;  // keeps every pi-crossing inside one node interval
    if (rec && rec->t.empty()) rec->append_node(x, theta, rhs(x, theta));
    theta = num::rk45<double>(rhs, x, x1, theta, ctl, rec);
    x = x1;
  }

  double run(double r) {
    for (const auto& seg : V.segments()) {
      if (x >= r) break;
      if (seg.lo() > x) integrate(std::min(seg.lo(), r), false);
      if (x >= r) break;
      if (seg.hi() <= x) continue;
      double begin = std::max(x, seg.lo());
      const double end = std::min(seg.hi(), r);
      if (seg.singular_at_lo() && begin == seg.lo() && begin < end) {
        double eps = std::min(0.5 * (end - begin), 0.05);
        for (int i = 0; i < 200; ++i) {
          const double I = seg.abs_integral(begin, begin + eps);
          const double err = 2.0 * ((1.0 + std::abs(lambda)) * eps + I) * (I + eps);
          if (err <= 0.01 * tol) break;
          eps *= 0.5;
          if (eps < 1e-280)
            throw SingularIntegration("oscillation startup cannot meet tolerance", begin);
        }
        eps = std::min(eps, end - begin);
        const double s = std::sin(theta), c = std::cos(theta);
        const double dth = (c * c + lambda * s * s) * eps -
                           s * s * seg.integral(begin, begin + eps);
        if (rec && rec->t.empty()) rec->append_node(begin, theta, 0.0);
        theta += dth;
        x = begin + eps;
        if (rec) rec->append_node(x, theta, 0.0);
      }
      for (double cut : seg.interior_breakpoints())
        if (cut > x && cut < end) integrate(cut, true);
      integrate(end, true);
    }
    if (x < r) integrate(r, false);
    return theta;
  }
};

}  // namespace

long long free_count(double r, double lambda) {
  if (!(r > 0)) throw NumericalError("free_count requires r > 0");
  if (!(lambda > 0)) return 0;
  const double t = r * std::sqrt(lambda) / kPi;
  const auto gf = guarded_floor(t);
  return std::max<long long>(0, gf.value);
}

num::Trajectory prufer_sweep(const Potential& V, double lambda, double R,
                             double tol, double max_step) {
  num::Trajectory traj;
  PruferDriver drv{V, lambda, tol, max_step, &traj};
  drv.run(R);
  if (traj.t.empty()) {
    traj.append_node(0.0, 0.0, 1.0);
    traj.append_node(R, drv.theta, 1.0);
  }
  return traj;
}

std::vector<double> prufer_zeros(const num::Trajectory& theta, double guard_tol) {
  std::vector<double> zeros;
  const double end = theta.back_value();
  const auto top = guarded_floor(end / kPi, guard_tol);
  // theta' = 1 at every multiple of pi, so each level is crossed exactly once
  std::size_t i = 0;
  for (long long j = 1; j <= top.value; ++j) {
    const double level = static_cast<double>(j) * kPi;
    while (i + 1 < theta.size() && theta.y[i + 1] < level) ++i;
    if (i + 1 >= theta.size()) break;
    const double lo = theta.t[i], hi = theta.t[i + 1];
    const double z = num::brent(
        [&, i](double s) { return theta.hermite(i, s) - level; }, lo, hi,
        1e-13 * std::max(1.0, hi));
    zeros.push_back(z);
  }
  return zeros;
}

CountingResult oscillation_count(const Potential& V, double r, double lambda,
                                 double tol, bool want_zeros) {
  if (!(r > 0)) throw NumericalError("oscillation_count requires r > 0");
  CountingResult out;
  out.lambda = lambda;
  out.r = r;
  if (want_zeros) {
    const auto traj = prufer_sweep(V, lambda, r, tol);
    out.zero_locations = prufer_zeros(traj, tol);
    const auto gf = guarded_floor(traj.back_value() / kPi, tol);
    out.count = std::max<long long>(0, gf.value);
  } else {
    PruferDriver drv{V, lambda, tol, kInf, nullptr};
    const double theta = drv.run(r);
    const auto gf = guarded_floor(theta / kPi, tol);
    out.count = std::max<long long>(0, gf.value);
  }
  return out;
}

namespace {

double prufer_end(const Potential& V, double r, double lambda, double tol) {
  PruferDriver drv{V, lambda, tol, kInf, nullptr};
  return drv.run(r);
}

// Search bracket: a lambda with no spectrum below it.
double spectrum_floor(const Potential& V, double r, double tol) {
  const auto depth = V.depth_bound();
  double lo = depth ? -(*depth) - 1.0 : -2.0;
  while (prufer_end(V, r, lo, tol) >= kPi) {
    lo *= 2.0;
    if (lo < -1e12)
      throw NumericalError("failed to bracket the bottom of the spectrum");
  }
  return lo;
}

}  // namespace

std::vector<double> negative_eigenvalues_box(const Potential& V, double r,
                                             double tol) {
  const double ode_tol = std::min(tol * 1e-2, 1e-10);
  const long long m = oscillation_count(V, r, 0.0, ode_tol).count;
  std::vector<double> out;
  if (m == 0) return out;
  double lo = spectrum_floor(V, r, ode_tol);
  for (long long j = 1; j <= m; ++j) {
    // bracket by counting, then refine on the boundary phase theta(r) - j pi
    double a = lo, b = 0.0;
    while (b - a > 1e-2) {
      const double mid = 0.5 * (a + b);
      if (oscillation_count(V, r, mid, ode_tol).count >= j)
        b = mid;
      else
        a = mid;
    }
    const double target = static_cast<double>(j) * kPi;
    double fa = prufer_end(V, r, a, ode_tol) - target;
    double fb = prufer_end(V, r, b, ode_tol) - target;
    double ev;
    if (fa * fb <= 0.0) {
      ev = num::brent(
          [&](double lam) { return prufer_end(V, r, lam, ode_tol) - target; }, a,
          b, tol);
    } else {
      ev = 0.5 * (a + b);  // guard width already <= 1e-2; fall back to midpoint
    }
    out.push_back(ev);
    lo = ev;
  }
  return out;
}

std::vector<double> negative_eigenvalues_halfline(const Potential& V, double tol,
                                                  double r_cap) {
  std::vector<double> prev;
  bool have_prev = false;
  std::string history;
  for (double r = 25.0; r <= r_cap + 1e-9; r *= 2.0) {
    std::vector<double> cur = negative_eigenvalues_box(V, r, 0.1 * tol);
    if (have_prev && cur.size() == prev.size()) {
      double diff = 0.0;
      for (std::size_t i = 0; i < cur.size(); ++i)
        diff = std::max(diff, std::abs(cur[i] - prev[i]));
      if (diff <= tol) {
        const double bargmann = V.negative_part_moment();
        if (static_cast<double>(cur.size()) > bargmann + 1e-9)
          throw NumericalError("bound-state count exceeds the moment bound");
        return cur;
      }
    }
    std::ostringstream os;
    os << "r=" << r << ": [";
    for (double ev : cur) os << " " << ev;
    os << " ]";
    history = history.empty() ? os.str() : history + "; " + os.str();
    prev = std::move(cur);
    have_prev = true;
  }
  throw SlowConvergence("half-line eigenvalues did not stabilize before the radius cap (" +
                        history + ")");
}

long long halfline_count(const Potential& V, double lambda, double tol) {
  if (!(lambda < 0)) throw NumericalError("halfline_count requires lambda < 0");
  const auto evs = negative_eigenvalues_halfline(V, tol);
  long long n = 0;
  for (double ev : evs)
    if (ev < lambda) ++n;
  return n;
}

void write_counts_csv(std::ostream& os,
                      const std::vector<std::array<double, 3>>& rows) {
  os << "lambda,r,count\n";
  for (const auto& row : rows)
    os << io::format_double(row[0]) << ',' << io::format_double(row[1]) << ','
       << io::format_int(static_cast<long long>(row[2])) << '\n';
}

}  // namespace specshift::counting
