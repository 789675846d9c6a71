#include "specshift/limits.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "specshift/csv.hpp"
#include "specshift/quadrature.hpp"
#include "specshift/roots.hpp"

namespace specshift::limits {

using potentials::Potential;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Every x in (lo, hi) where fn crosses an integer level.  Subdivides until
// neighbouring samples differ by < 0.45, which exposes each crossing of a
// function with bounded slope.
void integer_crossings_rec(const std::function<double(double)>& fn, double lo,
                           double hi, double flo, double fhi, int depth,
                           std::vector<double>* out) {
  if (depth > 0 && std::abs(fhi - flo) > 0.45) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = fn(mid);
    integer_crossings_rec(fn, lo, mid, flo, fmid, depth - 1, out);
    integer_crossings_rec(fn, mid, hi, fmid, fhi, depth - 1, out);
    return;
  }
  const double wmin = std::min(flo, fhi), wmax = std::max(flo, fhi);
  for (long long j = static_cast<long long>(std::ceil(wmin));
       static_cast<double>(j) <= wmax; ++j) {
    const double level = static_cast<double>(j);
    if ((flo - level) * (fhi - level) < 0.0) {
      out->push_back(num::brent([&](double x) { return fn(x) - level; }, lo, hi,
                                1e-13 * std::max(1.0, std::abs(hi))));
    }
  }
}

void append_integer_crossings(const std::function<double(double)>& fn, double lo,
                              double hi, std::vector<double>* out,
                              int initial_pieces = 8) {
  if (!(hi > lo)) return;
  double x0 = lo, f0 = fn(lo);
  for (int i = 1; i <= initial_pieces; ++i) {
    const double x1 = lo + (hi - lo) * static_cast<double>(i) / initial_pieces;
    const double f1 = fn(x1);
    integer_crossings_rec(fn, x0, x1, f0, f1, 40, out);
    x0 = x1;
    f0 = f1;
  }
}

std::vector<double> sorted_unique(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-14; }),
           xs.end());
  return xs;
}

}  // namespace

void ConvergenceReport::write_csv(std::ostream& os) const {
  for (const auto& [k, v] : metadata) io::write_comment(os, k + " = " + v);
  os << "parameter,observed,target,abs_error\n";
  for (const auto& row : rows)
    os << io::format_double(row.parameter) << ',' << io::format_double(row.observed)
       << ',' << io::format_double(row.target) << ','
       << io::format_double(row.abs_error) << '\n';
}

double weak_integral(const Potential& V, double r, const TestFunction& g,
                     double tol) {
  if (!(r > 0)) throw NumericalError("weak_integral requires r > 0");
  if (!g.vanishes_at_support_ends(1e-12))
    throw NumericalError("weak_integral needs a continuous test function");
  double total = 0.0;
  const double cell_tol = 0.05 * tol;

  if (g.support_lo() < 0 && !V.is_zero()) {
    const auto evs = counting::negative_eigenvalues_box(V, r, std::min(tol, 1e-9));
    double cell_lo = std::min(g.support_lo(), evs.empty() ? 0.0 : evs.front() - 1.0);
    for (std::size_t i = 0; i <= evs.size(); ++i) {
      const double cell_hi = i < evs.size() ? evs[i] : 0.0;
      const double value = -static_cast<double>(i);
      if (value != 0.0)
        total += value * g.integral(cell_lo, cell_hi, cell_tol);
      cell_lo = cell_hi;
    }
  }

  if (g.support_hi() > 0 && !V.is_zero()) {
    const double lam_hi = g.support_hi();
    const auto jumps = ssf::box_jumps(V, r, lam_hi, std::min(tol, 1e-10));
    double cell_lo = 0.0;
    // one phase evaluation anchors the first cell; jumps carry the increments
    const double first_hi = jumps.empty() ? lam_hi : jumps.front().lambda;
    long long value = ssf::ssf_box(V, r, 0.5 * (cell_lo + first_hi), std::min(tol, 1e-10));
    for (std::size_t i = 0; i <= jumps.size(); ++i) {
      const double cell_hi = i < jumps.size() ? jumps[i].lambda : lam_hi;
      if (value != 0 && cell_hi > cell_lo)
        total += static_cast<double>(value) * g.integral(cell_lo, cell_hi, cell_tol);
      if (i < jumps.size()) value += jumps[i].direction;
      cell_lo = cell_hi;
    }
  }
  return total;
}

double halfline_weak_target(const ssf::HalflineSsf& xi, const TestFunction& g,
                            double tol) {
  double total = 0.0;
  const auto& evs = xi.eigenvalues();
  if (g.support_lo() < 0) {
    double cell_lo = std::min(g.support_lo(), evs.empty() ? 0.0 : evs.front() - 1.0);
    for (std::size_t i = 0; i <= evs.size(); ++i) {
      const double cell_hi = i < evs.size() ? evs[i] : 0.0;
      const double value = -static_cast<double>(i);
      if (value != 0.0) total += value * g.integral(cell_lo, cell_hi, 0.05 * tol);
      cell_lo = cell_hi;
    }
  }
  if (g.support_hi() > 0) {
    const double lo = std::max(0.0, g.support_lo());
    total += num::integrate_pieces([&](double lam) { return xi(lam) * g(lam); },
                                   lo, g.support_hi(), g.breakpoints(), 0.5 * tol);
  }
  return total;
}

ConvergenceReport weak_convergence_study(const Potential& V, const TestFunction& g,
                                         const std::vector<double>& r_list,
                                         double tol) {
  for (std::size_t i = 1; i < r_list.size(); ++i)
    if (!(r_list[i] > r_list[i - 1]))
      throw NumericalError("weak study needs an increasing r list");
  const ssf::HalflineSsf xi(V, tol);
  const double target = halfline_weak_target(xi, g, tol);
  ConvergenceReport report;
  report.add_meta("study", "weak");
  report.add_meta("potential", V.describe());
  report.add_meta("potential_hash", hex64(V.hash()));
  report.add_meta("g", g.describe());
  report.add_meta("target", io::format_double(target));
  report.add_meta("tol", io::format_double(tol));
  for (double r : r_list) {
    const double observed = weak_integral(V, r, g, tol);
    report.rows.push_back({r, observed, target, std::abs(observed - target)});
  }
  return report;
}

namespace {

// Crossing times of u(rho) = (rho k + delta^rho(k))/pi through integer levels.
// floor(u) is the box counting function, monotone in rho, so every level is
// crossed exactly once even though u itself may wiggle.
std::vector<double> positive_axis_crossings(const Potential& V, double k,
                                            double R, double dr) {
  std::vector<double> times;
  const double support = V.support_radius();
  const double s_cap = std::min(R, std::isfinite(support) ? support : R);
  double delta_end = 0.0;
  if (s_cap > 0 && !V.is_zero()) {
    double max_step = 0.45 * kPi / std::max(k, 1e-12);
    if (dr > 0) max_step = std::min(max_step, dr);
    const auto traj = phase::phase_sweep(V, k, s_cap, 1e-11, max_step);
    delta_end = traj.back_value();
    auto u_of = [&](double rho) { return (rho * k + traj(rho)) / kPi; };
    const double u_end = (s_cap * k + delta_end) / kPi;
    const auto top = guarded_floor(u_end, 1e-12);
    std::size_t node = 0;
    for (long long n = 1; n <= top.value; ++n) {
      const double level = static_cast<double>(n);
      while (node + 1 < traj.size() &&
             (traj.t[node + 1] * k + traj.y[node + 1]) / kPi < level)
        ++node;
      if (node + 1 >= traj.size()) break;
      times.push_back(num::brent([&](double rho) { return u_of(rho) - level; },
                                 traj.t[node], traj.t[node + 1],
                                 1e-13 * std::max(1.0, s_cap)));
    }
    // past the support the phase is frozen and crossings are closed-form
    for (long long n = top.value + 1;; ++n) {
      const double rho = (static_cast<double>(n) * kPi - delta_end) / k;
      if (rho > R) break;
      if (rho > s_cap) times.push_back(rho);
    }
  } else {
    for (long long n = 1;; ++n) {
      const double rho = static_cast<double>(n) * kPi / k;
      if (rho > R) break;
      times.push_back(rho);
    }
  }
  return times;
}

}  // namespace

double cesaro_mean(const Potential& V, double lambda, double R, double dr) {
  if (!(R > 0)) throw NumericalError("cesaro_mean requires R > 0");
  if (lambda > 0) {
    const double k = std::sqrt(lambda);
    // free part: int_0^R floor(rho k / pi) drho in closed form
    const double c = k / kPi;
    const long long M = guarded_floor(c * R, 1e-12).value;
    double free_part = static_cast<double>(M) * R;
    free_part -= (kPi / k) * 0.5 * static_cast<double>(M) * static_cast<double>(M + 1);
    double interacting_part = 0.0;
    for (double rho : positive_axis_crossings(V, k, R, dr))
      interacting_part += R - rho;
    return (free_part - interacting_part) / R;
  }
  // lambda <= 0: xi^rho = -N^rho(lambda) steps down exactly at the zeros of
  // the shooting solution
  const auto traj = counting::prufer_sweep(V, lambda, R, 1e-11,
                                           dr > 0 ? dr : kInf);
  double total = 0.0;
  for (double z : counting::prufer_zeros(traj, 1e-12)) total += R - z;
  return -total / R;
}

double floor_average(const ProbeFunction& h, double R) {
  if (!(R > 0)) throw NumericalError("floor_average requires R > 0");
  auto w = [&](double x) { return x + h(x); };
  std::vector<double> cuts;
  cuts.push_back(0.0);
  cuts.push_back(R);
  for (double n = 1.0; n < R; n += 1.0) cuts.push_back(n);  // floor(x) steps
  for (double b : h.breakpoints())
    if (b > 0 && b < R) cuts.push_back(b);
  cuts = sorted_unique(std::move(cuts));
  std::vector<double> pieces = cuts;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    append_integer_crossings(w, cuts[i], cuts[i + 1], &pieces, 4);
  pieces = sorted_unique(std::move(pieces));
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const double mid = 0.5 * (pieces[i] + pieces[i + 1]);
    const double value = std::floor(w(mid)) - std::floor(mid);
    total += value * (pieces[i + 1] - pieces[i]);
  }
  return total / R;
}

LimitFunction LimitFunction::affine(double intercept, double slope) {
  LimitFunction f;
  f.is_affine_ = true;
  f.intercept_ = intercept;
  f.slope_ = slope;
  return f;
}

LimitFunction LimitFunction::step(std::vector<double> breaks,
                                  std::vector<double> values) {
  if (values.size() != breaks.size() + 1)
    throw NumericalError("step limit needs one more value than breakpoints");
  LimitFunction f;
  f.is_affine_ = false;
  f.breaks_ = std::move(breaks);
  f.values_ = std::move(values);
  return f;
}

double LimitFunction::operator()(double x) const {
  if (is_affine_) return intercept_ + slope_ * x;
  std::size_t i = 0;
  while (i < breaks_.size() && x >= breaks_[i]) ++i;
  return values_[i];
}

double LimitFunction::integral_against(const TestFunction& g, double tol) const {
  std::vector<double> breaks = breaks_;
  for (double b : g.breakpoints()) breaks.push_back(b);
  return num::integrate_pieces([&](double x) { return (*this)(x)*g(x); }, 0.0,
                               1.0, breaks, tol);
}

std::string LimitFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (is_affine_) {
    os << "affine " << intercept_ << " + " << slope_ << " x";
  } else {
    os << "step";
    for (double v : values_) os << " " << v;
  }
  return os.str();
}

double SequenceFamily::fn(double x, double r_n) const {
  double value = f(x) + uniform_coeff / r_n;
  if (singular_coeff != 0.0) {
    const double raw = x > 0 ? singular_coeff / (r_n * x)
                             : std::copysign(kInf, singular_coeff);
    value += std::clamp(raw, -singular_cap, singular_cap);
  }
  return value;
}

void SequenceFamily::validate(const TestFunction& g) const {
  if (singular_coeff != 0.0 && !std::isfinite(singular_cap) &&
      g.support_lo() <= 0.0)
    throw NumericalError(
        "sequence family rejected: uncapped 1/x term has no |g|-integrable "
        "majorant when the weight reaches x = 0");
}

ConvergenceReport lemma_sequence_check(const SequenceFamily& family,
                                       const TestFunction& g,
                                       const std::vector<double>& r_list,
                                       double tol) {
  family.validate(g);
  const double target = family.f.integral_against(g, std::min(tol, 1e-12));
  ConvergenceReport report;
  report.add_meta("study", "floor-lemma");
  report.add_meta("family", family.name.empty() ? family.f.describe() : family.name);
  report.add_meta("g", g.describe());
  report.add_meta("target", io::format_double(target));
  for (double r : r_list) {
    auto w = [&](double x) { return r * x + family.fn(x, r); };
    std::vector<double> cuts{0.0, 1.0};
    for (long long j = 1; static_cast<double>(j) < r; ++j)
      cuts.push_back(static_cast<double>(j) / r);
    for (double b : family.f.breakpoints())
      if (b > 0 && b < 1) cuts.push_back(b);
    for (double b : g.breakpoints())
      if (b > 0 && b < 1) cuts.push_back(b);
    cuts = sorted_unique(std::move(cuts));
    std::vector<double> pieces = cuts;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      append_integer_crossings(w, cuts[i], cuts[i + 1], &pieces, 2);
    pieces = sorted_unique(std::move(pieces));
    double observed = 0.0;
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
      const double mid = 0.5 * (pieces[i] + pieces[i + 1]);
      const double value = std::floor(w(mid)) - std::floor(r * mid);
      if (value != 0.0)
        observed += value * g.integral(pieces[i], pieces[i + 1], 1e-13);
    }
    report.rows.push_back({r, observed, target, std::abs(observed - target)});
  }
  return report;
}

std::vector<SequenceFamily> builtin_lemma_families() {
  std::vector<SequenceFamily> fams(5);
  fams[0].f = LimitFunction::affine(0.4, 0.2);
  fams[0].uniform_coeff = 1.0;
  fams[0].name = "affine plus uniform decay";
  fams[1].f = LimitFunction::affine(0.3, 0.0);
  fams[1].singular_coeff = 0.5;
  fams[1].singular_cap = 0.8;
  fams[1].name = "constant plus capped 1/x decay";
  fams[2].f = LimitFunction::affine(0.6, -0.2);
  fams[2].uniform_coeff = -0.7;
  fams[2].name = "affine minus uniform decay";
  fams[3].f = LimitFunction::affine(0.7, 0.0);
  fams[3].singular_coeff = 0.4;
  fams[3].name = "constant plus uncapped 1/x decay";
  fams[4].f = LimitFunction::step({0.5}, {0.2, 0.6});
  fams[4].uniform_coeff = 0.5;
  fams[4].name = "step plus uniform decay";
  return fams;
}

}  // namespace specshift::limits
