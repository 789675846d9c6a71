#include "specshift/spectral_shift.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "specshift/csv.hpp"
#include "specshift/roots.hpp"

namespace specshift::ssf {

using potentials::Potential;

HalflineSsf::HalflineSsf(const Potential& V, double tol) : V_(V), tol_(tol) {
  eigenvalues_ = counting::negative_eigenvalues_halfline(V, tol);
  resonant_ = phase::detect_resonance(V, 1e-6).resonant;
}

double HalflineSsf::operator()(double lambda) const {
  if (lambda < 0) {
    long long n = 0;
    for (double ev : eigenvalues_)
      if (ev < lambda) ++n;
    return -static_cast<double>(n);
  }
  if (lambda == 0.0)  // left limit: minus the number of bound states
    return -static_cast<double>(eigenvalues_.size());
  return -phase::full_phase(V_, std::sqrt(lambda), tol_).delta / kPi;
}

double ssf_halfline(const Potential& V, double lambda, double tol) {
  if (V.is_zero()) return 0.0;
  if (lambda < 0)
    return -static_cast<double>(counting::halfline_count(V, lambda, tol));
  if (lambda == 0.0)
    return -static_cast<double>(counting::negative_eigenvalues_halfline(V, tol).size());
  return -phase::full_phase(V, std::sqrt(lambda), tol).delta / kPi;
}

long long ssf_box(const Potential& V, double r, double lambda, double tol) {
  if (!(r > 0)) throw NumericalError("ssf_box requires r > 0");
  if (lambda <= 0.0) return -counting::oscillation_count(V, r, lambda, tol).count;
  const double k = std::sqrt(lambda);
  const double a = r * k / kPi;
  const double delta = phase::phase_at(V, k, r, tol);
  const double b = a + delta / kPi;
  const auto fa = guarded_floor(a);
  const auto fb = guarded_floor(b);
  // the free floor argument carries only rounding error; the interacting one
  // inherits the phase tolerance
  const double uncertainty = tol * std::max(1.0, r) / kPi;
  const double dist_b = distance_to_integer(b);
  if (!fb.near_integer && dist_b <= uncertainty) {
    const long long v1 = fa.value - fb.value;
    throw JumpAmbiguity("xi^r floor argument within phase tolerance of an integer",
                        v1 - 1, v1);
  }
  return fa.value - fb.value;
}

std::vector<BoxJump> box_jumps(const Potential& V, double r, double lambda_max,
                               double tol) {
  std::vector<BoxJump> jumps;
  if (!(lambda_max > 0)) return jumps;
  const double k_max = std::sqrt(lambda_max);
  // free floor argument: closed-form crossings at (n pi / r)^2
  for (long long n = 1;; ++n) {
    const double lam = std::pow(static_cast<double>(n) * kPi / r, 2);
    if (lam > lambda_max) break;
    jumps.push_back({lam, +1});
  }
  // interacting floor argument b(lambda) = (r sqrt(lambda) + delta^r)/pi is
  // non-monotone in general but its floor is the (monotone) counting function,
  // so each integer level is crossed exactly once
  auto b_of = [&](double lam) {
    const double k = std::sqrt(lam);
    return (r * k + phase::phase_at(V, k, r, tol)) / kPi;
  };
  const double lam_lo = std::min(1e-12, 0.5 * lambda_max);
  const double b_lo = b_of(lam_lo);
  const double b_hi = b_of(lambda_max);
  (void)k_max;
  double left = lam_lo;
  for (long long n = static_cast<long long>(std::floor(b_lo)) + 1;
       static_cast<double>(n) <= b_hi; ++n) {
    const double level = static_cast<double>(n);
    // expand the bracket to the right until b exceeds the level
    double right = left;
    double step = std::max(1e-6, 0.05 * (lambda_max - left));
    double b_right = b_of(right);
    while (b_right < level) {
      right = std::min(lambda_max, right + step);
      b_right = b_of(right);
      step *= 2.0;
      if (right >= lambda_max && b_right < level) break;
    }
    if (b_right < level) break;
    const double lam = num::brent(
        [&](double l) { return b_of(l) - level; }, left, right,
        1e-12 * std::max(1.0, lambda_max));
    jumps.push_back({lam, -1});
    left = lam;
  }
  std::sort(jumps.begin(), jumps.end(),
            [](const BoxJump& x, const BoxJump& y) { return x.lambda < y.lambda; });
  return jumps;
}

SsfProfile ssf_box_profile(const Potential& V, double r,
                           const Eigen::ArrayXd& grid, double tol) {
  SsfProfile out;
  out.lambdas = grid;
  out.box_length = r;
  out.values.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    out.values[i] = static_cast<double>(ssf_box(V, r, grid[i], tol));
  const double lambda_max = grid.size() ? grid[grid.size() - 1] : 0.0;
  for (const auto& j : box_jumps(V, r, lambda_max, tol))
    out.jump_locations.push_back(j.lambda);
  // negative-axis jumps sit at the box eigenvalues
  if (grid.size() && grid[0] < 0)
    for (double ev : counting::negative_eigenvalues_box(V, r, 1e-9))
      if (ev >= grid[0]) out.jump_locations.push_back(ev);
  std::sort(out.jump_locations.begin(), out.jump_locations.end());
  return out;
}

SsfProfile ssf_halfline_profile(const Potential& V, const Eigen::ArrayXd& grid,
                                double tol) {
  const HalflineSsf f(V, tol);
  SsfProfile out;
  out.lambdas = grid;
  out.values.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) out.values[i] = f(grid[i]);
  out.jump_locations = f.eigenvalues();
  return out;
}

Eigen::ArrayXd default_profile_grid(const Potential& V, double lambda_max, int n) {
  const double depth = V.depth_bound().value_or(1.0);
  const double lo = -std::max(0.0, depth) - 1.0;
  const int n_neg = n / 4;
  const int n_geo = n / 4;
  const int n_uni = n - n_neg - n_geo;
  Eigen::ArrayXd grid(n);
  for (int i = 0; i < n_neg; ++i)
    grid[i] = lo + (0.0 - lo) * static_cast<double>(i) / n_neg;
  const double lam_min = lambda_max * 1e-8;
  const double lam_mid = 0.1 * lambda_max;
  for (int i = 0; i < n_geo; ++i)
    grid[n_neg + i] =
        lam_min * std::pow(lam_mid / lam_min, static_cast<double>(i) / n_geo);
  for (int i = 0; i < n_uni; ++i)
    grid[n_neg + n_geo + i] =
        lam_mid + (lambda_max - lam_mid) * static_cast<double>(i) / (n_uni - 1);
  return grid;
}

void SsfProfile::write_csv(std::ostream& os, const Potential& V, double tol) const {
  io::write_comment(os, "potential = " + V.describe());
  io::write_comment(os, "potential_hash = " + hex64(V.hash()));
  io::write_comment(os, box_length
                            ? "r = " + io::format_double(*box_length)
                            : std::string("r = halfline"));
  io::write_comment(os, "tol = " + io::format_double(tol));
  os << "lambda,value,is_jump\n";
  std::size_t j = 0;
  auto emit = [&](double lam, double val, bool is_jump) {
    os << io::format_double(lam) << ',' << io::format_double(val) << ','
       << (is_jump ? '1' : '0') << '\n';
  };
  // jump rows carry the left-limit value (the profile is left-continuous)
  double left_value = lambdas.size() ? values[0] : 0.0;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    while (j < jump_locations.size() && jump_locations[j] < lambdas[i]) {
      emit(jump_locations[j], left_value, true);
      ++j;
    }
    emit(lambdas[i], values[i], false);
    left_value = values[i];
  }
  for (; j < jump_locations.size(); ++j)
    emit(jump_locations[j], left_value, true);
}

}  // namespace specshift::ssf
