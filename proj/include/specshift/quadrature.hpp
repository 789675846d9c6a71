#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "specshift/common.hpp"

namespace specshift::num {

namespace detail {
// 15-point Kronrod extension of 7-point Gauss.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace detail

// One Gauss-Kronrod panel; err receives |K15 - G7|.
template <class F>
double gk15(F&& f, double a, double b, double* err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * detail::kKronrodNodes[i]);
    fv[14 - i] = f(c + h * detail::kKronrodNodes[i]);
  }
  fv[7] = f(c);
  double kr = detail::kKronrodWeights[7] * fv[7];
  double gs = detail::kGaussWeights[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    kr += detail::kKronrodWeights[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1)
      gs += detail::kGaussWeights[i / 2] * (fv[i] + fv[14 - i]);
  }
  if (err) *err = std::abs(h) * std::abs(kr - gs);
  return h * kr;
}

// Adaptive bisection to an absolute tolerance.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol, int max_depth = 48) {
  if (a == b) return 0.0;
  struct Panel {
    double a, b, tol;
    int depth;
  };
  double total = 0.0;
  std::vector<Panel> stack{{a, b, std::max(abs_tol, 1e-300), 0}};
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    double err = 0.0;
    const double val = gk15(f, p.a, p.b, &err);
    if (err <= p.tol || p.depth >= max_depth) {
      total += val;
      continue;
    }
    const double m = 0.5 * (p.a + p.b);
    stack.push_back({p.a, m, 0.5 * p.tol, p.depth + 1});
    stack.push_back({m, p.b, 0.5 * p.tol, p.depth + 1});
  }
  return total;
}

// Splits at the supplied breakpoints (clipped to [a, b]) before adapting;
// meant for integrands that are smooth between known kinks.
template <class F>
double integrate_pieces(F&& f, double a, double b,
                        const std::vector<double>& breaks, double abs_tol) {
  std::vector<double> cuts{a, b};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  const double piece_tol = abs_tol / static_cast<double>(cuts.size());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate(f, cuts[i], cuts[i + 1], piece_tol);
  return total;
}

// Integral over [a, inf) via x = a + u/(1-u).
template <class F>
double integrate_to_infinity(F&& f, double a, double abs_tol) {
  auto g = [&](double u) {
    const double d = 1.0 - u;
    return f(a + u / d) / (d * d);
  };
  return integrate(g, 0.0, 1.0 - 1e-14, abs_tol);
}

}  // namespace specshift::num
