#pragma once

#include <Eigen/Core>
#include <complex>
#include <iosfwd>
#include <limits>

#include "specshift/ode.hpp"
#include "specshift/potential.hpp"

namespace specshift::phase {

// delta^r(k) sampled on a momentum grid.  The per-point error bound is
// tail_integral(V, truncation_radius) / k, the certified truncation error of
// the phase at finite radius.
struct PhaseCurve {
  Eigen::ArrayXd momenta;
  Eigen::ArrayXd values;
  Eigen::ArrayXd error_bounds;
  double truncation_radius = 0;
  static constexpr const char* convention_tag = "delta(0 at infinity), continuous";

  void write_csv(std::ostream& os) const;  // header: k,delta,error_bound
};

struct PhaseValue {
  double delta;
  double error_bound;
};

struct JostValue {
  double k;
  std::complex<double> value;
  double modulus;
  double argument;  // principal branch
};

struct ResonanceResult {
  bool resonant;
  double witness;  // |F(0)|
};

struct LevinsonResult {
  int count;            // bound states; for a flagged resonance, the integer part
  bool resonant;        // delta(0+)/pi sits at a half-integer
  double limit_over_pi; // extrapolated delta(0+)/pi
};

// Truncated phase delta^r(k): the variable-phase equation integrated from 0
// to r with local error per unit length <= tol.  The value is the continuous
// phase, never reduced mod pi.
double phase_at(const potentials::Potential& V, double k, double r, double tol);

// Full phase with a certified truncation + integration error bound.
PhaseValue full_phase(const potentials::Potential& V, double k, double tol,
                      double r_cap = 1e6);

// Smallest radius R with tail_integral(V, R) <= k * tol (support radius for
// compactly supported V).  Throws TailTooSlow past r_cap.
double truncation_radius_for(const potentials::Potential& V, double k, double tol,
                             double r_cap = 1e6);

// Jost function value F^X(k) = f(0) of the solution matching e^{ikX} at the
// truncation radius X; for k = 0 the boundary data is f(X) = 1, f'(X) = 0.
JostValue jost(const potentials::Potential& V, double k, double tol);

ResonanceResult detect_resonance(const potentials::Potential& V, double tol);

// Bound-state count from the k -> 0 limit of the full phase along a geometric
// momentum grid with Richardson extrapolation.  Flags the resonant case
// (half-integer limit), throws InconclusiveRounding when neither fits.
LevinsonResult levinson_count(const potentials::Potential& V, double tol);

// delta^rho(k) for rho in [0, R], one forward sweep of the phase equation.
num::Trajectory phase_sweep(const potentials::Potential& V, double k, double R,
                            double tol,
                            double max_step = std::numeric_limits<double>::infinity());

PhaseCurve sample_phase_curve(const potentials::Potential& V, double k_min,
                              double k_max, int n, double radius, double tol,
                              int threads = 1);
// radius chosen from the tail bound at the smallest momentum
PhaseCurve sample_phase_curve_full(const potentials::Potential& V, double k_min,
                                   double k_max, int n, double tol,
                                   int threads = 1);

}  // namespace specshift::phase
