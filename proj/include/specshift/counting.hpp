#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "specshift/ode.hpp"
#include "specshift/potential.hpp"

namespace specshift::counting {

struct CountingResult {
  long long count = 0;                 // eigenvalues strictly below lambda
  std::vector<double> zero_locations;  // interior zeros of the shooting solution
  double lambda = 0;
  double r = 0;
};

// Eigenvalues of the free Dirichlet box strictly below lambda:
// #{ n >= 1 : (n pi / r)^2 < lambda }.  Left-continuous: an eigenvalue equal
// to lambda is not counted.
long long free_count(double r, double lambda);

// N^r(lambda) via the Pruefer angle theta' = cos^2(theta) + (lambda - V) sin^2(theta),
// theta(0) = 0; count = floor(theta(r)/pi), boundary multiples of pi resolving
// to the left limit within tol.
CountingResult oscillation_count(const potentials::Potential& V, double r,
                                 double lambda, double tol,
                                 bool want_zeros = false);

// The Pruefer angle as a trajectory over [0, R].
num::Trajectory prufer_sweep(const potentials::Potential& V, double lambda,
                             double R, double tol,
                             double max_step = std::numeric_limits<double>::infinity());

// Interior zeros of the shooting solution: crossings of multiples of pi.
std::vector<double> prufer_zeros(const num::Trajectory& theta, double guard_tol);

// All eigenvalues < 0 of the Dirichlet problem on (0, r), each refined in
// lambda to width tol.
std::vector<double> negative_eigenvalues_box(const potentials::Potential& V,
                                             double r, double tol);

// Box eigenvalues at doubling radii until elementwise stabilization; the
// limit is the discrete spectrum of the half-line operator.
std::vector<double> negative_eigenvalues_halfline(const potentials::Potential& V,
                                                  double tol,
                                                  double r_cap = 1600.0);

// #{ eigenvalues of the half-line operator strictly below lambda }, lambda < 0.
long long halfline_count(const potentials::Potential& V, double lambda,
                         double tol = 1e-8);

void write_counts_csv(std::ostream& os,
                      const std::vector<std::array<double, 3>>& rows);

}  // namespace specshift::counting
