#pragma once

#include <Eigen/Core>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "specshift/potential.hpp"
#include "specshift/test_function.hpp"

namespace specshift::trace {

// Second-order finite-difference Dirichlet discretization on (0, r):
// diagonal 2/h^2 + V(x_i), off-diagonal -1/h^2, h = r/(n+1).
struct DiscreteOperator {
  int n = 0;
  double h = 0;
  double r = 0;
  Eigen::VectorXd diagonal;
  double off_diagonal = 0;
};

DiscreteOperator discretize(const potentials::Potential& V, double r, int n);

// Full spectrum, ascending.
Eigen::VectorXd eigenvalues(const DiscreteOperator& op);

long long count_below(const Eigen::VectorXd& evs, double lambda);

// The three admitted trace-function classes: each has a closed-form
// derivative, so the spectral integral carries no quadrature model error.
class TraceFunction {
 public:
  static TraceFunction heat(double t);                      // e^{-t lambda}
  static TraceFunction resolvent(std::complex<double> z);   // Re (lambda - z)^{-1}
  static TraceFunction spline(limits::TestFunction f);      // compactly supported

  double value(double lambda) const;
  double derivative(double lambda) const;
  // lambda beyond which |f'| times the given bound on |xi^r| stays below eps
  double truncation_lambda(double xi_bound, double eps) const;
  std::string describe() const;

 private:
  enum class Kind { Heat, Resolvent, Spline };
  TraceFunction() : spline_fn_(limits::TestFunction::hat(0, 2, 1)) {}

  Kind kind_ = Kind::Heat;
  double t_ = 1;
  std::complex<double> z_{0, 1};
  limits::TestFunction spline_fn_;
};

// tr(f(H^r_disc) - f(H0^r_disc)) over the full discrete spectra.
double trace_diff(const potentials::Potential& V, double r, int n,
                  const TraceFunction& f);

// int xi^r(lambda) f'(lambda) dlambda by jump enumeration; cells contribute
// xi * (f(hi) - f(lo)) exactly.
double ssf_box_integral_of_derivative(const potentials::Potential& V, double r,
                                      const TraceFunction& f, double tol);

struct Residual {
  double lhs;
  double rhs;
  double residual;
};

Residual trace_formula_residual(const potentials::Potential& V, double r, int n,
                                const TraceFunction& f, double tol);

void write_residual_csv(std::ostream& os, const std::vector<int>& ns,
                        const std::vector<Residual>& rows);

}  // namespace specshift::trace
