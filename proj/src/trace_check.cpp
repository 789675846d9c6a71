#include "specshift/trace_check.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "specshift/counting.hpp"
#include "specshift/csv.hpp"
#include "specshift/spectral_shift.hpp"

namespace specshift::trace {

using potentials::Potential;

DiscreteOperator discretize(const Potential& V, double r, int n) {
  if (n < 2) throw NumericalError("discretize requires n >= 2");
  if (!(r > 0)) throw NumericalError("discretize requires r > 0");
  DiscreteOperator op;
  op.n = n;
  op.r = r;
  op.h = r / static_cast<double>(n + 1);
  op.off_diagonal = -1.0 / (op.h * op.h);
  op.diagonal.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = static_cast<double>(i + 1) * op.h;
    op.diagonal[i] = 2.0 / (op.h * op.h) + V(x);
  }
  return op;
}

Eigen::VectorXd eigenvalues(const DiscreteOperator& op) {
  Eigen::VectorXd sub = Eigen::VectorXd::Constant(op.n - 1, op.off_diagonal);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(op.diagonal, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("tridiagonal eigensolver failed");
  return solver.eigenvalues();
}

long long count_below(const Eigen::VectorXd& evs, double lambda) {
  long long n = 0;
  for (Eigen::Index i = 0; i < evs.size(); ++i)
    if (evs[i] < lambda) ++n;
  return n;
}

TraceFunction TraceFunction::heat(double t) {
  if (!(t > 0)) throw NumericalError("heat trace function requires t > 0");
  TraceFunction f;
  f.kind_ = Kind::Heat;
  f.t_ = t;
  return f;
}

TraceFunction TraceFunction::resolvent(std::complex<double> z) {
  if (z.imag() == 0.0)
    throw NumericalError("resolvent trace function requires Im z != 0");
  TraceFunction f;
  f.kind_ = Kind::Resolvent;
  f.z_ = z;
  return f;
}

TraceFunction TraceFunction::spline(limits::TestFunction fn) {
  TraceFunction f;
  f.kind_ = Kind::Spline;
  f.spline_fn_ = std::move(fn);
  return f;
}

double TraceFunction::value(double lambda) const {
  switch (kind_) {
    case Kind::Heat:
      return std::exp(-t_ * lambda);
    case Kind::Resolvent:
      return ((lambda - std::conj(z_)) / std::norm(lambda - z_)).real();
    case Kind::Spline:
      return spline_fn_(lambda);
  }
  return 0.0;
}

double TraceFunction::derivative(double lambda) const {
  switch (kind_) {
    case Kind::Heat:
      return -t_ * std::exp(-t_ * lambda);
    case Kind::Resolvent: {
      const std::complex<double> d = lambda - z_;
      return (-1.0 / (d * d)).real();
    }
    case Kind::Spline:
      return spline_fn_.derivative(lambda);
  }
  return 0.0;
}

double TraceFunction::truncation_lambda(double xi_bound, double eps) const {
  switch (kind_) {
    case Kind::Heat: {
      double lam = 1.0;
      while (xi_bound * t_ * std::exp(-t_ * lam) > eps && lam < 1e8) lam *= 2.0;
      return lam;
    }
    case Kind::Resolvent: {
      double lam = std::abs(z_) + 1.0;
      while (xi_bound / std::norm(lam - z_) > eps && lam < 1e9) lam *= 2.0;
      return lam;
    }
    case Kind::Spline:
      return spline_fn_.support_hi();
  }
  return 1.0;
}

std::string TraceFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Heat:
      os << "heat t=" << t_;
      break;
    case Kind::Resolvent:
      os << "resolvent z=" << z_.real() << "+" << z_.imag() << "i";
      break;
    case Kind::Spline:
      os << "spline " << spline_fn_.describe();
      break;
  }
  return os.str();
}

double trace_diff(const Potential& V, double r, int n, const TraceFunction& f) {
  const Eigen::VectorXd ev = eigenvalues(discretize(V, r, n));
  const Eigen::VectorXd ev0 = eigenvalues(discretize(Potential::zero(), r, n));
  // sum highest eigenvalues first: f decays there, so the small terms
  // accumulate before the large ones
  double total = 0.0;
  for (int i = n - 1; i >= 0; --i) total += f.value(ev[i]) - f.value(ev0[i]);
  return total;
}

double ssf_box_integral_of_derivative(const Potential& V, double r,
                                      const TraceFunction& f, double tol) {
  double total = 0.0;
  // negative axis: xi^r = -(i+1) on (ev_i, ev_{i+1}); zero below the bottom
  const auto evs = counting::negative_eigenvalues_box(V, r, std::min(tol, 1e-9));
  for (std::size_t i = 0; i < evs.size(); ++i) {
    const double cell_lo = evs[i];
    const double cell_hi = i + 1 < evs.size() ? evs[i + 1] : 0.0;
    const double xi = -static_cast<double>(i + 1);
    total += xi * (f.value(cell_hi) - f.value(cell_lo));
  }
  // positive axis: cells between floor-argument jumps
  const double xi_bound =
      static_cast<double>(evs.size()) + V.tail_integral(0.0) / kPi + 2.0;
  const double lam_cap = f.truncation_lambda(xi_bound, 1e-14);
  const auto jumps = ssf::box_jumps(V, r, lam_cap, std::min(tol, 1e-10));
  double cell_lo = 0.0;
  long long value = jumps.empty()
                        ? ssf::ssf_box(V, r, 0.5 * lam_cap, std::min(tol, 1e-10))
                        : ssf::ssf_box(V, r, 0.5 * jumps.front().lambda,
                                       std::min(tol, 1e-10));
  for (std::size_t i = 0; i <= jumps.size(); ++i) {
    const double cell_hi = i < jumps.size() ? jumps[i].lambda : lam_cap;
    if (value != 0 && cell_hi > cell_lo)
      total += static_cast<double>(value) * (f.value(cell_hi) - f.value(cell_lo));
    if (i < jumps.size()) value += jumps[i].direction;
    cell_lo = cell_hi;
  }
  return total;
}

Residual trace_formula_residual(const Potential& V, double r, int n,
                                const TraceFunction& f, double tol) {
  const double lhs = trace_diff(V, r, n, f);
  const double rhs = ssf_box_integral_of_derivative(V, r, f, tol);
  return {lhs, rhs, std::abs(lhs - rhs)};
}

void write_residual_csv(std::ostream& os, const std::vector<int>& ns,
                        const std::vector<Residual>& rows) {
  os << "n,lhs,rhs,residual\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    os << io::format_int(ns[i]) << ',' << io::format_double(rows[i].lhs) << ','
       << io::format_double(rows[i].rhs) << ','
       << io::format_double(rows[i].residual) << '\n';
}

}  // namespace specshift::trace
