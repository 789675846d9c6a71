#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "specshift/spectral_shift.hpp"
#include "specshift/test_function.hpp"

namespace specshift::limits {

struct ReportRow {
  double parameter;
  double observed;
  double target;
  double abs_error;
};

struct ConvergenceReport {
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_meta(std::string key, std::string value) {
    metadata.emplace_back(std::move(key), std::move(value));
  }
  void write_csv(std::ostream& os) const;
};

// int xi^r(lambda) g(lambda) dlambda, piecewise-exact: the integrand is a step
// function between eigenvalue and floor-argument jumps, and g integrates in
// closed form (or to tol) on each cell.
double weak_integral(const potentials::Potential& V, double r,
                     const TestFunction& g, double tol);

// int xi(lambda) g(lambda) dlambda for the half-line profile.
double halfline_weak_target(const ssf::HalflineSsf& xi, const TestFunction& g,
                            double tol);

ConvergenceReport weak_convergence_study(const potentials::Potential& V,
                                         const TestFunction& g,
                                         const std::vector<double>& r_list,
                                         double tol);

// (1/R) int_0^R xi^rho(lambda) drho with exact stepping over the rho-jumps of
// the integrand.  dr > 0 caps the sweep node spacing (0 = automatic).
double cesaro_mean(const potentials::Potential& V, double lambda, double R,
                   double dr);

// (1/R) int_0^R (floor(x + h(x)) - floor(x)) dx, exact between crossings.
double floor_average(const ProbeFunction& h, double R);

// Limit function of the floor-sequence study: affine or step on [0, 1].
class LimitFunction {
 public:
  static LimitFunction affine(double intercept, double slope);
  static LimitFunction step(std::vector<double> breaks, std::vector<double> values);

  double operator()(double x) const;
  const std::vector<double>& breakpoints() const { return breaks_; }
  double integral_against(const TestFunction& g, double tol) const;  // over [0,1]
  std::string describe() const;

 private:
  LimitFunction() = default;
  bool is_affine_ = true;
  double intercept_ = 0, slope_ = 0;
  std::vector<double> breaks_, values_;
};

// f_n(x) = f(x) + uniform/r_n + clamp(singular/(r_n x), +-cap).
struct SequenceFamily {
  LimitFunction f = LimitFunction::affine(0, 0);
  double uniform_coeff = 0;
  double singular_coeff = 0;
  double singular_cap = std::numeric_limits<double>::infinity();
  std::string name;

  double fn(double x, double r_n) const;
  // rejects families whose majorant is not |g|-integrable
  void validate(const TestFunction& g) const;
};

// Rows (r_n, int (floor(r_n x + f_n) - floor(r_n x)) g dx, int f g, error).
ConvergenceReport lemma_sequence_check(const SequenceFamily& family,
                                       const TestFunction& g,
                                       const std::vector<double>& r_list,
                                       double tol);

// The stock families exercised by the CLI and the acceptance run.
std::vector<SequenceFamily> builtin_lemma_families();

}  // namespace specshift::limits
