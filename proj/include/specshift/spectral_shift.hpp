#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <vector>

#include "specshift/counting.hpp"
#include "specshift/phase.hpp"
#include "specshift/potential.hpp"

namespace specshift::ssf {

// xi (half-line) or xi^r (box) on an energy grid.  Box profiles carry the
// lambda of every unit jump so that the integer step structure survives
// sampling.
struct SsfProfile {
  Eigen::ArrayXd lambdas;
  Eigen::ArrayXd values;
  std::optional<double> box_length;
  std::vector<double> jump_locations;

  void write_csv(std::ostream& os, const potentials::Potential& V,
                 double tol) const;  // columns: lambda,value,is_jump
};

// Half-line spectral shift with the discrete spectrum and the Levinson count
// cached; cheap to evaluate on a grid.
class HalflineSsf {
 public:
  HalflineSsf(const potentials::Potential& V, double tol);

  double operator()(double lambda) const;
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  bool resonant() const { return resonant_; }
  const potentials::Potential& potential() const { return V_; }

 private:
  potentials::Potential V_;
  double tol_;
  std::vector<double> eigenvalues_;
  bool resonant_ = false;
};

// xi(lambda): -N(lambda) below zero, -delta(sqrt(lambda))/pi above, left
// limit at lambda = 0.
double ssf_halfline(const potentials::Potential& V, double lambda, double tol);

// xi^r(lambda): -N^r(lambda) below zero and the floor-difference form above,
// guarded near integer floor arguments.  Throws JumpAmbiguity when the phase
// tolerance cannot separate a floor argument from an integer.
long long ssf_box(const potentials::Potential& V, double r, double lambda,
                  double tol);

struct BoxJump {
  double lambda;
  int direction;  // +1: free counting steps up (xi^r up), -1: interacting
};

// Every jump of xi^r in (0, lambda_max], both floor arguments.
std::vector<BoxJump> box_jumps(const potentials::Potential& V, double r,
                               double lambda_max, double tol);

SsfProfile ssf_box_profile(const potentials::Potential& V, double r,
                           const Eigen::ArrayXd& grid, double tol);
SsfProfile ssf_halfline_profile(const potentials::Potential& V,
                                const Eigen::ArrayXd& grid, double tol);

// Default experiment grid: uniform below zero, geometric near zero (the
// Levinson end dominates the error), uniform above.
Eigen::ArrayXd default_profile_grid(const potentials::Potential& V,
                                    double lambda_max, int n = 2000);

}  // namespace specshift::ssf
