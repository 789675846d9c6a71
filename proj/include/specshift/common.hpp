#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace specshift {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Arguments of floor functions are resolved to the left limit when they sit
// within this band around an integer.
inline constexpr double kFloorGuard = 1e-9;

// Failures of the numerical machinery.  The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InadmissiblePotential : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularIntegration : public NumericalError {
 public:
  SingularIntegration(const std::string& what, double where)
      : NumericalError(what + " (x = " + std::to_string(where) + ")"),
        location(where) {}
  double location;
};

class TailTooSlow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class JumpAmbiguity : public NumericalError {
 public:
  JumpAmbiguity(const std::string& what, long long lo, long long hi)
      : NumericalError(what + " (candidates " + std::to_string(lo) + ", " +
                       std::to_string(hi) + ")"),
        lower_candidate(lo),
        upper_candidate(hi) {}
  long long lower_candidate;
  long long upper_candidate;
};

class SlowConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InconclusiveRounding : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct GuardedFloor {
  long long value;
  bool near_integer;
};

// floor(x), except that arguments within `guard` of an integer take the left
// limit (the integer minus one).  Counting functions are left-continuous, so
// this is the value they assume at their own jump points.
inline GuardedFloor guarded_floor(double x, double guard = kFloorGuard) {
  const double nearest = std::nearbyint(x);
  if (std::abs(x - nearest) <= guard)
    return {static_cast<long long>(nearest) - 1, true};
  return {static_cast<long long>(std::floor(x)), false};
}

inline double distance_to_integer(double x) {
  return std::abs(x - std::nearbyint(x));
}

std::uint64_t fnv1a(std::string_view s);
std::string hex64(std::uint64_t v);

// Runs fn(0..n-1) on up to `threads` workers.  Callers own determinism:
// every index writes to its own slot.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace specshift
