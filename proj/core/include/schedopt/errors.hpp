#pragma once

#include <stdexcept>
#include <string>

namespace schedopt {

// Domain errors on time arguments are reported as std::domain_error and
// log-SNR range errors as std::out_of_range. The types below cover the
// optimisation-specific failure modes.

/// A schedule or strategy that violates the minimum log-SNR gap, ordering,
/// or endpoint requirements.
class InfeasibleSchedule : public std::runtime_error {
 public:
  explicit InfeasibleSchedule(const std::string& what) : std::runtime_error(what) {}
};

/// An objective evaluation left the representable double range.
class NumericOverflow : public std::overflow_error {
 public:
  explicit NumericOverflow(const std::string& what) : std::overflow_error(what) {}
};

/// Adaptive quadrature could not reach its tolerance within the subdivision budget.
class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

/// Every candidate of a global search was infeasible.
class SearchFailure : public std::runtime_error {
 public:
  explicit SearchFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace schedopt
