#pragma once

#include <cstddef>
#include <functional>

namespace schedopt {

using ScalarFunction = std::function<double(double)>;

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// Subdivides the interval with the largest |K15 - G7| until the summed
/// estimate drops below `abs_tol` (or below the double round-off floor of the
/// accumulated magnitude). Throws QuadratureError once `max_intervals` is
/// exhausted or the integrand returns a non-finite value.
QuadratureResult integrate_adaptive(const ScalarFunction& f, double a, double b, double abs_tol,
                                    std::size_t max_intervals = 4096);

}  // namespace schedopt
