#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "schedopt/mep.hpp"
#include "schedopt/schedule.hpp"

namespace schedopt {

enum class EndpointPolicy {
  kFixed,  ///< lambda_0 and lambda_N stay where the initial schedule put them
  kFree,   ///< endpoints move inside the boxes below
};

struct LambdaInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct LocalOptSettings {
  int max_iterations = 200;
  /// Relative objective decrease below which an accepted step counts as converged.
  double convergence_tol = 1e-9;
  double min_lambda_gap = kMinLambdaGap;
  EndpointPolicy endpoint_policy = EndpointPolicy::kFixed;
  /// Free-mode boxes for lambda_0 and lambda_N. When unset they follow the
  /// default search boxes t_max in [0.96, 1] and t_eps in [0.01, 0.03].
  std::optional<LambdaInterval> start_box;
  std::optional<LambdaInterval> end_box;
  /// Called with every lambda vector the objective is evaluated at.
  std::function<void(std::span<const double>)> observer;
};

struct RefineReport {
  Schedule schedule;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Local minimisation of the midpoint error proxy starting from `init`.
///
/// Consecutive lambdas are kept at least `min_lambda_gap` apart throughout.
/// The result never has a larger objective than `init`; stalling is not an
/// error and returns the best point found. Throws InfeasibleSchedule if
/// `init` violates the gap constraint, std::invalid_argument for bad
/// settings.
Schedule refine(const MepConfig& cfg, const Schedule& init, const LocalOptSettings& settings = {});
RefineReport refine_with_report(const MepConfig& cfg, const Schedule& init, const LocalOptSettings& settings = {});

/// Euclidean projection onto {l_i <= y_i <= u_i, y_0 <= y_1 <= ... <= y_n}
/// for non-decreasing bound sequences, by pool adjacent violators where each
/// pooled block takes its mean clipped to the block's bounds.
void project_monotone(std::span<double> y, std::span<const double> lower, std::span<const double> upper);

}  // namespace schedopt
