#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "schedopt/noise_schedule.hpp"

namespace schedopt {

/// Minimum spacing between consecutive log-SNR values of a feasible schedule.
inline constexpr double kMinLambdaGap = 1e-4;

/// Absolute slack on gap checks; covers round-off from coordinate shifts.
inline constexpr double kGapSlack = 1e-12;

/// Upper-level search point: power-law exponent and the end/start times of
/// the generated schedule.
struct StrategyVector {
  double rho = 7.0;
  double t_eps = 0.02;
  double t_max = 0.98;

  friend bool operator==(const StrategyVector&, const StrategyVector&) = default;
};

/// How strictly a schedule's ordering is validated on construction.
enum class GapCheck {
  kStrict,         ///< every lambda gap >= min_gap
  kNonDecreasing,  ///< ties allowed; used when scoring externally supplied grids
};

/// An ordered sampling schedule. `lambdas()` ascends (index 0 is the noisiest
/// point, index N the cleanest) and `times()` descends; both hold N + 1 values
/// for an N-step (N function evaluation) schedule.
class Schedule {
 public:
  /// Times are derived from the lambdas by inversion. Throws
  /// InfeasibleSchedule on ordering violations and std::out_of_range if a
  /// lambda lies outside the model's range.
  static Schedule from_lambdas(const NoiseScheduleModel& model, std::vector<double> lambdas,
                               GapCheck check = GapCheck::kStrict, double min_gap = kMinLambdaGap);

  /// Lambdas are derived from the times. Throws std::domain_error for times
  /// outside the model domain.
  static Schedule from_times(const NoiseScheduleModel& model, std::vector<double> times,
                             GapCheck check = GapCheck::kStrict, double min_gap = kMinLambdaGap);

  /// Both sequences supplied by the caller (already consistent); only the
  /// ordering is validated.
  static Schedule from_pairs(std::vector<double> lambdas, std::vector<double> times,
                             GapCheck check = GapCheck::kStrict, double min_gap = kMinLambdaGap);

  std::span<const double> lambdas() const { return lambdas_; }
  std::span<const double> times() const { return times_; }
  int nfe() const { return static_cast<int>(lambdas_.size()) - 1; }

  /// Smallest consecutive lambda gap.
  double min_lambda_gap() const;

  friend bool operator==(const Schedule&, const Schedule&) = default;

 private:
  Schedule(std::vector<double> lambdas, std::vector<double> times)
      : lambdas_(std::move(lambdas)), times_(std::move(times)) {}

  static void validate(std::span<const double> lambdas, std::span<const double> times, GapCheck check,
                       double min_gap);

  std::vector<double> lambdas_;
  std::vector<double> times_;
};

/// True when consecutive lambdas ascend by at least `min_gap` (minus kGapSlack).
bool gaps_feasible(std::span<const double> lambdas, double min_gap = kMinLambdaGap);

}  // namespace schedopt
