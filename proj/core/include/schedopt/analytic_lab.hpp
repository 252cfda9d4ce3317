#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "schedopt/noise_schedule.hpp"
#include "schedopt/schedule.hpp"

namespace schedopt {

/// Isotropic Gaussian data N(mean, stdev^2 I). stdev == 0 is the point-mass
/// limit, where the denoiser returns the mean everywhere.
struct GaussianDataModel {
  std::vector<double> mean{0.0, 0.0};
  double stdev = 1.0;

  std::size_t dim() const { return mean.size(); }
};

enum class StepRule {
  kHybridMidpoint,  ///< data prediction taken at the lambda midpoint, state from a half-step predictor
  kFirstOrder,      ///< data prediction taken at the start of the step (DDIM-like)
};

/// Number of uniform-lambda steps of the dense reference run.
inline constexpr int kReferenceSteps = 1000;

struct TrajectoryResult {
  std::vector<double> endpoint;
  std::vector<double> reference_endpoint;
  /// Euclidean distance between the two endpoints.
  double endpoint_error = 0.0;
};

/// Exact posterior mean E[x_0 | x_t] at the given scales.
std::vector<double> denoise(const GaussianDataModel& data, const std::vector<double>& x, double alpha, double sigma);

/// Integrates the probability-flow ODE (data-prediction form) along `sched`
/// starting from an exact draw of the noisiest marginal, and along a
/// kReferenceSteps uniform-lambda schedule over the same endpoints from the
/// same draw. The reference always uses the hybrid midpoint rule. Throws
/// NumericOverflow on a non-finite state and std::invalid_argument for an
/// empty mean or negative stdev.
TrajectoryResult sample_trajectory(const GaussianDataModel& data, const NoiseScheduleModel& model,
                                   const Schedule& sched, std::uint64_t seed,
                                   StepRule rule = StepRule::kHybridMidpoint);

struct NamedSchedule {
  std::string name;
  Schedule schedule;
};

struct ErrorRow {
  std::string name;
  double mean_error = 0.0;
  double stdev_error = 0.0;
};

/// Mean and sample standard deviation of the endpoint error over seeds
/// first_seed .. first_seed + n_seeds - 1, the same seeds for every schedule.
/// Throws std::invalid_argument for an empty list, n_seeds < 1 or schedules
/// whose nfe differs from `nfe`.
std::vector<ErrorRow> compare_schedules(const GaussianDataModel& data, const NoiseScheduleModel& model,
                                        const std::vector<NamedSchedule>& schedules, int nfe, int n_seeds,
                                        std::uint64_t first_seed = 0, StepRule rule = StepRule::kHybridMidpoint);

// Baseline grids between t_max (noisiest) and t_eps.

Schedule uniform_time_schedule(const NoiseScheduleModel& model, double t_max, double t_eps, int nfe);
Schedule uniform_lambda_schedule(const NoiseScheduleModel& model, double t_max, double t_eps, int nfe);
/// Power-law spacing in noise level with the given rho (7 is the usual choice).
Schedule edm_schedule(const NoiseScheduleModel& model, double t_max, double t_eps, int nfe, double rho = 7.0);

}  // namespace schedopt
