#pragma once

#include "schedopt/noise_schedule.hpp"
#include "schedopt/schedule.hpp"

namespace schedopt {

/// Power-law ("Karras") initial schedule in noise-level space.
///
/// The N + 1 noise levels interpolate between sigma~(t_eps) and sigma~(t_max)
/// uniformly in sigma~^(1/rho) and are emitted from the noisiest point down,
/// so the returned lambdas ascend. Endpoints are exact: times()[0] == t_max
/// and times()[N] == t_eps. No zero-noise terminal point is appended.
///
/// Throws std::invalid_argument for nfe < 2 or rho <= 0, std::domain_error
/// for times outside the model domain and InfeasibleSchedule when
/// t_eps >= t_max or consecutive lambdas end up closer than kMinLambdaGap.
Schedule generate_initial(const NoiseScheduleModel& model, const StrategyVector& psi, int nfe);

}  // namespace schedopt
