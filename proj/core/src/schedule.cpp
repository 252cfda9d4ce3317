#include "schedopt/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "schedopt/errors.hpp"

namespace schedopt {

bool gaps_feasible(std::span<const double> lambdas, double min_gap) {
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
    if (!(lambdas[i + 1] - lambdas[i] >= min_gap - kGapSlack)) return false;
  }
  return true;
}

void Schedule::validate(std::span<const double> lambdas, std::span<const double> times, GapCheck check,
                        double min_gap) {
  if (lambdas.size() < 2) throw InfeasibleSchedule("a schedule needs at least two points");
  if (lambdas.size() != times.size()) throw InfeasibleSchedule("lambda and time sequences differ in length");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!std::isfinite(lambdas[i]) || !std::isfinite(times[i])) {
      throw InfeasibleSchedule("schedule contains a non-finite value");
    }
  }
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
    const double gap = lambdas[i + 1] - lambdas[i];
    const bool ok = check == GapCheck::kStrict ? gap >= min_gap - kGapSlack : gap >= 0.0;
    if (!ok) {
      std::ostringstream msg;
      msg << "log-SNR gap " << gap << " between points " << i << " and " << i + 1
          << (check == GapCheck::kStrict ? " is below the minimum " : " is negative");
      if (check == GapCheck::kStrict) msg << min_gap;
      throw InfeasibleSchedule(msg.str());
    }
    if (times[i + 1] > times[i]) throw InfeasibleSchedule("schedule times must not increase");
  }
}

Schedule Schedule::from_lambdas(const NoiseScheduleModel& model, std::vector<double> lambdas, GapCheck check,
                                double min_gap) {
  std::vector<double> times;
  times.reserve(lambdas.size());
  for (double lam : lambdas) times.push_back(model.t_of_lambda(lam));
  validate(lambdas, times, check, min_gap);
  return Schedule(std::move(lambdas), std::move(times));
}

Schedule Schedule::from_times(const NoiseScheduleModel& model, std::vector<double> times, GapCheck check,
                              double min_gap) {
  std::vector<double> lambdas;
  lambdas.reserve(times.size());
  for (double t : times) lambdas.push_back(model.lambda_of_t(t));
  validate(lambdas, times, check, min_gap);
  return Schedule(std::move(lambdas), std::move(times));
}

Schedule Schedule::from_pairs(std::vector<double> lambdas, std::vector<double> times, GapCheck check,
                              double min_gap) {
  validate(lambdas, times, check, min_gap);
  return Schedule(std::move(lambdas), std::move(times));
}

double Schedule::min_lambda_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < lambdas_.size(); ++i) gap = std::min(gap, lambdas_[i + 1] - lambdas_[i]);
  return gap;
}

}  // namespace schedopt
