#include "schedopt/analytic_lab.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <stdexcept>

#include "schedopt/errors.hpp"
#include "schedopt/init_generator.hpp"

namespace schedopt {

namespace {

void check_data(const GaussianDataModel& data) {
  if (data.mean.empty()) throw std::invalid_argument("data mean must have at least one component");
  if (!(data.stdev >= 0.0) || !std::isfinite(data.stdev)) {
    throw std::invalid_argument("data stdev must be finite and non-negative");
  }
}

std::vector<double> uniform_lambdas(double lo, double hi, int steps) {
  std::vector<double> out(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i) out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / steps;
  out.back() = hi;
  return out;
}

// One pass of the ODE solver over an ascending lambda grid.
std::vector<double> integrate(const GaussianDataModel& data, const NoiseScheduleModel& model,
                              std::span<const double> lambdas, std::vector<double> x, StepRule rule) {
  const std::size_t dim = x.size();
  std::vector<double> probe(dim);
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
    const double lo = lambdas[i];
    const double hi = lambdas[i + 1];
    const ScaleFactors s_lo = model.alpha_sigma_at_lambda(lo);
    const ScaleFactors s_hi = model.alpha_sigma_at_lambda(hi);
    std::vector<double> f = denoise(data, x, s_lo.alpha, s_lo.sigma);
    if (rule == StepRule::kHybridMidpoint) {
      const double mid = 0.5 * (lo + hi);
      const ScaleFactors s_mid = model.alpha_sigma_at_lambda(mid);
      const double ratio = s_mid.sigma / s_lo.sigma;
      const double gain = s_mid.sigma * (std::exp(mid) - std::exp(lo));
      for (std::size_t d = 0; d < dim; ++d) probe[d] = ratio * x[d] + gain * f[d];
      f = denoise(data, probe, s_mid.alpha, s_mid.sigma);
    }
    const double ratio = s_hi.sigma / s_lo.sigma;
    const double gain = s_hi.sigma * (std::exp(hi) - std::exp(lo));
    for (std::size_t d = 0; d < dim; ++d) {
      x[d] = ratio * x[d] + gain * f[d];
      if (!std::isfinite(x[d])) throw NumericOverflow("trajectory state overflowed");
    }
  }
  return x;
}

}  // namespace

std::vector<double> denoise(const GaussianDataModel& data, const std::vector<double>& x, double alpha, double sigma) {
  const double s2 = data.stdev * data.stdev;
  const double shrink = alpha * s2 / (alpha * alpha * s2 + sigma * sigma);
  std::vector<double> out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = data.mean[d] + shrink * (x[d] - alpha * data.mean[d]);
  return out;
}

TrajectoryResult sample_trajectory(const GaussianDataModel& data, const NoiseScheduleModel& model,
                                   const Schedule& sched, std::uint64_t seed, StepRule rule) {
  check_data(data);
  const std::span<const double> lambdas = sched.lambdas();
  const ScaleFactors start = model.alpha_sigma_at_lambda(lambdas.front());
  const double spread =
      std::sqrt(start.alpha * start.alpha * data.stdev * data.stdev + start.sigma * start.sigma);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x0(data.dim());
  for (std::size_t d = 0; d < x0.size(); ++d) x0[d] = start.alpha * data.mean[d] + spread * normal(rng);

  TrajectoryResult result;
  result.endpoint = integrate(data, model, lambdas, x0, rule);
  const std::vector<double> dense = uniform_lambdas(lambdas.front(), lambdas.back(), kReferenceSteps);
  result.reference_endpoint = integrate(data, model, dense, x0, StepRule::kHybridMidpoint);
  double sq = 0.0;
  for (std::size_t d = 0; d < x0.size(); ++d) {
    const double diff = result.endpoint[d] - result.reference_endpoint[d];
    sq += diff * diff;
  }
  result.endpoint_error = std::sqrt(sq);
  return result;
}

std::vector<ErrorRow> compare_schedules(const GaussianDataModel& data, const NoiseScheduleModel& model,
                                        const std::vector<NamedSchedule>& schedules, int nfe, int n_seeds,
                                        std::uint64_t first_seed, StepRule rule) {
  if (schedules.empty()) throw std::invalid_argument("compare_schedules needs at least one schedule");
  if (n_seeds < 1) throw std::invalid_argument("n_seeds must be at least 1");
  for (const NamedSchedule& named : schedules) {
    if (named.schedule.nfe() != nfe) throw std::invalid_argument("schedule '" + named.name + "' has a different nfe");
  }
  std::vector<ErrorRow> rows;
  rows.reserve(schedules.size());
  for (const NamedSchedule& named : schedules) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int k = 0; k < n_seeds; ++k) {
      const double e =
          sample_trajectory(data, model, named.schedule, first_seed + static_cast<std::uint64_t>(k), rule)
              .endpoint_error;
      sum += e;
      sum_sq += e * e;
    }
    const double mean = sum / n_seeds;
    const double var = n_seeds > 1 ? std::max(0.0, (sum_sq - n_seeds * mean * mean) / (n_seeds - 1)) : 0.0;
    rows.push_back({named.name, mean, std::sqrt(var)});
  }
  return rows;
}

Schedule uniform_time_schedule(const NoiseScheduleModel& model, double t_max, double t_eps, int nfe) {
  if (nfe < 1) throw std::invalid_argument("nfe must be at least 1");
  std::vector<double> times(static_cast<std::size_t>(nfe) + 1);
  for (int i = 0; i <= nfe; ++i) times[static_cast<std::size_t>(i)] = t_max + (t_eps - t_max) * i / nfe;
  times.back() = t_eps;
  return Schedule::from_times(model, std::move(times));
}

Schedule uniform_lambda_schedule(const NoiseScheduleModel& model, double t_max, double t_eps, int nfe) {
  if (nfe < 1) throw std::invalid_argument("nfe must be at least 1");
  std::vector<double> lambdas = uniform_lambdas(model.lambda_of_t(t_max), model.lambda_of_t(t_eps), nfe);
  std::vector<double> times(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) times[i] = model.t_of_lambda(lambdas[i]);
  times.front() = t_max;
  times.back() = t_eps;
  return Schedule::from_pairs(std::move(lambdas), std::move(times));
}

Schedule edm_schedule(const NoiseScheduleModel& model, double t_max, double t_eps, int nfe, double rho) {
  return generate_initial(model, StrategyVector{rho, t_eps, t_max}, nfe);
}

}  // namespace schedopt
