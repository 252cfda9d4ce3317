#include "schedopt/init_generator.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "schedopt/errors.hpp"

namespace schedopt {

Schedule generate_initial(const NoiseScheduleModel& model, const StrategyVector& psi, int nfe) {
  if (nfe < 2) throw std::invalid_argument("generate_initial requires nfe >= 2");
  if (!(psi.rho > 0.0) || !std::isfinite(psi.rho)) throw std::invalid_argument("rho must be positive");
  const double lam_start = model.lambda_of_t(psi.t_max);
  const double lam_end = model.lambda_of_t(psi.t_eps);
  if (!(psi.t_eps < psi.t_max)) throw InfeasibleSchedule("strategy requires t_eps < t_max");

  const double root_min = std::pow(std::exp(-lam_end), 1.0 / psi.rho);
  const double root_max = std::pow(std::exp(-lam_start), 1.0 / psi.rho);

  std::vector<double> lambdas(nfe + 1);
  std::vector<double> times(nfe + 1);
  lambdas.front() = lam_start;
  lambdas.back() = lam_end;
  times.front() = psi.t_max;
  times.back() = psi.t_eps;
  for (int i = 1; i < nfe; ++i) {
    // Sampling index i sits at fraction (N - i) / N of the sigma~ span.
    const double u = static_cast<double>(nfe - i) / nfe;
    const double noise = std::pow(root_min + u * (root_max - root_min), psi.rho);
    lambdas[i] = -std::log(noise);
  }
  if (!gaps_feasible(lambdas)) {
    throw InfeasibleSchedule("strategy collapses consecutive log-SNR values below the minimum gap");
  }
  for (int i = 1; i < nfe; ++i) times[i] = model.t_of_lambda(lambdas[i]);
  return Schedule::from_pairs(std::move(lambdas), std::move(times));
}

}  // namespace schedopt
