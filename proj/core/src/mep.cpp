#include "schedopt/mep.hpp"

#include <cmath>

namespace schedopt {

double j_mep(const MepConfig& cfg, std::span<const double> lambdas) {
  return detail::mep_sum(cfg.model, cfg.p, lambdas);
}

double j_mep(const MepConfig& cfg, const Schedule& schedule) {
  return j_mep(cfg, schedule.lambdas());
}

double j_mep_with_gradient(const MepConfig& cfg, std::span<const double> lambdas, std::span<double> gradient) {
  return detail::mep_sum_and_gradient(cfg.model, cfg.p, lambdas, gradient);
}

std::vector<double> j_mep_gradient(const MepConfig& cfg, const Schedule& schedule) {
  std::vector<double> gradient(schedule.lambdas().size());
  j_mep_with_gradient(cfg, schedule.lambdas(), gradient);
  return gradient;
}

double quadrature_reference(const ScalarFunction& f, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("quadrature_reference requires a < b");
  return integrate_adaptive([&f](double x) { return std::exp(x) * f(x); }, a, b, kQuadratureTolerance).value;
}

double hybrid_midpoint_residual(const ScalarFunction& f, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("hybrid_midpoint_residual requires a < b");
  const double f_mid = f(0.5 * (a + b));
  return integrate_adaptive([&f, f_mid](double x) { return std::exp(x) * (f(x) - f_mid); }, a, b,
                            kQuadratureTolerance)
      .value;
}

double standard_midpoint_residual(const ScalarFunction& f, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("standard_midpoint_residual requires a < b");
  const double mid = 0.5 * (a + b);
  return quadrature_reference(f, a, b) - (b - a) * std::exp(mid) * f(mid);
}

double mep_integral_reference(const MepConfig& cfg, std::span<const double> lambdas) {
  detail::check_mep_input(cfg.p, lambdas);
  const ScalarFunction proxy = [&cfg](double lam) {
    return std::exp(cfg.model.log_error_proxy_at_lambda(lam, cfg.p));
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
    if (lambdas[i + 1] > lambdas[i]) total += quadrature_reference(proxy, lambdas[i], lambdas[i + 1]);
  }
  return total;
}

}  // namespace schedopt
