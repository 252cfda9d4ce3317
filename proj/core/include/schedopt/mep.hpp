#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <stdexcept>
#include <vector>

#include "schedopt/errors.hpp"
#include "schedopt/noise_schedule.hpp"
#include "schedopt/quadrature.hpp"
#include "schedopt/schedule.hpp"

namespace schedopt {

/// Default exponent of the error proxy sigma^p / alpha.
inline constexpr int kDefaultProxyExponent = 2;

/// Absolute tolerance of the reference quadrature.
inline constexpr double kQuadratureTolerance = 1e-12;

struct MepConfig {
  NoiseScheduleModel model = NoiseScheduleModel::vp_scaled_linear();
  int p = kDefaultProxyExponent;
};

/// Anything that can report log(error proxy) and its lambda-derivative.
template <class S>
concept ErrorProxySource = requires(const S& source, double lambda, int p) {
  { source.log_error_proxy_at_lambda(lambda, p) } -> std::convertible_to<double>;
  { source.dlog_error_proxy_at_lambda(lambda, p) } -> std::convertible_to<double>;
};

namespace detail {

inline void check_mep_input(int p, std::span<const double> lambdas) {
  if (p < 0) throw std::invalid_argument("error proxy exponent p must be non-negative");
  if (lambdas.size() < 2) throw std::invalid_argument("the objective needs at least two lambdas");
}

inline double checked_total(double total) {
  if (!std::isfinite(total)) throw NumericOverflow("midpoint error proxy overflowed");
  return total;
}

// Sum over intervals of eps~(mid) (e^{l_{i+1}} - e^{l_i}), evaluated in the
// factored form e^{l_i + log eps~(mid)} * expm1(h). One proxy call per interval.
template <ErrorProxySource S>
double mep_sum(const S& source, int p, std::span<const double> lambdas) {
  check_mep_input(p, lambdas);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
    const double lo = lambdas[i];
    const double hi = lambdas[i + 1];
    const double mid = 0.5 * (lo + hi);
    const double weight = std::exp(lo + source.log_error_proxy_at_lambda(mid, p));
    total += weight * std::expm1(hi - lo);
  }
  return checked_total(total);
}

template <ErrorProxySource S>
double mep_sum_and_gradient(const S& source, int p, std::span<const double> lambdas,
                            std::span<double> gradient) {
  check_mep_input(p, lambdas);
  if (gradient.size() != lambdas.size()) throw std::invalid_argument("gradient span has the wrong length");
  std::fill(gradient.begin(), gradient.end(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
    const double lo = lambdas[i];
    const double hi = lambdas[i + 1];
    const double mid = 0.5 * (lo + hi);
    const double weight = std::exp(lo + source.log_error_proxy_at_lambda(mid, p));
    const double term = weight * std::expm1(hi - lo);
    const double half_slope = 0.5 * source.dlog_error_proxy_at_lambda(mid, p) * term;
    total += term;
    gradient[i] += half_slope - weight;
    gradient[i + 1] += half_slope + weight * std::exp(hi - lo);
  }
  for (double g : gradient) checked_total(g);
  return checked_total(total);
}

}  // namespace detail

/// Midpoint error proxy of an ascending lambda sequence. Tied neighbours
/// contribute exactly zero. Throws NumericOverflow if the sum is not finite.
double j_mep(const MepConfig& cfg, std::span<const double> lambdas);
double j_mep(const MepConfig& cfg, const Schedule& schedule);

/// Objective and its analytic gradient with respect to every lambda.
double j_mep_with_gradient(const MepConfig& cfg, std::span<const double> lambdas, std::span<double> gradient);
std::vector<double> j_mep_gradient(const MepConfig& cfg, const Schedule& schedule);

/// Integral of e^lambda f(lambda) over [a, b] by adaptive quadrature with
/// absolute tolerance kQuadratureTolerance.
double quadrature_reference(const ScalarFunction& f, double a, double b);

/// Exact integral minus the hybrid midpoint rule f(mid) (e^b - e^a).
///
/// Integrates e^lambda (f(lambda) - f(mid)) directly, so adding a constant to
/// f leaves the result unchanged up to the rounding of f itself.
double hybrid_midpoint_residual(const ScalarFunction& f, double a, double b);

/// Exact integral minus the classic midpoint rule (b - a) e^mid f(mid).
double standard_midpoint_residual(const ScalarFunction& f, double a, double b);

/// Sum over intervals of the quadrature integral of e^lambda eps~(lambda):
/// the quantity the objective approximates interval by interval.
double mep_integral_reference(const MepConfig& cfg, std::span<const double> lambdas);

}  // namespace schedopt
