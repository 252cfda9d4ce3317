#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace schedopt {

enum class ScheduleKind {
  kVpLinearBeta,
  kVpScaledLinearBeta,
  kVpCosine,
  kVeIdentity,
};

std::string_view to_string(ScheduleKind kind);

/// Parses a kind name. Accepts the canonical names ("vp-scaled-linear-beta")
/// and the short forms without the "-beta" suffix. Throws std::invalid_argument.
ScheduleKind parse_schedule_kind(std::string_view name);

/// Signal and noise scales of the forward process at one point.
struct ScaleFactors {
  double alpha = 1.0;
  double sigma = 0.0;
};

/// Default parameters (see the factory functions for their meaning).
inline constexpr double kDefaultTimeFloor = 1e-3;
inline constexpr double kDefaultBetaStart = 0.00085;
inline constexpr double kDefaultBetaEnd = 0.012;
inline constexpr int kDefaultTrainSteps = 1000;
inline constexpr double kDefaultLinearBetaMin = 0.1;
inline constexpr double kDefaultLinearBetaMax = 20.0;
inline constexpr double kDefaultCosineOffset = 0.008;
inline constexpr double kDefaultCosineTimeEnd = 0.9946;

/// A diffusion noise schedule t -> (alpha_t, sigma_t) on the continuous time
/// domain [t_floor, 1]. Derived quantities: noise level sigma_t / alpha_t and
/// log-SNR lambda_t = log(alpha_t / sigma_t).
///
/// Instances are immutable and cheap to copy; the discrete-grid table of the
/// scaled-linear kind is shared between copies.
class NoiseScheduleModel {
 public:
  /// Continuous VP schedule with beta(t) = beta_min + t (beta_max - beta_min).
  static NoiseScheduleModel vp_linear(double beta_min = kDefaultLinearBetaMin,
                                      double beta_max = kDefaultLinearBetaMax,
                                      double t_floor = kDefaultTimeFloor);

  /// Discrete "scaled linear" betas, sqrt-linearly spaced over `train_steps`
  /// entries. Node k sits at t = (k + 1) / train_steps; log(alpha_bar) is
  /// lifted to continuous time with monotone cubic (PCHIP) interpolation.
  static NoiseScheduleModel vp_scaled_linear(double beta_start = kDefaultBetaStart,
                                             double beta_end = kDefaultBetaEnd,
                                             int train_steps = kDefaultTrainSteps,
                                             double t_floor = kDefaultTimeFloor);

  /// Cosine schedule alpha_bar = cos^2(pi/2 (c t + s) / (1 + s)) / cos^2(pi/2 s / (1 + s)),
  /// with c = `t_end` truncating the schedule before alpha reaches zero.
  static NoiseScheduleModel vp_cosine(double offset = kDefaultCosineOffset,
                                      double t_end = kDefaultCosineTimeEnd,
                                      double t_floor = kDefaultTimeFloor);

  /// Variance-exploding identity schedule: alpha = 1, sigma = t.
  static NoiseScheduleModel ve_identity(double t_floor = kDefaultTimeFloor);

  /// Builds a model from a kind name and a parameter map. Recognised keys:
  /// beta-start, beta-end, train-steps (scaled linear); beta-min, beta-max
  /// (linear); cosine-offset, cosine-t-end (cosine); t-floor (all kinds).
  /// Unknown keys are rejected with std::invalid_argument.
  static NoiseScheduleModel from_parameters(std::string_view kind,
                                      const std::map<std::string, double>& params = {});

  ScheduleKind kind() const { return kind_; }
  bool variance_preserving() const { return kind_ != ScheduleKind::kVeIdentity; }
  double t_floor() const { return t_floor_; }
  static constexpr double t_ceil() { return 1.0; }

  /// The parameter map that reproduces this model through from_parameters.
  std::map<std::string, double> parameters() const;

  ScaleFactors alpha_sigma(double t) const;
  double lambda_of_t(double t) const;
  /// sigma_t / alpha_t.
  double noise_level(double t) const;
  /// sigma_t^p / alpha_t.
  double error_proxy(double t, int p) const;

  /// Bisection inverse of lambda_of_t. Throws std::out_of_range outside
  /// [lambda(1), lambda(t_floor)].
  double t_of_lambda(double lambda) const;
  /// {lambda(1), lambda(t_floor)}.
  std::pair<double, double> lambda_range() const;

  // The family fixes alpha and sigma as functions of lambda alone
  // (VP: alpha^2 = sigmoid(2 lambda); VE: alpha = 1, sigma = e^-lambda), so
  // the objective never needs a time inversion.
  ScaleFactors alpha_sigma_at_lambda(double lambda) const;
  double log_error_proxy_at_lambda(double lambda, int p) const;
  /// d/d lambda of log_error_proxy_at_lambda.
  double dlog_error_proxy_at_lambda(double lambda, int p) const;

 private:
  struct Table;

  NoiseScheduleModel(ScheduleKind kind, double t_floor) : kind_(kind), t_floor_(t_floor) {}

  void check_time(double t) const;
  // log(alpha_t^2) for VP kinds.
  double log_alpha_sq(double t) const;

  ScheduleKind kind_;
  double t_floor_;
  double p0_ = 0.0;  // beta_min / beta_start / cosine offset
  double p1_ = 0.0;  // beta_max / beta_end / cosine t_end
  std::shared_ptr<const Table> table_;
};

}  // namespace schedopt
