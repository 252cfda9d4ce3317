#include "schedopt/noise_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace schedopt {
namespace {

// log(1 + e^x) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// log-SNR from log(alpha^2) under alpha^2 + sigma^2 = 1.
double lambda_from_log_alpha_sq(double log_alpha_sq) {
  return 0.5 * (log_alpha_sq - std::log(-std::expm1(log_alpha_sq)));
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

// Monotone cubic Hermite interpolant of log(alpha_bar) on a uniform grid.
struct NoiseScheduleModel::Table {
  int steps = 0;
  double h = 0.0;
  std::vector<double> values;
  std::vector<double> slopes;

  double node_time(int k) const { return static_cast<double>(k + 1) / steps; }

  double operator()(double t) const {
    const int last = steps - 1;
    int k = static_cast<int>(std::floor((t - node_time(0)) * steps));
    k = std::clamp(k, 0, last - 1);
    const double s = (t - node_time(k)) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * values[k] + h10 * h * slopes[k] + h01 * values[k + 1] + h11 * h * slopes[k + 1];
  }
};

namespace {

// Fritsch-Carlson slopes with the shape-preserving three-point end rule.
std::vector<double> pchip_slopes(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) delta[k] = (y[k + 1] - y[k]) / h;

  std::vector<double> d(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] > 0.0) d[k] = 2.0 / (1.0 / delta[k - 1] + 1.0 / delta[k]);
  }
  auto end_slope = [](double d0, double d1) {
    double m = 0.5 * (3.0 * d0 - d1);
    if (std::signbit(m) != std::signbit(d0)) return 0.0;
    if (std::signbit(d0) != std::signbit(d1) && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  };
  if (n == 2) {
    d[0] = d[1] = delta[0];
  } else {
    d[0] = end_slope(delta[0], delta[1]);
    d[n - 1] = end_slope(delta[n - 2], delta[n - 3]);
  }
  return d;
}

}  // namespace

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kVpLinearBeta: return "vp-linear-beta";
    case ScheduleKind::kVpScaledLinearBeta: return "vp-scaled-linear-beta";
    case ScheduleKind::kVpCosine: return "vp-cosine";
    case ScheduleKind::kVeIdentity: return "ve-identity";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "vp-linear-beta" || name == "vp-linear") return ScheduleKind::kVpLinearBeta;
  if (name == "vp-scaled-linear-beta" || name == "vp-scaled-linear") {
    return ScheduleKind::kVpScaledLinearBeta;
  }
  if (name == "vp-cosine") return ScheduleKind::kVpCosine;
  if (name == "ve-identity" || name == "ve") return ScheduleKind::kVeIdentity;
  throw std::invalid_argument("unknown noise schedule kind '" + std::string(name) + "'");
}

NoiseScheduleModel NoiseScheduleModel::vp_linear(double beta_min, double beta_max, double t_floor) {
  require(beta_min >= 0.0 && beta_max > beta_min, "vp-linear-beta requires 0 <= beta_min < beta_max");
  require(t_floor > 0.0 && t_floor < 1.0, "t_floor must lie in (0, 1)");
  NoiseScheduleModel m(ScheduleKind::kVpLinearBeta, t_floor);
  m.p0_ = beta_min;
  m.p1_ = beta_max;
  return m;
}

NoiseScheduleModel NoiseScheduleModel::vp_scaled_linear(double beta_start, double beta_end,
                                                        int train_steps, double t_floor) {
  require(beta_start > 0.0 && beta_end > beta_start && beta_end < 1.0,
          "vp-scaled-linear-beta requires 0 < beta_start < beta_end < 1");
  require(train_steps >= 2, "train_steps must be at least 2");
  require(t_floor >= 1.0 / train_steps && t_floor < 1.0,
          "t_floor must lie in [1/train_steps, 1) for the discrete grid");

  auto table = std::make_shared<Table>();
  table->steps = train_steps;
  table->h = 1.0 / train_steps;
  table->values.resize(train_steps);
  const double lo = std::sqrt(beta_start);
  const double hi = std::sqrt(beta_end);
  double log_alpha_bar = 0.0;
  for (int k = 0; k < train_steps; ++k) {
    const double r = lo + (hi - lo) * static_cast<double>(k) / (train_steps - 1);
    log_alpha_bar += std::log1p(-r * r);
    table->values[k] = log_alpha_bar;
  }
  table->slopes = pchip_slopes(table->values, table->h);

  NoiseScheduleModel m(ScheduleKind::kVpScaledLinearBeta, t_floor);
  m.p0_ = beta_start;
  m.p1_ = beta_end;
  m.table_ = std::move(table);
  return m;
}

NoiseScheduleModel NoiseScheduleModel::vp_cosine(double offset, double t_end, double t_floor) {
  require(offset >= 0.0, "cosine offset must be non-negative");
  require(t_end > 0.0 && t_end < 1.0, "cosine t_end must lie in (0, 1)");
  require(t_floor > 0.0 && t_floor < 1.0, "t_floor must lie in (0, 1)");
  NoiseScheduleModel m(ScheduleKind::kVpCosine, t_floor);
  m.p0_ = offset;
  m.p1_ = t_end;
  return m;
}

NoiseScheduleModel NoiseScheduleModel::ve_identity(double t_floor) {
  require(t_floor > 0.0 && t_floor < 1.0, "t_floor must lie in (0, 1)");
  return NoiseScheduleModel(ScheduleKind::kVeIdentity, t_floor);
}

NoiseScheduleModel NoiseScheduleModel::from_parameters(std::string_view kind_name,
                                                 const std::map<std::string, double>& params) {
  const ScheduleKind kind = parse_schedule_kind(kind_name);
  std::map<std::string, double> rest = params;
  auto take = [&rest](const std::string& key, double fallback) {
    auto it = rest.find(key);
    if (it == rest.end()) return fallback;
    double v = it->second;
    rest.erase(it);
    return v;
  };
  const double t_floor = take("t-floor", kDefaultTimeFloor);
  NoiseScheduleModel model = [&] {
    switch (kind) {
      case ScheduleKind::kVpLinearBeta:
        return vp_linear(take("beta-min", kDefaultLinearBetaMin), take("beta-max", kDefaultLinearBetaMax),
                         t_floor);
      case ScheduleKind::kVpScaledLinearBeta: {
        const double steps = take("train-steps", kDefaultTrainSteps);
        require(steps == std::floor(steps), "train-steps must be an integer");
        return vp_scaled_linear(take("beta-start", kDefaultBetaStart), take("beta-end", kDefaultBetaEnd),
                                static_cast<int>(steps), t_floor);
      }
      case ScheduleKind::kVpCosine:
        return vp_cosine(take("cosine-offset", kDefaultCosineOffset),
                         take("cosine-t-end", kDefaultCosineTimeEnd), t_floor);
      case ScheduleKind::kVeIdentity:
        return ve_identity(t_floor);
    }
    throw std::invalid_argument("unreachable schedule kind");
  }();
  if (!rest.empty()) {
    throw std::invalid_argument("parameter '" + rest.begin()->first + "' does not apply to " +
                                std::string(to_string(kind)));
  }
  return model;
}

std::map<std::string, double> NoiseScheduleModel::parameters() const {
  std::map<std::string, double> out{{"t-floor", t_floor_}};
  switch (kind_) {
    case ScheduleKind::kVpLinearBeta:
      out["beta-min"] = p0_;
      out["beta-max"] = p1_;
      break;
    case ScheduleKind::kVpScaledLinearBeta:
      out["beta-start"] = p0_;
      out["beta-end"] = p1_;
      out["train-steps"] = table_->steps;
      break;
    case ScheduleKind::kVpCosine:
      out["cosine-offset"] = p0_;
      out["cosine-t-end"] = p1_;
      break;
    case ScheduleKind::kVeIdentity:
      break;
  }
  return out;
}

void NoiseScheduleModel::check_time(double t) const {
  if (!(t >= t_floor_ && t <= t_ceil())) {
    std::ostringstream msg;
    msg << "time " << t << " outside the model domain [" << t_floor_ << ", 1]";
    throw std::domain_error(msg.str());
  }
}

double NoiseScheduleModel::log_alpha_sq(double t) const {
  switch (kind_) {
    case ScheduleKind::kVpLinearBeta:
      return -(p0_ * t + 0.5 * (p1_ - p0_) * t * t);
    case ScheduleKind::kVpScaledLinearBeta:
      return (*table_)(t);
    case ScheduleKind::kVpCosine: {
      constexpr double half_pi = 0.5 * std::numbers::pi;
      const double num = std::cos(half_pi * (p1_ * t + p0_) / (1.0 + p0_));
      const double den = std::cos(half_pi * p0_ / (1.0 + p0_));
      return 2.0 * (std::log(num) - std::log(den));
    }
    case ScheduleKind::kVeIdentity:
      return 0.0;
  }
  return 0.0;
}

ScaleFactors NoiseScheduleModel::alpha_sigma(double t) const {
  check_time(t);
  if (kind_ == ScheduleKind::kVeIdentity) return {1.0, t};
  const double l = log_alpha_sq(t);
  return {std::exp(0.5 * l), std::sqrt(-std::expm1(l))};
}

double NoiseScheduleModel::lambda_of_t(double t) const {
  check_time(t);
  if (kind_ == ScheduleKind::kVeIdentity) return -std::log(t);
  return lambda_from_log_alpha_sq(log_alpha_sq(t));
}

double NoiseScheduleModel::noise_level(double t) const {
  return std::exp(-lambda_of_t(t));
}

double NoiseScheduleModel::error_proxy(double t, int p) const {
  if (p < 0) throw std::invalid_argument("error proxy exponent p must be non-negative");
  const ScaleFactors s = alpha_sigma(t);
  return std::pow(s.sigma, p) / s.alpha;
}

std::pair<double, double> NoiseScheduleModel::lambda_range() const {
  return {lambda_of_t(t_ceil()), lambda_of_t(t_floor_)};
}

double NoiseScheduleModel::t_of_lambda(double lambda) const {
  const auto [lam_top, lam_bottom] = lambda_range();
  // Tolerate round-off at the range ends.
  constexpr double kSlack = 1e-12;
  if (!(lambda >= lam_top - kSlack && lambda <= lam_bottom + kSlack)) {
    std::ostringstream msg;
    msg << "log-SNR " << lambda << " outside the attainable range [" << lam_top << ", " << lam_bottom << "]";
    throw std::out_of_range(msg.str());
  }
  if (lambda >= lam_bottom) return t_floor_;
  if (lambda <= lam_top) return t_ceil();

  // lambda is decreasing: lambda(lo) > target > lambda(hi).
  double lo = t_floor_;
  double hi = t_ceil();
  double lam_lo = lam_bottom;
  double lam_hi = lam_top;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double lam_mid = lambda_of_t(mid);
    if (lam_mid == lambda) return mid;
    if (lam_mid > lambda) {
      lo = mid;
      lam_lo = lam_mid;
    } else {
      hi = mid;
      lam_hi = lam_mid;
    }
  }
  return (lam_lo - lambda) <= (lambda - lam_hi) ? lo : hi;
}

ScaleFactors NoiseScheduleModel::alpha_sigma_at_lambda(double lambda) const {
  if (kind_ == ScheduleKind::kVeIdentity) return {1.0, std::exp(-lambda)};
  return {std::exp(-0.5 * softplus(-2.0 * lambda)), std::exp(-0.5 * softplus(2.0 * lambda))};
}

double NoiseScheduleModel::log_error_proxy_at_lambda(double lambda, int p) const {
  if (kind_ == ScheduleKind::kVeIdentity) return -p * lambda;
  const double log_alpha = -0.5 * softplus(-2.0 * lambda);
  const double log_sigma = -0.5 * softplus(2.0 * lambda);
  return p * log_sigma - log_alpha;
}

double NoiseScheduleModel::dlog_error_proxy_at_lambda(double lambda, int p) const {
  if (kind_ == ScheduleKind::kVeIdentity) return -static_cast<double>(p);
  const ScaleFactors s = alpha_sigma_at_lambda(lambda);
  return -p * s.alpha * s.alpha - s.sigma * s.sigma;
}

}  // namespace schedopt
