#include "schedopt/local_opt.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "schedopt/errors.hpp"

namespace schedopt {
namespace {

constexpr int kHistory = 8;
constexpr double kArmijo = 1e-4;
constexpr double kMaxRadius = 10.0;
constexpr double kMinRadius = 1e-14;
constexpr double kStationary = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct CurvaturePair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// Two-loop recursion: returns -H g for the limited-memory inverse Hessian.
std::vector<double> quasi_newton_direction(std::span<const double> g, const std::deque<CurvaturePair>& pairs) {
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(pairs.size());
  for (std::size_t k = pairs.size(); k-- > 0;) {
    alpha[k] = pairs[k].rho * dot(pairs[k].s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * pairs[k].y[i];
  }
  const CurvaturePair& last = pairs.back();
  const double scale = dot(last.s, last.y) / dot(last.y, last.y);
  for (double& v : q) v *= scale;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double beta = pairs[k].rho * dot(pairs[k].y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * pairs[k].s[i];
  }
  for (double& v : q) v = -v;
  return q;
}

// The objective in shifted coordinates y_i = lambda_i - i * gap, in which the
// gap constraints read y_0 <= y_1 <= ... <= y_N.
class ShiftedProblem {
 public:
  ShiftedProblem(const MepConfig& cfg, const LocalOptSettings& settings, std::span<const double> init)
      : cfg_(cfg), settings_(settings), n_(init.size()), lambdas_(n_), gradient_(n_) {
    const double gap = settings.min_lambda_gap;
    fixed_ = settings.endpoint_policy == EndpointPolicy::kFixed;
    first_ = init.front();
    last_ = init.back();
    lower_.resize(n_);
    upper_.resize(n_);
    const double shift_n = static_cast<double>(n_ - 1) * gap;

    double l0, u0, ln, un;
    if (fixed_) {
      l0 = u0 = first_;
      ln = un = last_ - shift_n;
    } else {
      const auto [start, end] = free_boxes();
      l0 = start.lo;
      u0 = start.hi;
      ln = end.lo - shift_n;
      un = end.hi - shift_n;
    }
    // Bounds implied by the chain keep both sequences non-decreasing.
    u0 = std::min(u0, un);
    ln = std::max(ln, l0);
    if (!(l0 <= u0 && ln <= un)) throw InfeasibleSchedule("endpoint boxes leave no feasible schedule");
    std::fill(lower_.begin(), lower_.end(), l0);
    std::fill(upper_.begin(), upper_.end(), un);
    upper_.front() = u0;
    lower_.back() = ln;
    free_mask_.assign(n_, 1.0);
    for (std::size_t i = 0; i < n_; ++i) {
      if (lower_[i] == upper_[i]) free_mask_[i] = 0.0;
    }
  }

  std::vector<double> to_shifted(std::span<const double> lambdas) const {
    std::vector<double> y(lambdas.begin(), lambdas.end());
    for (std::size_t i = 0; i < n_; ++i) y[i] -= static_cast<double>(i) * settings_.min_lambda_gap;
    return y;
  }

  std::span<const double> to_lambdas(std::span<const double> y) {
    for (std::size_t i = 0; i < n_; ++i) lambdas_[i] = y[i] + static_cast<double>(i) * settings_.min_lambda_gap;
    if (fixed_) {
      lambdas_.front() = first_;
      lambdas_.back() = last_;
    }
    return lambdas_;
  }

  void project(std::span<double> y) const { project_monotone(y, lower_, upper_); }

  /// Objective and masked gradient at y; +inf when the objective overflows.
  double evaluate(std::span<const double> y, std::vector<double>& masked_gradient) {
    const auto lambdas = to_lambdas(y);
    ++evaluations_;
    if (settings_.observer) settings_.observer(lambdas);
    double value;
    try {
      value = j_mep_with_gradient(cfg_, lambdas, gradient_);
    } catch (const NumericOverflow&) {
      return std::numeric_limits<double>::infinity();
    }
    masked_gradient.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) masked_gradient[i] = gradient_[i] * free_mask_[i];
    return value;
  }

  int evaluations() const { return evaluations_; }

 private:
  std::pair<LambdaInterval, LambdaInterval> free_boxes() const {
    const NoiseScheduleModel& model = cfg_.model;
    const LambdaInterval start = settings_.start_box.value_or(
        LambdaInterval{model.lambda_of_t(1.0), model.lambda_of_t(0.96)});
    const LambdaInterval end = settings_.end_box.value_or(
        LambdaInterval{model.lambda_of_t(0.03), model.lambda_of_t(std::max(0.01, model.t_floor()))});
    if (!(start.lo <= start.hi && end.lo <= end.hi)) throw std::invalid_argument("endpoint box is inverted");
    return {start, end};
  }

  const MepConfig& cfg_;
  const LocalOptSettings& settings_;
  std::size_t n_;
  bool fixed_ = true;
  double first_ = 0.0;
  double last_ = 0.0;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> free_mask_;
  std::vector<double> lambdas_;
  std::vector<double> gradient_;
  int evaluations_ = 0;
};

void validate(const LocalOptSettings& settings) {
  if (settings.max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(settings.min_lambda_gap > 0.0)) throw std::invalid_argument("min_lambda_gap must be positive");
  if (!(settings.convergence_tol >= 0.0)) throw std::invalid_argument("convergence_tol must be non-negative");
}

}  // namespace

void project_monotone(std::span<double> y, std::span<const double> lower, std::span<const double> upper) {
  // Pool adjacent violators with a box-constrained block optimum. With
  // non-decreasing bounds a block [i, j] is confined to [lower[j], upper[i]],
  // so its best common value is the clipped mean.
  struct Block {
    double sum;
    std::size_t count;
    double lo;
    double hi;
    double value() const { return std::clamp(sum / static_cast<double>(count), lo, hi); }
  };
  std::vector<Block> blocks;
  blocks.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    blocks.push_back({y[i], 1, lower[i], upper[i]});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].value() > blocks.back().value()) {
      Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum += top.sum;
      blocks.back().count += top.count;
      blocks.back().lo = top.lo;
    }
  }
  std::size_t i = 0;
  for (const Block& b : blocks) {
    const double v = b.value();
    for (std::size_t k = 0; k < b.count; ++k, ++i) y[i] = v;
  }
  // Guard against rounding in the pooled means.
  for (std::size_t k = 1; k < y.size(); ++k) y[k] = std::max(y[k], y[k - 1]);
}

RefineReport refine_with_report(const MepConfig& cfg, const Schedule& init, const LocalOptSettings& settings) {
  validate(settings);
  if (!gaps_feasible(init.lambdas(), settings.min_lambda_gap)) {
    throw InfeasibleSchedule("initial schedule violates the minimum log-SNR gap");
  }

  ShiftedProblem problem(cfg, settings, init.lambdas());
  std::vector<double> y = problem.to_shifted(init.lambdas());
  problem.project(y);

  std::vector<double> g;
  double value = problem.evaluate(y, g);
  const double initial_value = j_mep(cfg, init.lambdas());

  RefineReport report{init, initial_value, initial_value, 0, 0, false};
  if (!std::isfinite(value)) {
    report.evaluations = problem.evaluations();
    return report;
  }

  auto projected_gradient_norm = [&](std::span<const double> point, std::span<const double> grad) {
    std::vector<double> trial(point.begin(), point.end());
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= grad[i];
    problem.project(trial);
    double sq = 0.0;
    for (std::size_t i = 0; i < trial.size(); ++i) sq += (trial[i] - point[i]) * (trial[i] - point[i]);
    return std::sqrt(sq);
  };

  if (projected_gradient_norm(y, g) < kStationary) {
    report.converged = true;
    report.evaluations = problem.evaluations();
    return report;
  }

  std::deque<CurvaturePair> history;
  double radius = std::clamp(norm(g), 1e-4, 1.0);
  std::vector<double> trial(y.size());
  std::vector<double> step(y.size());
  std::vector<double> trial_g;
  int iteration = 0;
  bool converged = false;

  auto try_direction = [&](std::vector<double> direction) {
    const double len = norm(direction);
    if (len > radius) {
      for (double& v : direction) v *= radius / len;
    }
    for (std::size_t i = 0; i < y.size(); ++i) trial[i] = y[i] + direction[i];
    problem.project(trial);
    for (std::size_t i = 0; i < y.size(); ++i) step[i] = trial[i] - y[i];
    return dot(g, step);
  };

  for (; iteration < settings.max_iterations; ++iteration) {
    double slope = history.empty() ? 1.0 : try_direction(quasi_newton_direction(g, history));
    if (!(slope < 0.0)) {
      std::vector<double> steepest(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) steepest[i] = -g[i];
      slope = try_direction(std::move(steepest));
    }
    const double step_len = norm(step);
    if (!(slope < 0.0) || step_len == 0.0) {
      converged = true;
      break;
    }

    const double trial_value = problem.evaluate(trial, trial_g);
    if (std::isfinite(trial_value) && trial_value <= value + kArmijo * slope) {
      std::vector<double> dg(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) dg[i] = trial_g[i] - g[i];
      const double sy = dot(step, dg);
      if (sy > 1e-16 * step_len * norm(dg)) {
        history.push_back({step, std::move(dg), 1.0 / sy});
        if (history.size() > kHistory) history.pop_front();
      }
      const double decrease = (value - trial_value) / std::max(std::abs(value), 1e-300);
      if (step_len >= 0.9 * radius) radius = std::min(2.0 * radius, kMaxRadius);
      y = trial;
      value = trial_value;
      g = trial_g;
      if (decrease <= settings.convergence_tol && step_len <= std::sqrt(settings.convergence_tol)) {
        converged = true;
        ++iteration;
        break;
      }
      if (projected_gradient_norm(y, g) <= 1e-10 * std::max(1.0, std::abs(value))) {
        converged = true;
        ++iteration;
        break;
      }
    } else {
      radius = 0.25 * std::min(radius, step_len);
      if (radius < kMinRadius) {
        converged = true;
        break;
      }
    }
  }

  const auto lambdas = problem.to_lambdas(y);
  std::vector<double> out(lambdas.begin(), lambdas.end());
  std::vector<double> times(out.size());
  const bool fixed = settings.endpoint_policy == EndpointPolicy::kFixed;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const bool endpoint = i == 0 || i + 1 == out.size();
    times[i] = (fixed && endpoint) ? init.times()[i] : cfg.model.t_of_lambda(out[i]);
  }
  report.iterations = iteration;
  report.evaluations = problem.evaluations();
  report.converged = converged;
  if (value <= initial_value) {
    report.schedule = Schedule::from_pairs(std::move(out), std::move(times), GapCheck::kStrict,
                                           settings.min_lambda_gap);
    report.final_objective = value;
  }
  return report;
}

Schedule refine(const MepConfig& cfg, const Schedule& init, const LocalOptSettings& settings) {
  return refine_with_report(cfg, init, settings).schedule;
}

}  // namespace schedopt
