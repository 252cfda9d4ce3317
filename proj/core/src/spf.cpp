#include "schedopt/spf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace schedopt {

void validate(const SpfSettings& settings) {
  if (!(settings.gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  const DminAnchor& lo = settings.anchor_low;
  const DminAnchor& hi = settings.anchor_high;
  if (!(lo.nfe < hi.nfe && lo.gap >= hi.gap && hi.gap >= 0.0)) {
    throw std::invalid_argument("d_min anchors must describe a non-increasing line in nfe");
  }
}

double d_min(const SpfSettings& settings, int nfe) {
  const DminAnchor& lo = settings.anchor_low;
  const DminAnchor& hi = settings.anchor_high;
  if (nfe <= lo.nfe) return lo.gap;
  if (nfe >= hi.nfe) return hi.gap;
  const double u = static_cast<double>(nfe - lo.nfe) / static_cast<double>(hi.nfe - lo.nfe);
  return lo.gap + u * (hi.gap - lo.gap);
}

double penalty(const SpfSettings& settings, std::span<const double> times, int nfe) {
  const double limit = d_min(settings, nfe);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double shortfall = limit - std::abs(times[i + 1] - times[i]);
    if (shortfall > 0.0) total += shortfall * shortfall;
  }
  return total;
}

double penalty(const SpfSettings& settings, const Schedule& schedule, int nfe) {
  return penalty(settings, schedule.times(), nfe);
}

double min_time_gap(std::span<const double> times) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < times.size(); ++i) gap = std::min(gap, std::abs(times[i + 1] - times[i]));
  return gap;
}

FitnessReport infeasible_report(const SpfSettings& settings, int nfe) {
  FitnessReport report;
  report.gamma = settings.gamma;
  report.d_min_used = d_min(settings, nfe);
  report.total = kFitnessSentinel;
  return report;
}

FitnessReport spf(const MepConfig& cfg, const SpfSettings& settings, const Schedule& schedule, int nfe) {
  FitnessReport report;
  report.feasible = true;
  report.gamma = settings.gamma;
  report.d_min_used = d_min(settings, nfe);
  report.penalty = penalty(settings, schedule.times(), nfe);
  report.min_gap_t = min_time_gap(schedule.times());
  try {
    report.j_mep = j_mep(cfg, schedule.lambdas());
  } catch (const NumericOverflow&) {
    report.j_mep = std::numeric_limits<double>::infinity();
    report.total = kFitnessSentinel;
    return report;
  }
  const double total = report.j_mep + settings.gamma * report.penalty;
  report.finite = std::isfinite(total) && total < kFitnessSentinel;
  report.total = report.finite ? total : kFitnessSentinel;
  return report;
}

}  // namespace schedopt
