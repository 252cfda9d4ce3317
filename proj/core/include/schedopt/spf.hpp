#pragma once

#include <span>

#include "schedopt/mep.hpp"
#include "schedopt/schedule.hpp"

namespace schedopt {

/// Finite fitness assigned to infeasible or overflowing candidates.
inline constexpr double kFitnessSentinel = 1e30;

struct DminAnchor {
  int nfe = 4;
  double gap = 0.15;
};

struct SpfSettings {
  double gamma = 100.0;
  DminAnchor anchor_low{4, 0.15};
  DminAnchor anchor_high{20, 0.01};
};

struct FitnessReport {
  double j_mep = 0.0;
  double penalty = 0.0;
  double gamma = 0.0;
  double total = kFitnessSentinel;
  /// Smallest consecutive time gap of the scored schedule.
  double min_gap_t = 0.0;
  double d_min_used = 0.0;
  /// The candidate produced a schedule at all.
  bool feasible = false;
  /// The objective was representable; false means `total` is the sentinel.
  bool finite = false;
};

/// Throws std::invalid_argument for negative gamma or anchors that do not
/// describe a decreasing line.
void validate(const SpfSettings& settings);

/// NFE-adaptive minimum time gap: linear between the anchors, clamped to the
/// anchor values outside them.
double d_min(const SpfSettings& settings, int nfe);

/// Sum over consecutive time pairs of max(0, d_min - |t_{i+1} - t_i|)^2.
double penalty(const SpfSettings& settings, std::span<const double> times, int nfe);
double penalty(const SpfSettings& settings, const Schedule& schedule, int nfe);

/// Smallest |t_{i+1} - t_i|.
double min_time_gap(std::span<const double> times);

/// Objective plus gamma times the spacing penalty. An overflowing objective
/// yields the sentinel total with `finite == false` rather than an exception.
FitnessReport spf(const MepConfig& cfg, const SpfSettings& settings, const Schedule& schedule, int nfe);

/// Report for a candidate that produced no schedule.
FitnessReport infeasible_report(const SpfSettings& settings, int nfe);

}  // namespace schedopt
