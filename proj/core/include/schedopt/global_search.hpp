#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "schedopt/local_opt.hpp"
#include "schedopt/mep.hpp"
#include "schedopt/schedule.hpp"
#include "schedopt/spf.hpp"

namespace schedopt {

/// Closed interval; lo == hi pins the coordinate.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool degenerate() const { return lo == hi; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct SearchBounds {
  Interval rho{3.0, 16.0};
  Interval t_eps{0.01, 0.03};
  Interval t_max{0.96, 1.0};

  bool contains(const StrategyVector& psi) const {
    return rho.contains(psi.rho) && t_eps.contains(psi.t_eps) && t_max.contains(psi.t_max);
  }
  friend bool operator==(const SearchBounds&, const SearchBounds&) = default;
};

/// Differential evolution (rand/1/bin, clip-to-bounds) settings.
struct SearchSettings {
  SearchBounds bounds;
  int population_size = 24;
  int max_generations = 40;
  double de_weight = 0.7;
  double de_crossover = 0.9;
  /// Stop when the best fitness improved by less than stall_tol over this
  /// many generations.
  int stall_generations = 10;
  double stall_tol = 1e-8;
  std::uint64_t seed = 0;
  /// Worker threads for candidate evaluation; 0 picks the hardware count.
  /// Results do not depend on it.
  int threads = 0;
};

/// Throws std::invalid_argument on out-of-range settings.
void validate(const SearchSettings& settings);

struct CandidateResult {
  /// Empty when the strategy could not produce a feasible schedule.
  std::optional<Schedule> schedule;
  FitnessReport report;
};

/// generate_initial, then refine, then spf. Failures of any stage give the
/// sentinel fitness instead of an exception. `local.observer`, if set, may be
/// called from several threads at once during optimize().
CandidateResult evaluate_candidate(const MepConfig& mep_cfg, const SpfSettings& spf_settings,
                                   const LocalOptSettings& local, const StrategyVector& psi, int nfe);

struct OptimizationRun {
  SearchSettings settings;
  int nfe = 0;
  /// Best fitness so far after each generation (index 0 is the initial population).
  std::vector<double> best_trace;
  int evaluations = 0;
  int generations = 0;
  double wall_seconds = 0.0;
  StrategyVector psi_star;
  Schedule schedule_star;
  FitnessReport report;
};

/// Bi-level search for the strategy whose refined schedule has the lowest
/// spacing-penalised fitness. Deterministic for a fixed seed regardless of
/// the thread count. When every bound is a single point the lone strategy is
/// evaluated once. Throws SearchFailure if no evaluated strategy was
/// feasible and std::invalid_argument for bad settings or nfe < 2.
OptimizationRun optimize(const MepConfig& mep_cfg, const SpfSettings& spf_settings, const LocalOptSettings& local,
                         const SearchSettings& search, int nfe);

}  // namespace schedopt
