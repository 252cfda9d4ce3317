#include "schedopt/global_search.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "schedopt/errors.hpp"
#include "schedopt/init_generator.hpp"

namespace schedopt {

namespace {

constexpr int kDims = 3;
using Point = std::array<double, kDims>;

StrategyVector to_psi(const Point& x) { return {x[0], x[1], x[2]}; }

std::array<Interval, kDims> as_array(const SearchBounds& b) { return {b.rho, b.t_eps, b.t_max}; }

int worker_count(int requested, std::size_t jobs) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(n, 1);
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), jobs));
}

// Evaluates every point into the slot of the same index. Scheduling order
// varies with the thread count; the stored results do not.
std::vector<CandidateResult> evaluate_all(const MepConfig& mep_cfg, const SpfSettings& spf_settings,
                                          const LocalOptSettings& local, const std::vector<Point>& points, int nfe,
                                          int threads) {
  std::vector<std::optional<CandidateResult>> slots(points.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1)) {
      slots[i] = evaluate_candidate(mep_cfg, spf_settings, local, to_psi(points[i]), nfe);
    }
  };
  const int workers = worker_count(threads, points.size());
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  std::vector<CandidateResult> out;
  out.reserve(points.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

std::size_t argmin(const std::vector<CandidateResult>& results) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].report.total < results[best].report.total) best = i;
  }
  return best;
}

}  // namespace

void validate(const SearchSettings& s) {
  for (const Interval& iv : as_array(s.bounds)) {
    if (!(std::isfinite(iv.lo) && std::isfinite(iv.hi) && iv.lo <= iv.hi)) {
      throw std::invalid_argument("search bounds must be finite intervals with lo <= hi");
    }
  }
  if (s.population_size < 4) throw std::invalid_argument("population_size must be at least 4");
  if (s.max_generations < 1) throw std::invalid_argument("max_generations must be at least 1");
  if (!(s.de_weight > 0.0 && s.de_weight < 2.0)) throw std::invalid_argument("de_weight must lie in (0, 2)");
  if (!(s.de_crossover >= 0.0 && s.de_crossover <= 1.0)) {
    throw std::invalid_argument("de_crossover must lie in [0, 1]");
  }
  if (s.stall_generations < 1) throw std::invalid_argument("stall_generations must be at least 1");
  if (!(s.stall_tol >= 0.0)) throw std::invalid_argument("stall_tol must be non-negative");
  if (s.threads < 0) throw std::invalid_argument("threads must be non-negative");
}

CandidateResult evaluate_candidate(const MepConfig& mep_cfg, const SpfSettings& spf_settings,
                                   const LocalOptSettings& local, const StrategyVector& psi, int nfe) {
  try {
    Schedule init = generate_initial(mep_cfg.model, psi, nfe);
    Schedule refined = refine(mep_cfg, init, local);
    FitnessReport report = spf(mep_cfg, spf_settings, refined, nfe);
    return {std::move(refined), report};
  } catch (const InfeasibleSchedule&) {
  } catch (const NumericOverflow&) {
  } catch (const std::domain_error&) {
  } catch (const std::out_of_range&) {
  }
  return {std::nullopt, infeasible_report(spf_settings, nfe)};
}

OptimizationRun optimize(const MepConfig& mep_cfg, const SpfSettings& spf_settings, const LocalOptSettings& local,
                         const SearchSettings& search, int nfe) {
  validate(search);
  validate(spf_settings);
  if (nfe < 2) throw std::invalid_argument("nfe must be at least 2");
  const auto started = std::chrono::steady_clock::now();

  const std::array<Interval, kDims> box = as_array(search.bounds);
  const bool singleton = std::all_of(box.begin(), box.end(), [](const Interval& iv) { return iv.degenerate(); });

  std::mt19937_64 rng(search.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto clip = [&](Point& x) {
    for (int d = 0; d < kDims; ++d) x[d] = std::clamp(x[d], box[d].lo, box[d].hi);
  };

  const std::size_t pop = singleton ? 1 : static_cast<std::size_t>(search.population_size);
  std::vector<Point> population(pop);
  for (Point& x : population) {
    for (int d = 0; d < kDims; ++d) {
      const double u = unit(rng);
      x[d] = box[d].degenerate() ? box[d].lo : box[d].lo + u * (box[d].hi - box[d].lo);
    }
  }

  std::vector<CandidateResult> scores =
      evaluate_all(mep_cfg, spf_settings, local, population, nfe, search.threads);
  int evaluations = static_cast<int>(pop);

  std::size_t best = argmin(scores);
  Point best_point = population[best];
  CandidateResult best_result = scores[best];
  std::vector<double> trace{best_result.report.total};

  std::uniform_int_distribution<std::size_t> pick(0, pop - 1);
  std::uniform_int_distribution<int> pick_dim(0, kDims - 1);
  for (int gen = 1; !singleton && gen < search.max_generations; ++gen) {
    std::vector<Point> trials(pop);
    for (std::size_t i = 0; i < pop; ++i) {
      std::size_t r1, r2, r3;
      do r1 = pick(rng); while (r1 == i);
      do r2 = pick(rng); while (r2 == i || r2 == r1);
      do r3 = pick(rng); while (r3 == i || r3 == r1 || r3 == r2);
      const int forced = pick_dim(rng);
      Point trial = population[i];
      for (int d = 0; d < kDims; ++d) {
        const bool cross = unit(rng) < search.de_crossover || d == forced;
        if (cross) trial[d] = population[r1][d] + search.de_weight * (population[r2][d] - population[r3][d]);
      }
      clip(trial);
      trials[i] = trial;
    }

    std::vector<CandidateResult> trial_scores =
        evaluate_all(mep_cfg, spf_settings, local, trials, nfe, search.threads);
    evaluations += static_cast<int>(pop);
    for (std::size_t i = 0; i < pop; ++i) {
      if (trial_scores[i].report.total <= scores[i].report.total) {
        population[i] = trials[i];
        scores[i] = std::move(trial_scores[i]);
      }
    }

    const std::size_t gen_best = argmin(scores);
    if (scores[gen_best].report.total < best_result.report.total) {
      best_point = population[gen_best];
      best_result = scores[gen_best];
    }
    trace.push_back(best_result.report.total);

    const std::size_t n = trace.size();
    const auto window = static_cast<std::size_t>(search.stall_generations);
    if (n > window && trace[n - 1 - window] - trace[n - 1] < search.stall_tol) break;
  }

  if (!best_result.schedule) {
    throw SearchFailure("no strategy inside the search bounds produced a feasible schedule");
  }

  const int generations = static_cast<int>(trace.size());
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
  return OptimizationRun{
      .settings = search,
      .nfe = nfe,
      .best_trace = std::move(trace),
      .evaluations = evaluations,
      .generations = generations,
      .wall_seconds = elapsed.count(),
      .psi_star = to_psi(best_point),
      .schedule_star = std::move(*best_result.schedule),
      .report = best_result.report,
  };
}

}  // namespace schedopt
