#include <gtest/gtest.h>

#include <atomic>

#include "schedopt/errors.hpp"
#include "schedopt/global_search.hpp"
#include "schedopt/init_generator.hpp"

using namespace schedopt;

namespace {

SearchSettings quick(std::uint64_t seed) {
  SearchSettings s;
  s.seed = seed;
  s.population_size = 8;
  s.max_generations = 6;
  return s;
}

}  // namespace

TEST(EvaluateCandidate, ComposesThePipeline) {
  MepConfig cfg;
  const StrategyVector psi{7.0, 0.02, 0.98};
  const auto r = evaluate_candidate(cfg, SpfSettings{}, LocalOptSettings{}, psi, 6);
  ASSERT_TRUE(r.schedule.has_value());
  const auto refined = refine(cfg, generate_initial(cfg.model, psi, 6));
  EXPECT_EQ(*r.schedule, refined);
  EXPECT_EQ(r.report.total, r.report.j_mep + 100.0 * r.report.penalty);
  EXPECT_EQ(r.report.j_mep, j_mep(cfg, refined));
}

TEST(EvaluateCandidate, InfeasibleGivesSentinel) {
  MepConfig cfg;
  const auto r = evaluate_candidate(cfg, SpfSettings{}, LocalOptSettings{}, {7.0, 0.5, 0.5}, 4);
  EXPECT_FALSE(r.schedule.has_value());
  EXPECT_EQ(r.report.total, kFitnessSentinel);
  const auto outside = evaluate_candidate(cfg, SpfSettings{}, LocalOptSettings{}, {7.0, 1e-5, 0.9}, 4);
  EXPECT_EQ(outside.report.total, kFitnessSentinel);
}

TEST(Optimize, DegenerateBoundsEvaluateOnce) {
  MepConfig cfg;
  SearchSettings s;
  s.bounds = {{7.0, 7.0}, {0.02, 0.02}, {0.98, 0.98}};
  const auto run = optimize(cfg, SpfSettings{}, LocalOptSettings{}, s, 2);
  EXPECT_EQ(run.evaluations, 1);
  EXPECT_EQ(run.generations, 1);
  EXPECT_EQ(run.psi_star, (StrategyVector{7.0, 0.02, 0.98}));
  const auto again = evaluate_candidate(cfg, SpfSettings{}, LocalOptSettings{}, run.psi_star, 2);
  EXPECT_EQ(run.schedule_star, *again.schedule);
  EXPECT_EQ(run.report.total, again.report.total);
}

TEST(Optimize, TraceNonIncreasingAndInBounds) {
  MepConfig cfg;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto run = optimize(cfg, SpfSettings{}, LocalOptSettings{}, quick(seed), 6);
    for (std::size_t i = 1; i < run.best_trace.size(); ++i) EXPECT_LE(run.best_trace[i], run.best_trace[i - 1]);
    EXPECT_TRUE(run.settings.bounds.contains(run.psi_star));
    EXPECT_EQ(run.best_trace.back(), run.report.total);
    EXPECT_EQ(static_cast<int>(run.best_trace.size()), run.generations);
    const auto again = evaluate_candidate(cfg, SpfSettings{}, LocalOptSettings{}, run.psi_star, 6);
    EXPECT_EQ(run.schedule_star, *again.schedule);
  }
}

TEST(Optimize, DeterministicAcrossThreadCounts) {
  MepConfig cfg;
  auto s = quick(9);
  s.threads = 1;
  const auto a = optimize(cfg, SpfSettings{}, LocalOptSettings{}, s, 5);
  s.threads = 4;
  const auto b = optimize(cfg, SpfSettings{}, LocalOptSettings{}, s, 5);
  EXPECT_EQ(a.psi_star, b.psi_star);
  EXPECT_EQ(a.best_trace, b.best_trace);
  EXPECT_EQ(a.schedule_star, b.schedule_star);
}

TEST(Optimize, StallWindowStopsEarly) {
  MepConfig cfg;
  SearchSettings s;
  s.seed = 4;
  s.max_generations = 200;
  s.stall_generations = 3;
  s.stall_tol = 1e9;
  const auto run = optimize(cfg, SpfSettings{}, LocalOptSettings{}, s, 4);
  EXPECT_EQ(run.generations, 4);
}

TEST(Optimize, AllInfeasibleThrows) {
  MepConfig cfg;
  SearchSettings s = quick(1);
  s.bounds.t_eps = {0.5, 0.6};
  s.bounds.t_max = {0.3, 0.4};
  EXPECT_THROW(optimize(cfg, SpfSettings{}, LocalOptSettings{}, s, 4), SearchFailure);
}

TEST(Optimize, RejectsBadSettings) {
  MepConfig cfg;
  SearchSettings s;
  s.population_size = 3;
  EXPECT_THROW(optimize(cfg, SpfSettings{}, LocalOptSettings{}, s, 4), std::invalid_argument);
  s = {};
  s.de_weight = 2.0;
  EXPECT_THROW(optimize(cfg, SpfSettings{}, LocalOptSettings{}, s, 4), std::invalid_argument);
  s = {};
  s.bounds.rho = {5.0, 4.0};
  EXPECT_THROW(optimize(cfg, SpfSettings{}, LocalOptSettings{}, s, 4), std::invalid_argument);
  EXPECT_THROW(optimize(cfg, SpfSettings{}, LocalOptSettings{}, SearchSettings{}, 1), std::invalid_argument);
}

TEST(Optimize, NfeChangesTheAnswer) {
  MepConfig cfg;
  SearchSettings s;
  s.seed = 42;
  const auto four = optimize(cfg, SpfSettings{}, LocalOptSettings{}, s, 4);
  const auto eight = optimize(cfg, SpfSettings{}, LocalOptSettings{}, s, 8);
  EXPECT_FALSE(four.psi_star == eight.psi_star);
  EXPECT_NE(four.schedule_star.nfe(), eight.schedule_star.nfe());
}
