#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "schedopt/init_generator.hpp"
#include "schedopt/spf.hpp"

using namespace schedopt;

TEST(Dmin, AnchorsAndLine) {
  const SpfSettings s;
  EXPECT_EQ(d_min(s, 4), 0.15);
  EXPECT_EQ(d_min(s, 20), 0.01);
  EXPECT_NEAR(d_min(s, 12), 0.08, 1e-15);
  EXPECT_EQ(d_min(s, 2), 0.15);
  EXPECT_EQ(d_min(s, 100), 0.01);
  for (int n = 4; n < 20; ++n) EXPECT_GT(d_min(s, n), d_min(s, n + 1));
}

TEST(Penalty, HandValues) {
  const SpfSettings s;
  const std::vector<double> spread{0.959, 0.716, 0.370, 0.030};
  const std::vector<double> collapsed{0.999, 0.070, 0.009, 0.009};
  EXPECT_EQ(penalty(s, spread, 4), 0.0);
  EXPECT_NEAR(penalty(s, collapsed, 4), 0.030421, 1e-12);
  const std::vector<double> exact{0.6, 0.45, 0.3, 0.15};
  EXPECT_NEAR(penalty(s, exact, 4), 0.0, 1e-30);
}

TEST(Penalty, MergingNeverDecreases) {
  const SpfSettings s;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> t(6);
    for (double& v : t) v = u(rng);
    std::sort(t.rbegin(), t.rend());
    const double before = penalty(s, t, 5);
    const std::size_t i = trial % 5;
    auto pinched = t;
    pinched[i + 1] = pinched[i];
    for (std::size_t k = i + 2; k < pinched.size(); ++k) pinched[k] = pinched[k - 1] - (t[k - 1] - t[k]);
    EXPECT_GE(penalty(s, pinched, 5), before - 1e-15);
  }
}

TEST(Penalty, DirectionalDerivativeAwayFromKink) {
  const SpfSettings s;
  const std::vector<double> t{0.9, 0.8, 0.5, 0.45};
  const double h = 1e-7;
  auto up = t;
  auto dn = t;
  up[2] += h;
  dn[2] -= h;
  // d/dt2 of (0.15 - (0.8 - t2))^2 + (0.15 - (t2 - 0.45))^2
  const double expect = 2 * (0.15 - 0.3) * 0 + 2 * (0.15 - 0.05) * -1;
  EXPECT_NEAR((penalty(s, up, 4) - penalty(s, dn, 4)) / (2 * h), expect, 1e-6);
}

TEST(Spf, TotalComposition) {
  MepConfig cfg;
  SpfSettings s;
  const auto m = cfg.model;
  const auto collapsed = Schedule::from_times(m, {0.999, 0.070, 0.009, 0.009}, GapCheck::kNonDecreasing);
  const auto r = spf(cfg, s, collapsed, 4);
  EXPECT_NEAR(r.penalty, 0.030421, 1e-12);
  EXPECT_DOUBLE_EQ(r.total, r.j_mep + 100.0 * r.penalty);
  EXPECT_TRUE(r.finite);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.min_gap_t, 0.0);
  EXPECT_EQ(r.d_min_used, 0.15);
  s.gamma = 0.0;
  EXPECT_EQ(spf(cfg, s, collapsed, 4).total, r.j_mep);

  const auto spread = Schedule::from_times(m, {0.959, 0.716, 0.370, 0.030});
  const auto clean = spf(cfg, SpfSettings{}, spread, 4);
  EXPECT_EQ(clean.penalty, 0.0);
  EXPECT_EQ(clean.total, clean.j_mep);
}

TEST(Spf, InfeasibleReportIsSentinel) {
  const auto r = infeasible_report(SpfSettings{}, 6);
  EXPECT_EQ(r.total, kFitnessSentinel);
  EXPECT_FALSE(r.feasible);
  EXPECT_FALSE(r.finite);
  EXPECT_LT(kFitnessSentinel, std::numeric_limits<double>::infinity());
}

TEST(Spf, Validation) {
  SpfSettings s;
  s.gamma = -1.0;
  EXPECT_THROW(validate(s), std::invalid_argument);
  s = {};
  s.anchor_high = {4, 0.01};
  EXPECT_THROW(validate(s), std::invalid_argument);
  EXPECT_NO_THROW(validate(SpfSettings{}));
}
