#include <gtest/gtest.h>

#include <cmath>

#include "schedopt/errors.hpp"
#include "schedopt/init_generator.hpp"

using namespace schedopt;

namespace {

// Noise levels uniformly spaced in sigma~^(1/rho), noisiest first.
std::vector<double> power_law_levels(double lo, double hi, double rho, int n) {
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) {
    const double u = static_cast<double>(n - i) / n;
    out.push_back(std::pow(std::pow(lo, 1 / rho) + u * (std::pow(hi, 1 / rho) - std::pow(lo, 1 / rho)), rho));
  }
  return out;
}

}  // namespace

TEST(GenerateInitial, EndpointsAreExact) {
  const auto m = NoiseScheduleModel::vp_scaled_linear();
  const auto s = generate_initial(m, {7.0, 0.02, 0.98}, 6);
  EXPECT_EQ(s.nfe(), 6);
  EXPECT_EQ(s.times().front(), 0.98);
  EXPECT_EQ(s.times().back(), 0.02);
  EXPECT_EQ(s.lambdas().front(), m.lambda_of_t(0.98));
  EXPECT_EQ(s.lambdas().back(), m.lambda_of_t(0.02));
}

TEST(GenerateInitial, FollowsPowerLawOnVe) {
  const auto m = NoiseScheduleModel::ve_identity();
  const auto s = generate_initial(m, {3.0, 0.05, 0.9}, 5);
  const auto levels = power_law_levels(0.05, 0.9, 3.0, 5);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    EXPECT_NEAR(std::exp(-s.lambdas()[i]), levels[i], 1e-12 * levels[i]);
    EXPECT_NEAR(s.times()[i], levels[i], 1e-8);
  }
}

TEST(GenerateInitial, RhoOneIsUniformInNoiseLevel) {
  const auto m = NoiseScheduleModel::vp_cosine();
  const auto s = generate_initial(m, {1.0, 0.1, 0.9}, 4);
  std::vector<double> sig;
  for (double l : s.lambdas()) sig.push_back(std::exp(-l));
  for (std::size_t i = 0; i + 2 < sig.size(); ++i) {
    EXPECT_NEAR(sig[i] - sig[i + 1], sig[i + 1] - sig[i + 2], 1e-9 * sig[0]);
  }
}

TEST(GenerateInitial, RejectsBadInputs) {
  const auto m = NoiseScheduleModel::vp_scaled_linear();
  EXPECT_THROW(generate_initial(m, {7.0, 0.02, 0.98}, 1), std::invalid_argument);
  EXPECT_THROW(generate_initial(m, {0.0, 0.02, 0.98}, 4), std::invalid_argument);
  EXPECT_THROW(generate_initial(m, {7.0, 0.5, 0.5}, 4), InfeasibleSchedule);
  EXPECT_THROW(generate_initial(m, {7.0, 0.0001, 0.98}, 4), std::domain_error);
  EXPECT_THROW(generate_initial(m, {7.0, 0.5, 0.50001}, 400), InfeasibleSchedule);
}
