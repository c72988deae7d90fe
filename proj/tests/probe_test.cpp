#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "synchrony_lab/error.hpp"
#include "synchrony_lab/probe.hpp"

namespace {

using namespace synchrony_lab::probe;

// Synthetic collapse times, coded without the library's velocity mapping.
std::vector<CollapseSample> generate(double beta0, std::size_t count, double noise,
                                     std::uint64_t seed, double delta_e = 1.0) {
  const CollapseModel model;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<CollapseSample> samples;
  for (std::size_t i = 0; i < count; ++i) {
    const double u = -0.8 + 1.6 * static_cast<double>(i) / static_cast<double>(count - 1);
    const double clean = oracle::gamma(oracle::velocity_subtract(u, beta0)) * model.hbar *
                         model.planck_energy / (delta_e * delta_e);
    const double t = noise > 0 ? clean * (1.0 + noise * gauss(rng)) : clean;
    samples.push_back(CollapseSample{delta_e, u, t, noise * clean});
  }
  return samples;
}

TEST(CollapseTime, RestFrameIsNonrelativisticFormula) {
  const CollapseModel model;
  EXPECT_EQ(collapse_time(model, 2.0, 0.0), model.hbar * model.planck_energy / 4.0);
}

TEST(CollapseTime, OneElectronVoltSpread) {
  // hbar = 6.582119569e-16 eV s, E_p = 1.22e28 eV, computed offline.
  EXPECT_NEAR(collapse_time(CollapseModel{}, 1.0, 0.0), 8.03018587418e12, 1e-12 * 8.03e12);
}

TEST(CollapseTime, MovingFrameIsDilatedByGamma) {
  const CollapseModel model;
  EXPECT_NEAR(collapse_time(model, 3.0, 0.6) / collapse_time(model, 3.0, 0.0), 1.25, 1e-14);
}

TEST(CollapseTime, RejectsNonPositiveSpread) {
  EXPECT_THROW(collapse_time(CollapseModel{}, 0.0, 0.1), synchrony_lab::DomainError);
  EXPECT_THROW(collapse_time(CollapseModel{}, -1.0, 0.1), synchrony_lab::DomainError);
  EXPECT_THROW(collapse_time(CollapseModel{0.0, 1.0}, 1.0, 0.1), synchrony_lab::InvalidArgument);
}

TEST(CollapseTime, StrictlyIncreasingInSpeed) {
  const CollapseModel model;
  double previous = collapse_time(model, 1.0, 0.0);
  for (double b = 0.01; b < 0.99; b += 0.01) {
    const double up = collapse_time(model, 1.0, b);
    EXPECT_GT(up, previous);
    EXPECT_EQ(up, collapse_time(model, 1.0, -b));
    previous = up;
  }
}

TEST(CollapseTime, ScalesAsInverseSquareOfSpread) {
  std::mt19937_64 rng(3);
  const CollapseModel model;
  for (int i = 0; i < 500; ++i) {
    const double e = oracle::uniform(rng, 1e-3, 1e3);
    const double b = oracle::uniform(rng, -0.99, 0.99);
    EXPECT_EQ(collapse_time(model, 2.0 * e, b), collapse_time(model, e, b) / 4.0);
  }
}

TEST(MakeGrid, IncludesEndpointsAndZero) {
  const auto grid = make_grid(-0.9, 0.9, 0.3);
  ASSERT_EQ(grid.size(), 7u);
  EXPECT_EQ(grid[3], 0.0);
  EXPECT_NEAR(grid.back(), 0.9, 1e-15);
  EXPECT_EQ(make_grid(0.1, 0.2, 0.5).size(), 1u);
  EXPECT_THROW(make_grid(0.0, 1.0, 0.0), synchrony_lab::InvalidArgument);
  EXPECT_THROW(make_grid(0.5, 0.1, 0.1), synchrony_lab::InvalidArgument);
}

TEST(Estimator, FindsRestFrameOnCoarseGrid) {
  const auto samples = generate(0.0, 50, 0.0, 1);
  const auto grid = make_grid(-0.9, 0.9, 0.05);
  const FitReport report = estimate_absolute_frame(samples, grid);
  EXPECT_LE(std::abs(report.beta_hat), 0.05);
  EXPECT_FALSE(report.weighted);
}

TEST(Estimator, RefinementLandsWithinHalfStep) {
  const auto samples = generate(0.3, 60, 0.0, 1);
  // Offset grid so the truth is not a grid point.
  const auto grid = make_grid(-0.885, 0.885, 0.05);
  const FitReport report = estimate_absolute_frame(samples, grid);
  EXPECT_LE(std::abs(report.beta_hat - 0.3), 0.025);
  EXPECT_TRUE(report.refined);
  EXPECT_NEAR(report.scale, CollapseModel{}.hbar * CollapseModel{}.planck_energy,
              1e-3 * report.scale);
}

TEST(Estimator, TrueFrameHasSmallestResidual) {
  for (double beta0 : {-0.5, 0.0, 0.3, 0.7}) {
    const auto samples = generate(beta0, 40, 0.0, 1, 2.5);
    const auto grid = make_grid(-0.9, 0.9, 0.1);
    const FitReport report = estimate_absolute_frame(samples, grid);
    std::size_t truth = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::abs(grid[i] - beta0) < 1e-9) truth = i;
    }
    for (const FitPoint& p : report.curve) {
      EXPECT_LE(report.curve[truth].residual, p.residual) << "beta0=" << beta0;
    }
  }
}

TEST(Estimator, PredictedCollapseTimeIsLocallyMinimal) {
  std::mt19937_64 rng(99);
  const double step = 0.01;
  const auto grid = make_grid(-0.9, 0.9, step);
  for (int trial = 0; trial < 20; ++trial) {
    const double beta0 = oracle::uniform(rng, -0.6, 0.6);
    const auto samples = generate(beta0, 100, 0.01, 1000 + trial);
    const FitReport report = estimate_absolute_frame(samples, grid);
    EXPECT_TRUE(report.weighted);
    const double at = report.predict(1.0, report.beta_hat);
    EXPECT_LE(at, report.predict(1.0, report.beta_hat + step));
    EXPECT_LE(at, report.predict(1.0, report.beta_hat - step));
  }
}

TEST(Estimator, NoisyRecoveryIsUsuallyWithinTolerance) {
  const auto grid = make_grid(-0.9, 0.9, 0.01);
  int hits = 0;
  constexpr int kTrials = 100;
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto samples = generate(0.3, 100, 0.01, 5000 + trial);
    hits += std::abs(estimate_absolute_frame(samples, grid).beta_hat - 0.3) <= 0.02;
  }
  EXPECT_GE(hits, 90);
}

TEST(Estimator, MixedSpreadsAreNormalized) {
  auto samples = generate(0.2, 30, 0.0, 1, 1.0);
  const auto more = generate(0.2, 30, 0.0, 1, 7.0);
  samples.insert(samples.end(), more.begin(), more.end());
  const FitReport report = estimate_absolute_frame(samples, make_grid(-0.9, 0.9, 0.01));
  EXPECT_NEAR(report.beta_hat, 0.2, 0.005);
}

TEST(Estimator, RejectsUnconstrainedSampleSets) {
  const std::vector<CollapseSample> one_velocity(5, CollapseSample{1.0, 0.2, 3.0, 0.0});
  const auto grid = make_grid(-0.5, 0.5, 0.1);
  EXPECT_THROW(estimate_absolute_frame(one_velocity, grid), synchrony_lab::IllConditioned);

  const std::vector<CollapseSample> two_velocities{
      {1.0, 0.1, 3.0, 0.0}, {1.0, 0.2, 3.1, 0.0}, {1.0, 0.2, 3.1, 0.0}};
  EXPECT_THROW(estimate_absolute_frame(two_velocities, grid), synchrony_lab::IllConditioned);
  EXPECT_THROW(estimate_absolute_frame({}, grid), synchrony_lab::IllConditioned);
}

TEST(Estimator, RejectsMalformedInput) {
  const auto samples = generate(0.0, 10, 0.0, 1);
  const std::vector<double> unsorted{0.1, 0.0, 0.2};
  EXPECT_THROW(estimate_absolute_frame(samples, unsorted), synchrony_lab::InvalidArgument);
  const std::vector<double> empty;
  EXPECT_THROW(estimate_absolute_frame(samples, empty), synchrony_lab::InvalidArgument);

  auto bad = samples;
  bad[2].t_c = -1.0;
  EXPECT_THROW(estimate_absolute_frame(bad, make_grid(-0.5, 0.5, 0.1)),
               synchrony_lab::InvalidArgument);
}

}  // namespace
