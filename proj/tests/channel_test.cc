// Copyright 2026 The privgof Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privgof/channel.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "privgof/dyadic.h"
#include "test_util.h"

namespace privgof {
namespace {

using ::absl::StatusCode;

TEST(LaplaceScaleForTest, Examples) {
  EXPECT_NEAR(*LaplaceScaleFor(0.5, 8), 16.0, 1e-12);
  EXPECT_NEAR(*LaplaceScaleFor(1.0, 1), 2.8284271247461901, 1e-15);
  EXPECT_NEAR(*LaplaceScaleFor(1.0, 4, 7), 39.59797974644666, 1e-12);
}

TEST(LaplaceScaleForTest, RejectsBadInputs) {
  EXPECT_STATUS_CODE(LaplaceScaleFor(0.0, 4), StatusCode::kInvalidArgument);
  EXPECT_STATUS_CODE(LaplaceScaleFor(-1.0, 4), StatusCode::kInvalidArgument);
  EXPECT_STATUS_CODE(LaplaceScaleFor(1.0, 0), StatusCode::kInvalidArgument);
}

TEST(MultiLevelTest, LevelSetSize) {
  for (int64_t n : {1, 2, 3, 10, 100, 1000, 4096, 100000}) {
    const int expected = static_cast<int>(std::floor(2.0 * std::log2(n) + 1e-12));
    EXPECT_EQ(MaxAdaptiveLevel(n), expected) << n;
    if (expected > 30) {
      EXPECT_STATUS_CODE(ChannelSpec::MultiLevel(1.0, n),
                         StatusCode::kInvalidArgument);
      continue;
    }
    ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::MultiLevel(1.0, n));
    EXPECT_EQ(spec.level_count(), 1 + expected);
  }
  ASSERT_OK_AND_ASSIGN(ChannelSpec capped,
                       ChannelSpec::MultiLevel(1.0, 100000, 5));
  EXPECT_EQ(capped.level_count(), 6);
}

TEST(MultiLevelTest, InflatedScales) {
  ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::MultiLevel(0.7, 100));
  const double m = static_cast<double>(spec.level_count());
  EXPECT_EQ(spec.level_count(), 14);
  for (const auto& level : spec.levels) {
    EXPECT_EQ(level.resolution, int64_t{1} << level.exponent);
    const double single = *LaplaceScaleFor(0.7, level.resolution);
    EXPECT_NEAR(level.noise_scale, m * single, 1e-12 * m * single);
  }
  EXPECT_OK(spec.Validate());
  spec.levels[3].noise_scale *= 1.001;
  EXPECT_STATUS_CODE(spec.Validate(), StatusCode::kInvalidArgument);
}

TEST(MultiLevelTest, TruncatedSetUsesReleasedCount) {
  ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::MultiLevel(1.0, 1000, 6));
  EXPECT_EQ(spec.level_count(), 7);
  EXPECT_EQ(spec.total_dimension(), 127);
  EXPECT_NEAR(spec.levels[2].noise_scale, 39.59797974644666, 1e-12);
}

TEST(PrivatizeTest, ZeroNoiseGivesIndicators) {
  ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::SingleLevel(1.0, 4));
  const std::vector<double> xs{0.1, 0.3, 0.99};
  ASSERT_OK_AND_ASSIGN(PrivatizedSample z, Privatize(xs, spec, ZeroNoise()));
  for (int64_t i = 0; i < 3; ++i) {
    const auto row = z.Row(0, i);
    for (int64_t k = 0; k < 4; ++k) {
      EXPECT_DOUBLE_EQ(row[k], *PhiEval(4, k, xs[i]));
    }
  }
}

TEST(PrivatizeTest, RejectsPointsOutsideUnitInterval) {
  ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::SingleLevel(1.0, 2));
  EXPECT_STATUS_CODE(Privatize(std::vector<double>{0.2, 1.0}, spec, 1),
                     StatusCode::kInvalidArgument);
  EXPECT_STATUS_CODE(Privatize(std::vector<double>{-0.1}, spec, 1),
                     StatusCode::kInvalidArgument);
}

TEST(PrivatizeTest, SeedDeterminesOutputBitForBit) {
  ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::SingleLevel(1.0, 2));
  ASSERT_OK_AND_ASSIGN(PrivatizedSample a, Privatize(std::vector<double>{0.1}, spec, 77));
  ASSERT_OK_AND_ASSIGN(PrivatizedSample b, Privatize(std::vector<double>{0.1}, spec, 77));
  ASSERT_OK_AND_ASSIGN(PrivatizedSample c, Privatize(std::vector<double>{0.1}, spec, 78));
  EXPECT_EQ(a.matrices, b.matrices);
  EXPECT_NE(a.matrices, c.matrices);
  EXPECT_EQ(a.seed, 77u);
}

TEST(PrivatizeTest, WorkerCountDoesNotChangeOutput) {
  ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::MultiLevel(2.0, 40));
  std::vector<double> xs(40);
  for (int i = 0; i < 40; ++i) xs[i] = (i * 0.6180339887) - std::floor(i * 0.6180339887);
  ASSERT_OK_AND_ASSIGN(PrivatizedSample one, Privatize(xs, spec, 5, 1));
  for (int workers : {2, 4, 8}) {
    ASSERT_OK_AND_ASSIGN(PrivatizedSample many, Privatize(xs, spec, 5, workers));
    EXPECT_EQ(one.matrices, many.matrices) << workers;
  }
}

TEST(PrivatizeTest, NoiseVarianceMatchesScale) {
  const int64_t L = 2;
  ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::SingleLevel(1.0, L));
  const int64_t n = 500000;  // 10^6 noise coordinates
  std::vector<double> xs(n, 0.1);
  ASSERT_OK_AND_ASSIGN(PrivatizedSample z, Privatize(xs, spec, 11));
  const double sqrt_l = std::sqrt(2.0);
  double sum_sq = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const auto row = z.Row(0, i);
    const double w0 = row[0] - sqrt_l;
    sum_sq += w0 * w0 + row[1] * row[1];
  }
  const double sigma = spec.levels[0].noise_scale;
  EXPECT_NEAR(sum_sq / (2.0 * n) / (sigma * sigma), 1.0, 0.01);
}

TEST(PrivatizeTest, CoordinatesAreUnbiasedForProjection) {
  const auto f = *PiecewiseConstantDensity::Create({0.4, 1.6, 1.2, 0.8});
  const int64_t L = 4;
  const int64_t n = 100000;
  const DensitySampler sampler(f);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> xs(n);
  for (double& x : xs) x = sampler.Sample(std::max(unit(rng), 1e-300));
  ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::SingleLevel(2.0, L));
  ASSERT_OK_AND_ASSIGN(PrivatizedSample z, Privatize(xs, spec, 12));
  const auto expected = *Project(f, L);
  const double sigma = spec.levels[0].noise_scale;
  for (int64_t k = 0; k < L; ++k) {
    double sum = 0.0;
    for (int64_t i = 0; i < n; ++i) sum += z.Row(0, i)[k];
    // Var <= sigma^2 + E[phi^2] = sigma^2 + L p_k.
    const double se = std::sqrt((sigma * sigma + 2.0) / n);
    EXPECT_NEAR(sum / n, expected.coeffs[k], 4.0 * se) << k;
  }
}

TEST(PrivatizeTest, NoiseIsUncorrelatedAcrossCoordinatesRowsAndLevels) {
  ASSERT_OK_AND_ASSIGN(ChannelSpec spec,
                       ChannelSpec::MultiLevelFromExponents(1.0, {1, 2}));
  const int64_t n = 50000;
  std::vector<double> xs(n, 0.3);
  ASSERT_OK_AND_ASSIGN(PrivatizedSample z, Privatize(xs, spec, 21));
  // Centered noise: subtract phi(x).
  auto noise = [&](int64_t level, int64_t i, int64_t k) {
    const int64_t L = spec.levels[level].resolution;
    const double phi = *PhiEval(L, k, 0.3);
    return (z.Row(level, i)[k] - phi) / spec.levels[level].noise_scale;
  };
  double within = 0.0, across_levels = 0.0, across_rows = 0.0;
  for (int64_t i = 0; i + 1 < n; ++i) {
    within += noise(0, i, 0) * noise(0, i, 1);
    across_levels += noise(0, i, 0) * noise(1, i, 0);
    across_rows += noise(1, i, 2) * noise(1, i + 1, 2);
  }
  const double tol = 4.0 / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(within / n, 0.0, tol);
  EXPECT_NEAR(across_levels / n, 0.0, tol);
  EXPECT_NEAR(across_rows / n, 0.0, tol);
}

TEST(LabelsToPointsTest, MapsToCellMidpoints) {
  ASSERT_OK_AND_ASSIGN(auto xs, LabelsToPoints(std::vector<int64_t>{0, 2, 3}, 4));
  EXPECT_EQ(xs, (std::vector<double>{0.125, 0.625, 0.875}));
  EXPECT_STATUS_CODE(LabelsToPoints(std::vector<int64_t>{4}, 4),
                     StatusCode::kInvalidArgument);
}

// Full product-density log ratio, summed over every coordinate.
double BruteForceLogRatio(const ChannelSpec& spec, double x, double x_prime,
                          const std::vector<double>& z) {
  double out = 0.0;
  int64_t offset = 0;
  for (const auto& level : spec.levels) {
    const double rate = std::sqrt(2.0) / level.noise_scale;
    for (int64_t k = 0; k < level.resolution; ++k) {
      const double phi = *PhiEval(level.resolution, k, x);
      const double phi_prime = *PhiEval(level.resolution, k, x_prime);
      out += rate * (std::abs(z[offset + k] - phi_prime) - std::abs(z[offset + k] - phi));
    }
    offset += level.resolution;
  }
  return out;
}

TEST(PrivacyRatioAuditTest, MatchesBruteForceAndStaysBelowAlpha) {
  ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::MultiLevel(1.3, 6));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = unit(rng), x_prime = unit(rng);
    ASSERT_OK_AND_ASSIGN(PrivatizedSample z,
                         Privatize(std::vector<double>{x}, spec, trial));
    std::vector<double> flat;
    for (int64_t level = 0; level < spec.level_count(); ++level) {
      const auto row = z.Row(level, 0);
      flat.insert(flat.end(), row.begin(), row.end());
    }
    ASSERT_OK_AND_ASSIGN(double ratio, PrivacyRatioAudit(spec, x, x_prime, flat));
    EXPECT_NEAR(ratio, BruteForceLogRatio(spec, x, x_prime, flat), 1e-9);
    EXPECT_LE(ratio, spec.alpha + 1e-9);
  }
}

TEST(PrivacyRatioAuditTest, SameInputGivesZero) {
  ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::SingleLevel(1.0, 4));
  EXPECT_EQ(*PrivacyRatioAudit(spec, 0.3, 0.3, std::vector<double>{5, -1, 2, 0}), 0.0);
}

TEST(PrivacyRatioAuditTest, WorstCaseSaturatesAlphaForSingleLevel) {
  for (double alpha : {0.3, 1.0, 3.0}) {
    ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::SingleLevel(alpha, 4));
    // x in cell 0, x' in cell 1; z at phi(x) on both occupied coordinates.
    const std::vector<double> z{2.0, 0.0, 0.0, 0.0};
    EXPECT_NEAR(*PrivacyRatioAudit(spec, 0.1, 0.3, z), alpha, 1e-12);
  }
}

TEST(PrivacyRatioAuditTest, WorstCaseSumsToAlphaOverLevels) {
  ASSERT_OK_AND_ASSIGN(ChannelSpec spec, ChannelSpec::MultiLevel(2.0, 4));
  // x = 0.1 and x' = 0.9 are in different cells at every level except J=0.
  std::vector<double> z;
  for (const auto& level : spec.levels) {
    for (int64_t k = 0; k < level.resolution; ++k) {
      z.push_back(*PhiEval(level.resolution, k, 0.1));
    }
  }
  const double ratio = *PrivacyRatioAudit(spec, 0.1, 0.9, z);
  const double m = static_cast<double>(spec.level_count());
  EXPECT_NEAR(ratio, 2.0 * (m - 1.0) / m, 1e-12);
  EXPECT_LE(ratio, 2.0);
}

}  // namespace
}  // namespace privgof
