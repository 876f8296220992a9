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

#include "privgof/dyadic.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace privgof {
namespace {

using ::absl::StatusCode;

// Midpoint-rule integral of (f - g)^2 on a grid much finer than either
// function; exact for piecewise-constant inputs whose breakpoints lie on it.
double FineGridSqDistance(const PiecewiseConstantFunction& f,
                          const PiecewiseConstantFunction& g) {
  const int64_t grid = 1 << 14;
  double sum = 0.0;
  for (int64_t i = 0; i < grid; ++i) {
    const double x = (i + 0.5) / grid;
    const double diff = f.values()[CellIndex(f.cell_count(), x)] -
                        g.values()[CellIndex(g.cell_count(), x)];
    sum += diff * diff;
  }
  return sum / grid;
}

ProbabilityVector RandomProbabilities(std::mt19937_64& rng, int64_t d) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::vector<double> w(d);
  double total = 0.0;
  for (double& v : w) {
    v = gamma(rng);
    total += v;
  }
  for (double& v : w) v /= total;
  return *ProbabilityVector::Create(w);
}

TEST(PhiEvalTest, Examples) {
  EXPECT_DOUBLE_EQ(*PhiEval(4, 1, 0.3), 2.0);
  EXPECT_DOUBLE_EQ(*PhiEval(1, 0, 0.7), 1.0);
  EXPECT_DOUBLE_EQ(*PhiEval(4, 1, 0.6), 0.0);
}

TEST(PhiEvalTest, RejectsOutOfRange) {
  EXPECT_STATUS_CODE(PhiEval(4, 4, 0.3), StatusCode::kInvalidArgument);
  EXPECT_STATUS_CODE(PhiEval(4, -1, 0.3), StatusCode::kInvalidArgument);
  EXPECT_STATUS_CODE(PhiEval(4, 0, 1.0), StatusCode::kInvalidArgument);
  EXPECT_STATUS_CODE(PhiEval(4, 0, -0.1), StatusCode::kInvalidArgument);
}

TEST(PsiEvalTest, Examples) {
  EXPECT_NEAR(*PsiEval(2, 0, 0.1), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(*PsiEval(2, 0, 0.4), -std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(*PsiEval(2, 1, 0.1), 0.0);
  EXPECT_STATUS_CODE(PsiEval(2, 2, 0.1), StatusCode::kInvalidArgument);
}

TEST(PhiEvalTest, DisjointSupportsAndSquares) {
  for (int64_t L : {1, 2, 8, 16}) {
    for (int64_t i = 0; i < 10 * L; ++i) {
      const double x = (i + 0.5) / (10.0 * L);
      for (int64_t k = 0; k < L; ++k) {
        const double a = *PhiEval(L, k, x);
        EXPECT_DOUBLE_EQ(a * a, std::sqrt(static_cast<double>(L)) * a);
        for (int64_t k2 = k + 1; k2 < L; ++k2) {
          EXPECT_EQ(a * *PhiEval(L, k2, x), 0.0);
        }
      }
    }
  }
}

TEST(DensityTest, Invariants) {
  EXPECT_OK(PiecewiseConstantDensity::Create({1.5, 0.5}));
  EXPECT_STATUS_CODE(PiecewiseConstantDensity::Create({1.5, 0.6}),
                     StatusCode::kInvalidArgument);
  EXPECT_STATUS_CODE(PiecewiseConstantDensity::Create({2.5, -0.5}),
                     StatusCode::kInvalidArgument);
  EXPECT_STATUS_CODE(PiecewiseConstantDensity::Create({}),
                     StatusCode::kInvalidArgument);
  EXPECT_OK(ProbabilityVector::Create({0.25, 0.75}));
  EXPECT_STATUS_CODE(ProbabilityVector::Create({0.25, 0.7}),
                     StatusCode::kInvalidArgument);
}

TEST(EmbedMultinomialTest, Examples) {
  EXPECT_EQ(EmbedMultinomial(*ProbabilityVector::Create({0.5, 0.5})).values(),
            (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(EmbedMultinomial(*ProbabilityVector::Create({1.0, 0.0})).values(),
            (std::vector<double>{2.0, 0.0}));
  EXPECT_EQ(EmbedMultinomial(ProbabilityVector::Uniform(4)).values(),
            (std::vector<double>{1.0, 1.0, 1.0, 1.0}));
}

TEST(EmbedMultinomialTest, RoundTrip) {
  std::mt19937_64 rng(1);
  for (int64_t d : {2, 3, 5, 16}) {
    const ProbabilityVector p = RandomProbabilities(rng, d);
    ASSERT_OK_AND_ASSIGN(ProbabilityVector back,
                         ExtractMultinomial(EmbedMultinomial(p)));
    for (int64_t k = 0; k < d; ++k) EXPECT_NEAR(back[k], p[k], 1e-15);
  }
}

TEST(ProjectTest, Examples) {
  for (int64_t L : {1, 2, 4, 32}) {
    ASSERT_OK_AND_ASSIGN(CoefficientVector c,
                         Project(PiecewiseConstantDensity::Uniform(1), L));
    for (double v : c.coeffs) EXPECT_NEAR(v, 1.0 / std::sqrt(L), 1e-15);
  }
  ASSERT_OK_AND_ASSIGN(
      CoefficientVector spike,
      Project(EmbedMultinomial(*ProbabilityVector::Create({1.0, 0.0})), 2));
  EXPECT_NEAR(spike.coeffs[0], std::sqrt(2.0), 1e-15);
  EXPECT_EQ(spike.coeffs[1], 0.0);
  ASSERT_OK_AND_ASSIGN(
      CoefficientVector total,
      Project(*PiecewiseConstantDensity::Create({1.5, 0.5}), 1));
  EXPECT_DOUBLE_EQ(total.coeffs[0], 1.0);
}

TEST(ProjectTest, IncompatibleResolutions) {
  EXPECT_STATUS_CODE(Project(PiecewiseConstantDensity::Uniform(3), 2),
                     StatusCode::kFailedPrecondition);
  EXPECT_STATUS_CODE(Project(PiecewiseConstantDensity::Uniform(4), 0),
                     StatusCode::kInvalidArgument);
}

TEST(ProjectTest, LinearAndTelescoping) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = EmbedMultinomial(RandomProbabilities(rng, 32));
    const auto g = EmbedMultinomial(RandomProbabilities(rng, 32));
    std::vector<double> mix(32);
    for (int k = 0; k < 32; ++k) mix[k] = 0.3 * f.values()[k] + 0.7 * g.values()[k];
    ASSERT_OK_AND_ASSIGN(auto h, PiecewiseConstantDensity::Create(mix));
    for (int64_t L : {1, 2, 4, 8, 16}) {
      const auto pf = *Project(f, L);
      const auto pg = *Project(g, L);
      const auto ph = *Project(h, L);
      const auto fine = *Project(f, 2 * L);
      for (int64_t k = 0; k < L; ++k) {
        EXPECT_NEAR(ph.coeffs[k], 0.3 * pf.coeffs[k] + 0.7 * pg.coeffs[k], 1e-13);
        // phi_{L,k} = (phi_{2L,2k} + phi_{2L,2k+1}) / sqrt(2).
        EXPECT_NEAR(pf.coeffs[k],
                    (fine.coeffs[2 * k] + fine.coeffs[2 * k + 1]) / std::sqrt(2.0),
                    1e-13);
      }
    }
  }
}

TEST(ProjectionSqDistanceTest, Examples) {
  const auto f = *PiecewiseConstantDensity::Create({1.5, 0.5, 1.0, 1.0});
  EXPECT_EQ(*ProjectionSqDistance(f, f, 4), 0.0);
  const auto spike = EmbedMultinomial(*ProbabilityVector::Create({1.0, 0.0}));
  const auto half = EmbedMultinomial(ProbabilityVector::Uniform(2));
  EXPECT_NEAR(*ProjectionSqDistance(spike, half, 2), 1.0, 1e-15);
  EXPECT_NEAR(FineGridSqDistance(spike, half), 1.0, 1e-12);
  EXPECT_NEAR(*ProjectionSqDistance(f, PiecewiseConstantDensity::Uniform(1), 1),
              0.0, 1e-15);
}

TEST(ProjectionSqDistanceTest, ParsevalAtNativeResolution) {
  std::mt19937_64 rng(3);
  for (int64_t cells : {2, 4, 8, 64}) {
    const auto f = EmbedMultinomial(RandomProbabilities(rng, cells));
    const auto f0 = EmbedMultinomial(RandomProbabilities(rng, cells / 2));
    EXPECT_NEAR(*ProjectionSqDistance(f, f0, cells), FineGridSqDistance(f, f0),
                1e-10);
  }
}

TEST(ProjectionSqDistanceTest, ContinuousDiscreteNormIdentity) {
  std::mt19937_64 rng(4);
  for (int64_t d : {2, 4, 8, 16}) {
    for (int trial = 0; trial < 10; ++trial) {
      const ProbabilityVector p = RandomProbabilities(rng, d);
      const ProbabilityVector p0 = RandomProbabilities(rng, d);
      double expected = 0.0;
      for (int64_t k = 0; k < d; ++k) expected += (p[k] - p0[k]) * (p[k] - p0[k]);
      expected *= static_cast<double>(d);
      EXPECT_NEAR(*ProjectionSqDistance(EmbedMultinomial(p), EmbedMultinomial(p0), d),
                  expected, 1e-12);
    }
  }
}

TEST(IntegrateTest, ExactOnPartialCells) {
  const auto f = *PiecewiseConstantFunction::Create({2.0, 0.0, 1.0, 1.0});
  EXPECT_NEAR(f.Integrate(0.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(f.Integrate(0.125, 0.375), 0.25, 1e-15);
  EXPECT_NEAR(f.Integrate(0.6, 0.9), 0.3, 1e-15);
  EXPECT_NEAR(f.SquaredNorm(), (4.0 + 0 + 1 + 1) / 4.0, 1e-15);
}

// g = eps sqrt(L) sum_k eta_k psi_{L,k} on 2L cells.
PiecewiseConstantFunction HaarBump(int64_t L, double eps,
                                   const std::vector<int>& eta) {
  std::vector<double> values(2 * L);
  for (int64_t k = 0; k < L; ++k) {
    values[2 * k] = eps * L * eta[k];
    values[2 * k + 1] = -eps * L * eta[k];
  }
  return *PiecewiseConstantFunction::Create(values);
}

TEST(BesovTest, ZeroFunction) {
  const auto zero = *PiecewiseConstantFunction::Create(std::vector<double>(16, 0.0));
  for (int j = 0; j <= 4; ++j) EXPECT_EQ(*BesovSeminormLevel(zero, j), 0.0);
  EXPECT_TRUE(BesovMembership(zero, 0.5, 1e-6));
}

TEST(BesovTest, HaarBumpEnergySitsOnOneLevel) {
  const std::vector<int> eta{1, -1, -1, 1, 1, 1, -1, 1};
  const int64_t L = 8;
  const double eps = 0.05;
  const auto g = HaarBump(L, eps, eta);
  for (int j = 0; j <= 4; ++j) {
    const double expected = j == 3 ? eps * eps * L * L : 0.0;
    EXPECT_NEAR(*BesovSeminormLevel(g, j), expected, 1e-14) << "level " << j;
  }
  EXPECT_STATUS_CODE(BesovSeminormLevel(g, 5), StatusCode::kFailedPrecondition);
}

TEST(BesovTest, SingleDetailCoefficient) {
  const double a = 1.0 / std::sqrt(2.0);
  const auto g = *PiecewiseConstantFunction::Create({a, -a});
  EXPECT_NEAR(*BesovSeminormLevel(g, 0), 0.5, 1e-15);
  const double R = 0.7;
  const auto big = *PiecewiseConstantFunction::Create({R * std::sqrt(2.0),
                                                       -R * std::sqrt(2.0)});
  EXPECT_NEAR(*BesovSeminormLevel(big, 0), 2.0 * R * R, 1e-14);
  EXPECT_FALSE(BesovMembership(big, 1.0, R));
}

TEST(BesovTest, MembershipThresholdForHaarBump) {
  const int64_t L = 4;
  const std::vector<int> eta{1, 1, -1, 1};
  for (double s : {0.5, 1.0, 2.0}) {
    for (double R : {0.5, 1.0, 3.0}) {
      const double edge = R * std::pow(static_cast<double>(L), -(s + 1.0));
      EXPECT_TRUE(BesovMembership(HaarBump(L, edge * 0.999, eta), s, R));
      EXPECT_FALSE(BesovMembership(HaarBump(L, edge * 1.001, eta), s, R));
    }
  }
}

TEST(DensitySamplerTest, CellFrequenciesMatchMasses) {
  const auto f = *PiecewiseConstantDensity::Create({0.5, 1.5, 0.0, 2.0});
  const DensitySampler sampler(f);
  std::vector<int> counts(4, 0);
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) {
    const double u = (i + 0.5) / draws;
    const double x = sampler.Sample(u);
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    ++counts[CellIndex(4, x)];
    EXPECT_EQ(CellIndex(4, x), sampler.SampleCell(u));
  }
  // A stratified grid of u hits each cell in proportion to its mass.
  EXPECT_NEAR(counts[0] / double(draws), 0.125, 1e-3);
  EXPECT_NEAR(counts[1] / double(draws), 0.375, 1e-3);
  EXPECT_EQ(counts[2], 0);
  EXPECT_NEAR(counts[3] / double(draws), 0.5, 1e-3);
}

}  // namespace
}  // namespace privgof
