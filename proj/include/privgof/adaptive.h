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

#ifndef PRIVGOF_ADAPTIVE_H_
#define PRIVGOF_ADAPTIVE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privgof/channel.h"
#include "privgof/dyadic.h"

namespace privgof {

inline constexpr double kDefaultUTolerance = 1e-3;

struct AdaptiveConfig {
  double gamma = 0.05;
  int64_t calibration_replicates = 999;
  double u_tolerance = kDefaultUTolerance;
  uint64_t seed = 0;
  // Truncates the level set {J : 2^J <= n^2} at this J when set.
  std::optional<int> max_level;
  int workers = 1;

  // Checks gamma, the tolerance, and B >= ceil(level_count / gamma).
  absl::Status Validate(int64_t level_count) const;
};

// (T_J)_{J in levels} for a multi-level sample, each against
// Project(f0, 2^J).
absl::StatusOr<std::vector<double>> StatisticsAllLevels(
    const PrivatizedSample& z_family, const PiecewiseConstantDensity& f0);

struct UGammaCalibration {
  double u_gamma = 0.0;
  // Per-level (1 - u_gamma) quantiles of the shared null replicates.
  std::vector<double> thresholds;
  // Per-level (1 - gamma/|J|) quantiles of the same replicates.
  std::vector<double> bonferroni_thresholds;
  int64_t order_index = 0;
  // Fraction of null replicates with some level above its threshold.
  double empirical_familywise = 0.0;
};

// Largest u (to within `tolerance`) in [gamma/m, gamma] such that the fraction
// of null replicate vectors with some level above its (1-u) order statistic is
// at most gamma. null_by_level[j][b] is replicate b of level j. Never returns
// less than gamma/m.
absl::StatusOr<UGammaCalibration> FindUGamma(
    const std::vector<std::vector<double>>& null_by_level, double gamma,
    double tolerance = kDefaultUTolerance);

// Simulates B null replicate vectors for the multi-level channel and runs
// FindUGamma on them.
absl::StatusOr<UGammaCalibration> CalibrateUGamma(
    const PiecewiseConstantDensity& f0, const ChannelSpec& spec, int64_t n,
    double gamma, int64_t replicates, uint64_t seed,
    double tolerance = kDefaultUTolerance, int workers = 1);

struct AdaptiveReport {
  std::vector<int> levels;  // J for each entry below
  std::vector<double> statistics;
  std::vector<double> thresholds;
  std::vector<double> bonferroni_thresholds;
  double u_gamma = 0.0;
  bool reject = false;
  double gamma = 0.0;
  int64_t calibration_replicates = 0;
  uint64_t seed = 0;
  int64_t order_index = 0;
  std::vector<std::string> warnings;
};

// n alpha^2 / log(n)^{5/2} >= 1, the sample-size condition of the adaptive
// rate guarantee.
bool AdaptiveRateConditionHolds(int64_t n, double alpha);

absl::StatusOr<AdaptiveReport> RunAdaptiveTest(
    const PrivatizedSample& z_family, const PiecewiseConstantDensity& f0,
    const AdaptiveConfig& config);

// Privatizes xs with ChannelSpec::MultiLevel(alpha, n, config.max_level) and
// runs the aggregated test.
absl::StatusOr<AdaptiveReport> RunAdaptiveTest(
    std::span<const double> xs, double alpha,
    const PiecewiseConstantDensity& f0, const AdaptiveConfig& config);

// Per-level null coefficients Project(f0, 2^J).
absl::StatusOr<std::vector<CoefficientVector>> LevelCoefficients(
    const PiecewiseConstantDensity& f0, const ChannelSpec& spec);

}  // namespace privgof

#endif  // PRIVGOF_ADAPTIVE_H_
