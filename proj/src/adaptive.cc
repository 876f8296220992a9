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

#include "privgof/adaptive.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privgof/gof_test.h"
#include "privgof/parallel.h"
#include "privgof/random.h"
#include "privgof/status_macros.h"

namespace privgof {
namespace {

// Order statistics of every level at the (1 - u) quantile.
std::vector<double> ThresholdsAt(
    const std::vector<std::vector<double>>& sorted_by_level, double u) {
  std::vector<double> thresholds;
  thresholds.reserve(sorted_by_level.size());
  for (const auto& sorted : sorted_by_level) {
    const int64_t count = static_cast<int64_t>(sorted.size());
    const int64_t index =
        std::clamp<int64_t>(OrderStatisticIndex(count, u), 1, count);
    thresholds.push_back(sorted[index - 1]);
  }
  return thresholds;
}

double FamilywiseRate(const std::vector<std::vector<double>>& null_by_level,
                      const std::vector<double>& thresholds) {
  const size_t replicates = null_by_level.front().size();
  int64_t hits = 0;
  for (size_t b = 0; b < replicates; ++b) {
    for (size_t j = 0; j < null_by_level.size(); ++j) {
      if (null_by_level[j][b] > thresholds[j]) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(replicates);
}

}  // namespace

absl::Status AdaptiveConfig::Validate(int64_t level_count) const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must lie in (0, 1), got ", gamma));
  }
  if (!(u_tolerance > 0.0)) {
    return absl::InvalidArgumentError("u tolerance must be > 0");
  }
  if (level_count < 1) {
    return absl::InvalidArgumentError("the level set must be nonempty");
  }
  const int64_t needed =
      static_cast<int64_t>(std::ceil(static_cast<double>(level_count) / gamma - 1e-9));
  if (calibration_replicates < needed) {
    return absl::InvalidArgumentError(absl::StrCat(
        "adaptive calibration needs at least ", needed, " replicates for ",
        level_count, " levels at gamma=", gamma, ", got ",
        calibration_replicates));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<CoefficientVector>> LevelCoefficients(
    const PiecewiseConstantDensity& f0, const ChannelSpec& spec) {
  std::vector<CoefficientVector> out;
  for (const auto& level : spec.levels) {
    ASSIGN_OR_RETURN(CoefficientVector a0, Project(f0, level.resolution));
    out.push_back(std::move(a0));
  }
  return out;
}

absl::StatusOr<std::vector<double>> StatisticsAllLevels(
    const PrivatizedSample& z_family, const PiecewiseConstantDensity& f0) {
  RETURN_IF_ERROR(z_family.Validate());
  ASSIGN_OR_RETURN(std::vector<CoefficientVector> coefficients,
                   LevelCoefficients(f0, z_family.channel));
  std::vector<double> out;
  for (int64_t level = 0; level < z_family.channel.level_count(); ++level) {
    ASSIGN_OR_RETURN(double t, Statistic(z_family, coefficients[level], level));
    out.push_back(t);
  }
  return out;
}

absl::StatusOr<UGammaCalibration> FindUGamma(
    const std::vector<std::vector<double>>& null_by_level, double gamma,
    double tolerance) {
  if (null_by_level.empty() || null_by_level.front().empty()) {
    return absl::InvalidArgumentError("no null replicates");
  }
  const int64_t levels = static_cast<int64_t>(null_by_level.size());
  const int64_t replicates = static_cast<int64_t>(null_by_level.front().size());
  for (const auto& column : null_by_level) {
    if (static_cast<int64_t>(column.size()) != replicates) {
      return absl::InvalidArgumentError("ragged null replicate matrix");
    }
  }
  AdaptiveConfig check;
  check.gamma = gamma;
  check.u_tolerance = tolerance;
  check.calibration_replicates = replicates;
  RETURN_IF_ERROR(check.Validate(levels));

  std::vector<std::vector<double>> sorted(null_by_level);
  for (auto& column : sorted) std::sort(column.begin(), column.end());

  const double bonferroni = gamma / static_cast<double>(levels);
  auto feasible = [&](double u) {
    return FamilywiseRate(null_by_level, ThresholdsAt(sorted, u)) <= gamma;
  };
  double lo = bonferroni;
  double hi = gamma;
  double u = lo;
  if (feasible(hi)) {
    u = hi;
  } else {
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (feasible(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    u = std::max(lo, bonferroni);
  }
  UGammaCalibration out;
  out.u_gamma = u;
  out.thresholds = ThresholdsAt(sorted, u);
  out.bonferroni_thresholds = ThresholdsAt(sorted, bonferroni);
  out.order_index =
      std::clamp<int64_t>(OrderStatisticIndex(replicates, u), 1, replicates);
  out.empirical_familywise = FamilywiseRate(null_by_level, out.thresholds);
  return out;
}

absl::StatusOr<UGammaCalibration> CalibrateUGamma(
    const PiecewiseConstantDensity& f0, const ChannelSpec& spec, int64_t n,
    double gamma, int64_t replicates, uint64_t seed, double tolerance,
    int workers) {
  RETURN_IF_ERROR(spec.Validate());
  AdaptiveConfig check;
  check.gamma = gamma;
  check.u_tolerance = tolerance;
  check.calibration_replicates = replicates;
  RETURN_IF_ERROR(check.Validate(spec.level_count()));
  if (n < 2) return absl::InvalidArgumentError("n must be >= 2");
  ASSIGN_OR_RETURN(std::vector<CoefficientVector> coefficients,
                   LevelCoefficients(f0, spec));
  const DensitySampler sampler(f0);
  std::vector<std::vector<double>> null_by_level(
      spec.level_count(), std::vector<double>(replicates));
  ParallelFor(replicates, workers, [&](int64_t b) {
    const auto stats = SimulateStatistics(
        sampler, spec, coefficients, n, DeriveSeed(seed, static_cast<uint64_t>(b)));
    for (size_t j = 0; j < stats.size(); ++j) null_by_level[j][b] = stats[j];
  });
  return FindUGamma(null_by_level, gamma, tolerance);
}

bool AdaptiveRateConditionHolds(int64_t n, double alpha) {
  const double log_n = std::log(static_cast<double>(n));
  return static_cast<double>(n) * alpha * alpha >= std::pow(log_n, 2.5);
}

absl::StatusOr<AdaptiveReport> RunAdaptiveTest(
    const PrivatizedSample& z_family, const PiecewiseConstantDensity& f0,
    const AdaptiveConfig& config) {
  RETURN_IF_ERROR(z_family.Validate());
  RETURN_IF_ERROR(config.Validate(z_family.channel.level_count()));
  ASSIGN_OR_RETURN(std::vector<double> statistics,
                   StatisticsAllLevels(z_family, f0));
  ASSIGN_OR_RETURN(
      UGammaCalibration calibration,
      CalibrateUGamma(f0, z_family.channel, z_family.n, config.gamma,
                      config.calibration_replicates,
                      DeriveSeed(config.seed, kSeedCalibration),
                      config.u_tolerance, config.workers));
  AdaptiveReport report;
  for (const auto& level : z_family.channel.levels) {
    report.levels.push_back(level.exponent);
  }
  report.statistics = std::move(statistics);
  report.thresholds = calibration.thresholds;
  report.bonferroni_thresholds = calibration.bonferroni_thresholds;
  report.u_gamma = calibration.u_gamma;
  report.gamma = config.gamma;
  report.calibration_replicates = config.calibration_replicates;
  report.seed = config.seed;
  report.order_index = calibration.order_index;
  for (size_t j = 0; j < report.statistics.size(); ++j) {
    if (report.statistics[j] > report.thresholds[j]) report.reject = true;
  }
  if (!AdaptiveRateConditionHolds(z_family.n, z_family.channel.alpha)) {
    report.warnings.push_back(absl::StrCat(
        "n alpha^2 / log(n)^2.5 < 1 (n=", z_family.n,
        ", alpha=", z_family.channel.alpha,
        "): the adaptive rate guarantee does not apply"));
  }
  return report;
}

absl::StatusOr<AdaptiveReport> RunAdaptiveTest(
    std::span<const double> xs, double alpha,
    const PiecewiseConstantDensity& f0, const AdaptiveConfig& config) {
  const int64_t n = static_cast<int64_t>(xs.size());
  ASSIGN_OR_RETURN(ChannelSpec spec,
                   ChannelSpec::MultiLevel(alpha, n, config.max_level));
  ASSIGN_OR_RETURN(PrivatizedSample z,
                   Privatize(xs, spec, DeriveSeed(config.seed, kSeedChannel),
                             config.workers));
  return RunAdaptiveTest(z, f0, config);
}

}  // namespace privgof
