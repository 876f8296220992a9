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

#ifndef PRIVGOF_EXPERIMENT_H_
#define PRIVGOF_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privgof/channel.h"
#include "privgof/dyadic.h"
#include "privgof/serialization.h"

namespace privgof {

inline constexpr char kPrivgofVersion[] = "0.1.0";
inline constexpr int64_t kMinTrials = 100;
inline constexpr int kDefaultBisectionIterations = 12;

enum class ExperimentKind {
  kLevel,
  kPowerCurve,
  kRateRegression,
  kDiscrete,
  kAdaptive,
  kCalibrate,
};

const char* ExperimentKindName(ExperimentKind kind);
absl::StatusOr<ExperimentKind> ParseExperimentKind(const std::string& name);

enum class AlternativeFamily {
  kHaar,           // f0 + eps sqrt(L) sum_k eta_k psi_{L,k}
  kConcentration,  // see GenerateConcentrationAlternative
};

// How the privacy level is set for each n in a rate regression.
enum class AlphaRule {
  kFixed,      // alpha taken from the grid
  kClassical,  // alpha = 2 n^{1/5}
};

// What a calibrate run fits.
enum class CalibrationTarget { kContinuous, kDiscrete, kAdaptive };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kLevel;

  // Grid axes. Not every axis applies to every kind; an empty L axis means
  // L = L*(n, alpha, s).
  std::vector<int64_t> n = {200};
  std::vector<double> alpha = {1.0};
  std::vector<double> gamma = {0.05};
  std::vector<double> beta = {0.05};
  std::vector<double> s = {1.0};
  std::vector<double> R = {1.0};
  std::vector<int64_t> d;
  std::vector<int64_t> L;

  int64_t trials = 1000;
  int64_t calibration_replicates = 999;
  uint64_t seed = 0;
  int workers = 1;

  // Power-curve amplitudes (continuous) or l2 distances |p - p0|_2
  // (discrete). For adaptive runs an amplitude of 0 gives the level.
  std::vector<double> epsilons;
  AlternativeFamily family = AlternativeFamily::kHaar;
  // Haar alternative resolution; defaults to L / 2 for power curves.
  std::optional<int64_t> alternative_L;
  // Separation constant; when set, one extra point sits at the theoretical
  // separation for that constant.
  std::optional<double> constant;

  std::optional<int> max_level;
  AlphaRule alpha_rule = AlphaRule::kFixed;
  CalibrationTarget target = CalibrationTarget::kContinuous;
  int bisection_iterations = kDefaultBisectionIterations;
  double u_tolerance = 1e-3;

  absl::Status Validate() const;
};

Json ConfigToJson(const ExperimentConfig& config);
absl::StatusOr<ExperimentConfig> ConfigFromJson(const Json& j);

// One CSV row. Axes that do not apply are 0.
struct ExperimentRecord {
  int64_t n = 0;
  double alpha = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  double s = 0.0;
  double R = 0.0;
  int64_t d = 0;
  int64_t L = 0;
  double epsilon = 0.0;
  double rate = 0.0;
  double se = 0.0;
  int64_t trials = 0;
  // |f - f0|_2 (continuous) or |p - p0|_2 (discrete).
  double separation = 0.0;
  // Rejection threshold, or u_gamma for adaptive runs.
  double threshold = 0.0;
  std::string note;

  bool operator==(const ExperimentRecord&) const = default;
};

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::kLevel;
  uint64_t seed = 0;
  std::string version = kPrivgofVersion;
  ExperimentConfig config;
  std::vector<ExperimentRecord> records;
  std::map<std::string, double> summary;
  std::vector<std::string> warnings;
};

// sqrt(r (1 - r) / M).
double BinomialStandardError(double rate, int64_t trials);

// Fraction of statistics strictly above the threshold.
double RejectionRate(std::span<const double> statistics, double threshold);

// Statistics of `trials` independent samples of size n drawn from f and
// released through `spec`; row t uses seed DeriveSeed(base_seed, t). The
// result is trial-major: out[t * levels + level].
std::vector<double> SimulateTrials(const PiecewiseConstantDensity& f,
                                   const ChannelSpec& spec,
                                   std::span<const CoefficientVector> alpha0,
                                   int64_t n, int64_t trials,
                                   uint64_t base_seed, int workers);

struct BisectionResult {
  double lo = 0.0;
  double hi = 0.0;
  double power_lo = 0.0;
  double power_hi = 0.0;
  bool bracketed = false;
  int iterations = 0;

  double Midpoint() const { return 0.5 * (lo + hi); }
};

// Finds where the nondecreasing `power` crosses `target` on [lo, hi]. The
// bracket is flagged unless power(lo) < target <= power(hi).
BisectionResult BisectCrossing(const std::function<double(double)>& power,
                               double lo, double hi, double target,
                               int iterations);

// Smallest value >= x with two significant digits.
double RoundUpTwoDigits(double x);

// Ordinary least-squares slope of y on x.
double OlsSlope(std::span<const double> x, std::span<const double> y);

absl::StatusOr<ExperimentResult> RunLevelExperiment(const ExperimentConfig& config);
absl::StatusOr<ExperimentResult> RunPowerCurve(const ExperimentConfig& config);
absl::StatusOr<ExperimentResult> RunRateRegression(const ExperimentConfig& config);
absl::StatusOr<ExperimentResult> RunDiscreteExperiment(
    const ExperimentConfig& config);
absl::StatusOr<ExperimentResult> RunAdaptiveExperiment(
    const ExperimentConfig& config);
// Fits the smallest separation constant whose alternatives reach power
// 1 - beta on the first grid point; summary["constant"] holds the fit.
absl::StatusOr<ExperimentResult> RunConstantCalibration(
    const ExperimentConfig& config);

// Dispatches on config.kind.
absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config);

// Emission. CSV columns are pinned to
//   n,alpha,gamma,beta,s,R,d,L,epsilon,rate,se,trials,separation,threshold,note
// and numbers are printed with %.17g.
inline constexpr char kCsvHeader[] =
    "n,alpha,gamma,beta,s,R,d,L,epsilon,rate,se,trials,separation,threshold,"
    "note";

std::string ToCsv(const ExperimentResult& result);
Json ResultToJson(const ExperimentResult& result);
absl::StatusOr<ExperimentResult> ResultFromJson(const Json& j);

enum class OutputFormat { kCsv, kJson };

// Writes <dir>/<kind>.csv or <dir>/<kind>.json and returns the path.
absl::StatusOr<std::string> Emit(const ExperimentResult& result,
                                 const std::string& dir, OutputFormat format);

}  // namespace privgof

#endif  // PRIVGOF_EXPERIMENT_H_
