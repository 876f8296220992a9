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

#ifndef PRIVGOF_GOF_TEST_H_
#define PRIVGOF_GOF_TEST_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "privgof/channel.h"
#include "privgof/dyadic.h"

namespace privgof {

inline constexpr int64_t kDefaultCalibrationReplicates = 999;

// Streaming form of the U-statistic
//   T = 1/(n(n-1)) sum_{i != l} <Z_i - a0, Z_l - a0>
// via T = (|sum_i Y_i|^2 - sum_i |Y_i|^2) / (n(n-1)), Y_i = Z_i - a0.
class UStatisticAccumulator {
 public:
  explicit UStatisticAccumulator(std::span<const double> alpha0);

  void AddRow(std::span<const double> row);
  // Adds a row already centered by alpha0.
  void AddCenteredRow(std::span<const double> centered);

  int64_t rows() const { return rows_; }
  // Requires rows() >= 2.
  double Value() const;

 private:
  std::vector<double> alpha0_;
  std::vector<double> column_sums_;
  double squared_sum_ = 0.0;
  int64_t rows_ = 0;
};

// T_L for level `level` of Z against the null coefficients alpha0.
absl::StatusOr<double> Statistic(const PrivatizedSample& z,
                                 const CoefficientVector& alpha0,
                                 int64_t level = 0);

// T_d = d/(n(n-1)) sum_k sum_{i != l} (1{x_i=k} - p0_k)(1{x_l=k} - p0_k),
// computed from class counts.
absl::StatusOr<double> StatisticDiscrete(std::span<const int64_t> labels,
                                         const ProbabilityVector& p0);

// One simulated draw of the statistics of every channel level: n points from
// `sampler` (sample stream of `seed`), privatized with Laplace noise keyed by
// `seed`. Equal to Privatize + Statistic on the same points and seed.
std::vector<double> SimulateStatistics(
    const DensitySampler& sampler, const ChannelSpec& spec,
    std::span<const CoefficientVector> alpha0, int64_t n, uint64_t seed);

// Draws n points from `sampler` using the sample stream of `seed`.
std::vector<double> DrawSample(const DensitySampler& sampler, int64_t n,
                               uint64_t seed);

// ceil((B+1)(1-gamma)), the 1-based index of the conservative upper order
// statistic used as the (1-gamma)-quantile estimate.
int64_t OrderStatisticIndex(int64_t replicates, double gamma);

// Checks 0 < gamma < 1 and B >= ceil(1/gamma).
absl::Status ValidateCalibration(double gamma, int64_t replicates);

struct NullCalibration {
  double threshold = 0.0;
  int64_t order_index = 0;
  std::vector<double> sorted_replicates;
};

// Simulates B statistics under f0 (replicate b uses DeriveSeed(seed, b)) and
// returns the order statistic at OrderStatisticIndex(B, gamma).
absl::StatusOr<NullCalibration> CalibrateNullQuantile(
    const PiecewiseConstantDensity& f0, const ChannelSpec& spec, int64_t n,
    double gamma, int64_t replicates, uint64_t seed, int workers = 1);

// Threshold picked from an already simulated null sample.
absl::StatusOr<NullCalibration> QuantileFromReplicates(
    std::vector<double> replicates, double gamma);

struct Resolution {
  int J = 0;
  int64_t L = 1;
};

// Smallest J >= 0 with 2^J >= (n alpha^2)^{2/(4s+3)} min n^{2/(4s+1)};
// J = 0 when alpha < 1/sqrt(n). The radius does not enter the choice.
Resolution SelectResolution(int64_t n, double alpha, double s,
                            double radius_unused = 1.0);

struct TestConfig {
  double gamma = 0.05;
  int64_t calibration_replicates = kDefaultCalibrationReplicates;
  uint64_t seed = 0;
  // Fixed resolution; when unset it is chosen by SelectResolution(n, alpha, s).
  std::optional<int64_t> L;
  double s = 1.0;
  double R = 1.0;
  int workers = 1;

  absl::Status Validate() const;
};

struct TestReport {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;
  int64_t L = 1;
  double gamma = 0.0;
  int64_t calibration_replicates = 0;
  uint64_t seed = 0;
  int64_t order_index = 0;
};

// Runs the calibrated test on already privatized views. Rejects iff the
// statistic is strictly above the threshold.
absl::StatusOr<TestReport> RunTest(const PrivatizedSample& z,
                                   const PiecewiseConstantDensity& f0,
                                   const TestConfig& config);

// Privatizes raw samples (channel seed derived from config.seed) and runs the
// calibrated test.
absl::StatusOr<TestReport> RunTest(std::span<const double> xs, double alpha,
                                   const PiecewiseConstantDensity& f0,
                                   const TestConfig& config);

// Purpose tags for DeriveSeed.
enum SeedPurpose : uint64_t {
  kSeedChannel = 0x43484E4C,      // "CHNL"
  kSeedCalibration = 0x43414C42,  // "CALB"
  kSeedTrial = 0x5452494C,        // "TRIL"
};

}  // namespace privgof

#endif  // PRIVGOF_GOF_TEST_H_
