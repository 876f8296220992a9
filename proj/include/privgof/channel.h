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

#ifndef PRIVGOF_CHANNEL_H_
#define PRIVGOF_CHANNEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "privgof/random.h"

namespace privgof {

// sigma_L = 2 sqrt(2) sqrt(L) / alpha for a single-level channel, or
// 2 sqrt(2) |J| sqrt(L) / alpha for one level of a channel releasing |J|
// levels at once.
absl::StatusOr<double> LaplaceScaleFor(double alpha, int64_t L,
                                       std::optional<int64_t> level_count =
                                           std::nullopt);

// Largest J with 2^J <= n^2.
int MaxAdaptiveLevel(int64_t n);

enum class ChannelMode { kSingleLevel, kMultiLevel };

struct ChannelLevel {
  int64_t resolution = 1;  // L, the number of released coordinates
  int exponent = -1;       // J with L = 2^J, or -1 for a non-dyadic L (= d)
  double noise_scale = 0;  // Laplace standard deviation for this level
};

// A non-interactive alpha-LDP Laplace channel. Each input x releases, for
// every level, the vector (phi_{L,k}(x) + noise_scale W_k)_k with W_k i.i.d.
// unit-variance Laplace.
struct ChannelSpec {
  double alpha = 1.0;
  ChannelMode mode = ChannelMode::kSingleLevel;
  std::vector<ChannelLevel> levels;

  static absl::StatusOr<ChannelSpec> SingleLevel(double alpha, int64_t L);
  // Levels J = 0..MaxAdaptiveLevel(n), optionally truncated at `max_level`.
  // The noise inflation uses the number of levels actually released.
  static absl::StatusOr<ChannelSpec> MultiLevel(
      double alpha, int64_t n, std::optional<int> max_level = std::nullopt);
  static absl::StatusOr<ChannelSpec> MultiLevelFromExponents(
      double alpha, std::vector<int> exponents);

  int64_t level_count() const { return static_cast<int64_t>(levels.size()); }
  // Sum of resolutions; the length of one released vector.
  int64_t total_dimension() const;
  absl::Status Validate() const;
};

// Source of the W_{i,level,k} draws.
class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual void Fill(uint64_t row, uint32_t level, std::span<double> out) const = 0;
};

// Counter-based Laplace noise: the draw for (row, level, k) depends only on
// the seed and those indices.
class LaplaceNoise final : public NoiseSource {
 public:
  explicit LaplaceNoise(uint64_t seed) : stream_(seed) {}
  void Fill(uint64_t row, uint32_t level, std::span<double> out) const override {
    stream_.FillUnitLaplace(row, level, out);
  }

 private:
  CounterStream stream_;
};

class ZeroNoise final : public NoiseSource {
 public:
  void Fill(uint64_t, uint32_t, std::span<double> out) const override;
};

// Released views of n samples: one row-major n x L matrix per channel level.
struct PrivatizedSample {
  int64_t n = 0;
  ChannelSpec channel;
  uint64_t seed = 0;
  std::vector<std::vector<double>> matrices;

  std::span<const double> Row(int64_t level, int64_t i) const;
  absl::Status Validate() const;
};

// Applies the channel to xs with counter-based Laplace noise keyed by `seed`.
// Output is bit-identical for any `workers`.
absl::StatusOr<PrivatizedSample> Privatize(std::span<const double> xs,
                                           const ChannelSpec& spec,
                                           uint64_t seed, int workers = 1);
absl::StatusOr<PrivatizedSample> Privatize(std::span<const double> xs,
                                           const ChannelSpec& spec,
                                           const NoiseSource& noise,
                                           uint64_t seed_record = 0,
                                           int workers = 1);

// Maps class labels in [0, d) to the midpoints of the d cells, so that a
// channel with L = d releases sqrt(d) 1{label = k} + noise.
absl::StatusOr<std::vector<double>> LabelsToPoints(std::span<const int64_t> labels,
                                                   int64_t d);

// log q(z|x) - log q(z|x') for the product-Laplace density of the channel;
// z is the concatenation of all released levels.
absl::StatusOr<double> PrivacyRatioAudit(const ChannelSpec& spec, double x,
                                         double x_prime,
                                         std::span<const double> z);

}  // namespace privgof

#endif  // PRIVGOF_CHANNEL_H_
