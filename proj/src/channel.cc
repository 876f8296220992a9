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

#include <algorithm>
#include <bit>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privgof/dyadic.h"
#include "privgof/parallel.h"

namespace privgof {
namespace {

constexpr double kTwoRootTwo = 2.8284271247461900976;
constexpr double kRootTwo = 1.4142135623730950488;

absl::Status CheckAlpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must be a positive finite number, got ", alpha));
  }
  return absl::OkStatus();
}

absl::Status CheckPoint(double x) {
  if (!(x >= 0.0 && x < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("samples must lie in [0, 1), got ", x));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> LaplaceScaleFor(double alpha, int64_t L,
                                       std::optional<int64_t> level_count) {
  if (auto s = CheckAlpha(alpha); !s.ok()) return s;
  if (L < 1) {
    return absl::InvalidArgumentError(absl::StrCat("L must be >= 1, got ", L));
  }
  const double count = level_count.has_value() ? *level_count : 1;
  if (count < 1) {
    return absl::InvalidArgumentError("level count must be >= 1");
  }
  return kTwoRootTwo * count * std::sqrt(static_cast<double>(L)) / alpha;
}

int MaxAdaptiveLevel(int64_t n) {
  const unsigned __int128 limit =
      static_cast<unsigned __int128>(n) * static_cast<unsigned __int128>(n);
  int level = 0;
  while ((static_cast<unsigned __int128>(1) << (level + 1)) <= limit) ++level;
  return level;
}

absl::StatusOr<ChannelSpec> ChannelSpec::SingleLevel(double alpha, int64_t L) {
  auto scale = LaplaceScaleFor(alpha, L);
  if (!scale.ok()) return scale.status();
  ChannelSpec spec;
  spec.alpha = alpha;
  spec.mode = ChannelMode::kSingleLevel;
  int exponent = -1;
  if ((L & (L - 1)) == 0) exponent = std::countr_zero(static_cast<uint64_t>(L));
  spec.levels.push_back({L, exponent, *scale});
  return spec;
}

absl::StatusOr<ChannelSpec> ChannelSpec::MultiLevel(double alpha, int64_t n,
                                                    std::optional<int> max_level) {
  if (n < 1) {
    return absl::InvalidArgumentError(absl::StrCat("n must be >= 1, got ", n));
  }
  int top = MaxAdaptiveLevel(n);
  if (max_level.has_value()) {
    if (*max_level < 0) {
      return absl::InvalidArgumentError("max_level must be >= 0");
    }
    top = std::min(top, *max_level);
  }
  std::vector<int> exponents;
  for (int j = 0; j <= top; ++j) exponents.push_back(j);
  return MultiLevelFromExponents(alpha, std::move(exponents));
}

absl::StatusOr<ChannelSpec> ChannelSpec::MultiLevelFromExponents(
    double alpha, std::vector<int> exponents) {
  if (auto s = CheckAlpha(alpha); !s.ok()) return s;
  if (exponents.empty()) {
    return absl::InvalidArgumentError("the level set must be nonempty");
  }
  ChannelSpec spec;
  spec.alpha = alpha;
  spec.mode = ChannelMode::kMultiLevel;
  const int64_t count = static_cast<int64_t>(exponents.size());
  for (int j : exponents) {
    if (j < 0 || j > 30) {
      return absl::InvalidArgumentError(
          absl::StrCat("level exponent out of range: ", j));
    }
    const int64_t L = int64_t{1} << j;
    auto scale = LaplaceScaleFor(alpha, L, count);
    if (!scale.ok()) return scale.status();
    spec.levels.push_back({L, j, *scale});
  }
  return spec;
}

int64_t ChannelSpec::total_dimension() const {
  int64_t total = 0;
  for (const auto& level : levels) total += level.resolution;
  return total;
}

absl::Status ChannelSpec::Validate() const {
  if (auto s = CheckAlpha(alpha); !s.ok()) return s;
  if (levels.empty()) return absl::InvalidArgumentError("channel has no levels");
  if (mode == ChannelMode::kSingleLevel && levels.size() != 1) {
    return absl::InvalidArgumentError("a single-level channel has one level");
  }
  const std::optional<int64_t> count =
      mode == ChannelMode::kMultiLevel ? std::optional<int64_t>(level_count())
                                       : std::nullopt;
  for (const auto& level : levels) {
    auto expected = LaplaceScaleFor(alpha, level.resolution, count);
    if (!expected.ok()) return expected.status();
    if (!(level.noise_scale > 0.0) ||
        std::abs(level.noise_scale - *expected) > 1e-12 * *expected) {
      return absl::InvalidArgumentError(absl::StrCat(
          "noise scale ", level.noise_scale, " at L=", level.resolution,
          " does not match ", *expected));
    }
  }
  return absl::OkStatus();
}

void ZeroNoise::Fill(uint64_t, uint32_t, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
}

std::span<const double> PrivatizedSample::Row(int64_t level, int64_t i) const {
  const int64_t L = channel.levels[level].resolution;
  return std::span<const double>(matrices[level]).subspan(i * L, L);
}

absl::Status PrivatizedSample::Validate() const {
  if (auto s = channel.Validate(); !s.ok()) return s;
  if (matrices.size() != channel.levels.size()) {
    return absl::InvalidArgumentError("one matrix per channel level expected");
  }
  for (size_t level = 0; level < matrices.size(); ++level) {
    if (static_cast<int64_t>(matrices[level].size()) !=
        n * channel.levels[level].resolution) {
      return absl::InvalidArgumentError(
          absl::StrCat("matrix ", level, " has the wrong shape"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<PrivatizedSample> Privatize(std::span<const double> xs,
                                           const ChannelSpec& spec,
                                           uint64_t seed, int workers) {
  return Privatize(xs, spec, LaplaceNoise(seed), seed, workers);
}

absl::StatusOr<PrivatizedSample> Privatize(std::span<const double> xs,
                                           const ChannelSpec& spec,
                                           const NoiseSource& noise,
                                           uint64_t seed_record, int workers) {
  if (auto s = spec.Validate(); !s.ok()) return s;
  for (double x : xs) {
    if (auto s = CheckPoint(x); !s.ok()) return s;
  }
  PrivatizedSample out;
  out.n = static_cast<int64_t>(xs.size());
  out.channel = spec;
  out.seed = seed_record;
  for (const auto& level : spec.levels) {
    out.matrices.emplace_back(out.n * level.resolution, 0.0);
  }
  ParallelFor(out.n, workers, [&](int64_t i) {
    for (size_t level = 0; level < spec.levels.size(); ++level) {
      const int64_t L = spec.levels[level].resolution;
      const double sigma = spec.levels[level].noise_scale;
      std::span<double> row(out.matrices[level].data() + i * L, L);
      noise.Fill(static_cast<uint64_t>(i), static_cast<uint32_t>(level), row);
      for (double& z : row) z *= sigma;
      row[CellIndex(L, xs[i])] += std::sqrt(static_cast<double>(L));
    }
  });
  return out;
}

absl::StatusOr<std::vector<double>> LabelsToPoints(
    std::span<const int64_t> labels, int64_t d) {
  if (d < 1) return absl::InvalidArgumentError("d must be >= 1");
  std::vector<double> xs;
  xs.reserve(labels.size());
  for (int64_t label : labels) {
    if (label < 0 || label >= d) {
      return absl::InvalidArgumentError(
          absl::StrCat("label ", label, " outside [0, ", d, ")"));
    }
    xs.push_back((static_cast<double>(label) + 0.5) / static_cast<double>(d));
  }
  return xs;
}

absl::StatusOr<double> PrivacyRatioAudit(const ChannelSpec& spec, double x,
                                         double x_prime,
                                         std::span<const double> z) {
  if (auto s = CheckPoint(x); !s.ok()) return s;
  if (auto s = CheckPoint(x_prime); !s.ok()) return s;
  if (static_cast<int64_t>(z.size()) != spec.total_dimension()) {
    return absl::InvalidArgumentError(
        absl::StrCat("z has length ", z.size(), ", expected ",
                     spec.total_dimension()));
  }
  double log_ratio = 0.0;
  int64_t offset = 0;
  for (const auto& level : spec.levels) {
    const int64_t L = level.resolution;
    const double height = std::sqrt(static_cast<double>(L));
    const int64_t cell = CellIndex(L, x);
    const int64_t cell_prime = CellIndex(L, x_prime);
    const double rate = kRootTwo / level.noise_scale;
    // Coordinates outside the two occupied cells cancel exactly.
    auto term = [&](int64_t k) {
      const double phi = k == cell ? height : 0.0;
      const double phi_prime = k == cell_prime ? height : 0.0;
      const double zk = z[offset + k];
      return rate * (std::abs(zk - phi_prime) - std::abs(zk - phi));
    };
    log_ratio += term(cell);
    if (cell_prime != cell) log_ratio += term(cell_prime);
    offset += L;
  }
  return log_ratio;
}

}  // namespace privgof
