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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace privgof {
namespace {

absl::Status CheckUnitIntervalPoint(double x) {
  if (!(x >= 0.0 && x < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("x must lie in [0, 1), got ", x));
  }
  return absl::OkStatus();
}

absl::Status CheckIndex(int64_t L, int64_t k) {
  if (L < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("L must be positive, got ", L));
  }
  if (k < 0 || k >= L) {
    return absl::InvalidArgumentError(
        absl::StrCat("index k=", k, " outside [0, ", L, ")"));
  }
  return absl::OkStatus();
}

bool Nested(int64_t a, int64_t b) { return a % b == 0 || b % a == 0; }

}  // namespace

absl::StatusOr<PiecewiseConstantFunction> PiecewiseConstantFunction::Create(
    std::vector<double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("a piecewise-constant function needs "
                                      "at least one cell");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      return absl::InvalidArgumentError("cell values must be finite");
    }
  }
  return PiecewiseConstantFunction(std::move(values));
}

double PiecewiseConstantFunction::Integrate(double a, double b) const {
  const int64_t cells = cell_count();
  const double width = 1.0 / static_cast<double>(cells);
  const int64_t first = std::clamp<int64_t>(
      static_cast<int64_t>(std::floor(a * cells)), 0, cells - 1);
  double total = 0.0;
  for (int64_t c = first; c < cells; ++c) {
    const double lo = std::max(a, c * width);
    const double hi = std::min(b, (c + 1) * width);
    if (hi <= lo) {
      if (c * width >= b) break;
      continue;
    }
    total += values_[c] * (hi - lo);
  }
  return total;
}

double PiecewiseConstantFunction::SquaredNorm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return sum / static_cast<double>(cell_count());
}

absl::StatusOr<PiecewiseConstantDensity> PiecewiseConstantDensity::Create(
    std::vector<double> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError("a density needs at least one cell");
  }
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("density values must be finite and >= 0, got ", v));
    }
    sum += v;
  }
  const double mass = sum / static_cast<double>(values.size());
  if (std::abs(mass - 1.0) > kMassTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("density must integrate to 1, got ", mass));
  }
  return PiecewiseConstantDensity(std::move(values));
}

PiecewiseConstantDensity PiecewiseConstantDensity::Uniform(int64_t cell_count) {
  return PiecewiseConstantDensity(
      std::vector<double>(std::max<int64_t>(cell_count, 1), 1.0));
}

absl::StatusOr<ProbabilityVector> ProbabilityVector::Create(
    std::vector<double> probs) {
  if (probs.empty()) {
    return absl::InvalidArgumentError("a probability vector needs d >= 1");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("probabilities must lie in [0, 1], got ", p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kMassTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("probabilities must sum to 1, got ", sum));
  }
  return ProbabilityVector(std::move(probs));
}

ProbabilityVector ProbabilityVector::Uniform(int64_t d) {
  d = std::max<int64_t>(d, 1);
  return ProbabilityVector(std::vector<double>(d, 1.0 / static_cast<double>(d)));
}

absl::StatusOr<double> PhiEval(int64_t L, int64_t k, double x) {
  if (auto s = CheckIndex(L, k); !s.ok()) return s;
  if (auto s = CheckUnitIntervalPoint(x); !s.ok()) return s;
  return CellIndex(L, x) == k ? std::sqrt(static_cast<double>(L)) : 0.0;
}

absl::StatusOr<double> PsiEval(int64_t L, int64_t k, double x) {
  if (auto s = CheckIndex(L, k); !s.ok()) return s;
  if (auto s = CheckUnitIntervalPoint(x); !s.ok()) return s;
  const int64_t half = CellIndex(2 * L, x);
  if (half / 2 != k) return 0.0;
  const double height = std::sqrt(static_cast<double>(L));
  return half % 2 == 0 ? height : -height;
}

PiecewiseConstantDensity EmbedMultinomial(const ProbabilityVector& p) {
  std::vector<double> values(p.probs());
  const double d = static_cast<double>(p.d());
  for (double& v : values) v *= d;
  // Sum of p is within tolerance of 1, so the mean of d p is as well.
  return *PiecewiseConstantDensity::Create(std::move(values));
}

absl::StatusOr<ProbabilityVector> ExtractMultinomial(
    const PiecewiseConstantDensity& f) {
  std::vector<double> probs(f.values());
  const double cells = static_cast<double>(f.cell_count());
  for (double& p : probs) p /= cells;
  return ProbabilityVector::Create(std::move(probs));
}

absl::StatusOr<CoefficientVector> Project(const PiecewiseConstantFunction& f,
                                          int64_t L) {
  if (L < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("L must be positive, got ", L));
  }
  const int64_t cells = f.cell_count();
  if (!Nested(cells, L)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "resolution ", L, " is incompatible with a ", cells, "-cell grid"));
  }
  const double root_l = std::sqrt(static_cast<double>(L));
  CoefficientVector out{std::vector<double>(L, 0.0)};
  const auto& v = f.values();
  if (cells >= L) {
    const int64_t block = cells / L;
    for (int64_t k = 0; k < L; ++k) {
      double sum = 0.0;
      for (int64_t c = k * block; c < (k + 1) * block; ++c) sum += v[c];
      out.coeffs[k] = root_l * sum / static_cast<double>(cells);
    }
  } else {
    const int64_t split = L / cells;
    for (int64_t k = 0; k < L; ++k) {
      out.coeffs[k] = root_l * v[k / split] / static_cast<double>(L);
    }
  }
  return out;
}

absl::StatusOr<double> ProjectionSqDistance(const PiecewiseConstantFunction& f,
                                            const PiecewiseConstantFunction& f0,
                                            int64_t L) {
  auto a = Project(f, L);
  if (!a.ok()) return a.status();
  auto a0 = Project(f0, L);
  if (!a0.ok()) return a0.status();
  double sum = 0.0;
  for (int64_t k = 0; k < L; ++k) {
    const double diff = a->coeffs[k] - a0->coeffs[k];
    sum += diff * diff;
  }
  return sum;
}

absl::StatusOr<PiecewiseConstantFunction> Refine(
    const PiecewiseConstantFunction& f, int64_t cell_count) {
  if (cell_count < 1 || cell_count % f.cell_count() != 0) {
    return absl::FailedPreconditionError(
        absl::StrCat("cannot refine a ", f.cell_count(), "-cell grid to ",
                     cell_count, " cells"));
  }
  const int64_t split = cell_count / f.cell_count();
  std::vector<double> values(cell_count);
  for (int64_t c = 0; c < cell_count; ++c) values[c] = f.values()[c / split];
  return PiecewiseConstantFunction::Create(std::move(values));
}

absl::StatusOr<PiecewiseConstantFunction> Difference(
    const PiecewiseConstantFunction& f, const PiecewiseConstantFunction& f0) {
  if (!Nested(f.cell_count(), f0.cell_count())) {
    return absl::FailedPreconditionError(
        absl::StrCat("grids of ", f.cell_count(), " and ", f0.cell_count(),
                     " cells do not nest"));
  }
  const int64_t cells = std::max(f.cell_count(), f0.cell_count());
  auto fine = Refine(f, cells);
  if (!fine.ok()) return fine.status();
  auto fine0 = Refine(f0, cells);
  if (!fine0.ok()) return fine0.status();
  std::vector<double> values(cells);
  for (int64_t c = 0; c < cells; ++c) {
    values[c] = fine->values()[c] - fine0->values()[c];
  }
  return PiecewiseConstantFunction::Create(std::move(values));
}

absl::StatusOr<double> BesovSeminormLevel(const PiecewiseConstantFunction& g,
                                          int level) {
  if (level < 0 || level > 62 || (int64_t{1} << level) > g.cell_count()) {
    return absl::FailedPreconditionError(
        absl::StrCat("level ", level, " exceeds the resolution of a ",
                     g.cell_count(), "-cell function"));
  }
  const int64_t count = int64_t{1} << level;
  const double width = 1.0 / static_cast<double>(count);
  const double scale = std::sqrt(static_cast<double>(count));
  double energy = 0.0;
  for (int64_t k = 0; k < count; ++k) {
    const double left = k * width;
    const double mid = left + 0.5 * width;
    const double beta =
        scale * (g.Integrate(left, mid) - g.Integrate(mid, left + width));
    energy += beta * beta;
  }
  return energy;
}

bool BesovMembership(const PiecewiseConstantFunction& g, double s, double R) {
  for (int level = 0; (int64_t{1} << level) <= g.cell_count(); ++level) {
    const double energy = *BesovSeminormLevel(g, level);
    const double bound = R * R * std::exp2(-2.0 * level * s);
    if (energy > bound * (1.0 + 1e-12)) return false;
  }
  return true;
}

DensitySampler::DensitySampler(const PiecewiseConstantDensity& f)
    : cell_count_(f.cell_count()) {
  masses_.reserve(cell_count_);
  cumulative_.reserve(cell_count_);
  double running = 0.0;
  for (double v : f.values()) {
    const double mass = v / static_cast<double>(cell_count_);
    masses_.push_back(mass);
    running += mass;
    cumulative_.push_back(running);
  }
  // Absorb rounding so every u in (0,1) lands in some cell.
  cumulative_.back() = std::max(cumulative_.back(), 1.0);
}

int64_t DensitySampler::SampleCell(double u) const {
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  int64_t cell = std::min<int64_t>(it - cumulative_.begin(), cell_count_ - 1);
  while (masses_[cell] <= 0.0 && cell > 0) --cell;
  return cell;
}

double DensitySampler::Sample(double u) const {
  const int64_t cell = SampleCell(u);
  const double below = cell == 0 ? 0.0 : cumulative_[cell - 1];
  double fraction = masses_[cell] > 0.0 ? (u - below) / masses_[cell] : 0.5;
  fraction = std::clamp(fraction, 0.0, 1.0);
  const double x = (static_cast<double>(cell) + fraction) /
                   static_cast<double>(cell_count_);
  // Keep the point inside its cell and inside [0, 1).
  const double upper = std::nextafter(
      static_cast<double>(cell + 1) / static_cast<double>(cell_count_), 0.0);
  return std::min(x, upper);
}

}  // namespace privgof
