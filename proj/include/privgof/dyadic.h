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

#ifndef PRIVGOF_DYADIC_H_
#define PRIVGOF_DYADIC_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace privgof {

// Tolerance on the unit-mass and unit-sum invariants.
inline constexpr double kMassTolerance = 1e-12;

// A real function on [0,1) that is constant on each of `cell_count` equal
// cells [k/cell_count, (k+1)/cell_count). Differences of densities live here.
class PiecewiseConstantFunction {
 public:
  static absl::StatusOr<PiecewiseConstantFunction> Create(
      std::vector<double> values);

  int64_t cell_count() const { return static_cast<int64_t>(values_.size()); }
  const std::vector<double>& values() const { return values_; }

  // Exact integral over [a, b) with 0 <= a <= b <= 1.
  double Integrate(double a, double b) const;
  // Exact squared L2 norm.
  double SquaredNorm() const;

 protected:
  explicit PiecewiseConstantFunction(std::vector<double> values)
      : values_(std::move(values)) {}

 private:
  std::vector<double> values_;
};

// A probability density on [0,1) that is constant on a grid of equal cells.
// Invariants: all values >= 0 and mean(values) = 1 within kMassTolerance.
class PiecewiseConstantDensity : public PiecewiseConstantFunction {
 public:
  static absl::StatusOr<PiecewiseConstantDensity> Create(
      std::vector<double> values);
  static PiecewiseConstantDensity Uniform(int64_t cell_count);

  int64_t level_count() const { return cell_count(); }

 private:
  explicit PiecewiseConstantDensity(std::vector<double> values)
      : PiecewiseConstantFunction(std::move(values)) {}
};

// A probability vector over d >= 1 classes; entries sum to 1 within
// kMassTolerance.
class ProbabilityVector {
 public:
  static absl::StatusOr<ProbabilityVector> Create(std::vector<double> probs);
  static ProbabilityVector Uniform(int64_t d);

  int64_t d() const { return static_cast<int64_t>(probs_.size()); }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](int64_t k) const { return probs_[k]; }

 private:
  explicit ProbabilityVector(std::vector<double> probs)
      : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

// Coefficients (alpha_{L,k})_k of a function on the scaled indicator family.
struct CoefficientVector {
  std::vector<double> coeffs;

  int64_t L() const { return static_cast<int64_t>(coeffs.size()); }
};

// phi_{L,k}(x) = sqrt(L) 1{x in [k/L, (k+1)/L)}.
absl::StatusOr<double> PhiEval(int64_t L, int64_t k, double x);

// psi_{L,k}(x) = sqrt(L) on the left half of cell k, -sqrt(L) on the right
// half, 0 elsewhere.
absl::StatusOr<double> PsiEval(int64_t L, int64_t k, double x);

// Index of the cell of width 1/L containing x in [0,1).
inline int64_t CellIndex(int64_t L, double x) {
  const int64_t k = static_cast<int64_t>(x * static_cast<double>(L));
  return k < L ? k : L - 1;
}

// Embeds p as the density taking value d p_k on cell k.
PiecewiseConstantDensity EmbedMultinomial(const ProbabilityVector& p);
// Inverse of EmbedMultinomial: p_k is the mass of cell k.
absl::StatusOr<ProbabilityVector> ExtractMultinomial(
    const PiecewiseConstantDensity& f);

// alpha_{L,k}(f) = integral of phi_{L,k} f, exact for piecewise-constant f.
// Requires L | cell_count or cell_count | L.
absl::StatusOr<CoefficientVector> Project(const PiecewiseConstantFunction& f,
                                          int64_t L);

// sum_k (alpha_{L,k}(f) - alpha_{L,k}(f0))^2, the squared norm of the
// projection of f - f0 onto span{phi_{L,k}}.
absl::StatusOr<double> ProjectionSqDistance(const PiecewiseConstantFunction& f,
                                            const PiecewiseConstantFunction& f0,
                                            int64_t L);

// f - f0 on the finer of the two grids; the grids must nest.
absl::StatusOr<PiecewiseConstantFunction> Difference(
    const PiecewiseConstantFunction& f, const PiecewiseConstantFunction& f0);

// Refines `f` onto a grid of `cell_count` cells; cell_count must be a
// multiple of f.cell_count().
absl::StatusOr<PiecewiseConstantFunction> Refine(
    const PiecewiseConstantFunction& f, int64_t cell_count);

// Haar detail energy sum_{k < 2^j} beta_{j,k}(g)^2 at level j. Requires
// 2^j <= g.cell_count().
absl::StatusOr<double> BesovSeminormLevel(const PiecewiseConstantFunction& g,
                                          int level);

// True iff every level j with 2^j <= g.cell_count() satisfies
// BesovSeminormLevel(g, j) <= R^2 2^{-2js}. Finer levels vanish exactly for
// piecewise-constant g. The Haar-based ball is used for every s > 0; it only
// matches the moduli-of-smoothness Besov space for s < 1.
bool BesovMembership(const PiecewiseConstantFunction& g, double s, double R);

// Inverse-CDF sampler for a piecewise-constant density.
class DensitySampler {
 public:
  explicit DensitySampler(const PiecewiseConstantDensity& f);

  // Maps u in (0,1) to a point of [0,1) distributed as f.
  double Sample(double u) const;
  // Maps u in (0,1) to a cell index distributed as the cell masses.
  int64_t SampleCell(double u) const;

 private:
  std::vector<double> cumulative_;  // cumulative_[k] = mass of cells < k+1
  std::vector<double> masses_;
  int64_t cell_count_;
};

}  // namespace privgof

#endif  // PRIVGOF_DYADIC_H_
