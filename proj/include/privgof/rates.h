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

#ifndef PRIVGOF_RATES_H_
#define PRIVGOF_RATES_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "privgof/dyadic.h"

namespace privgof {

// z_alpha = e^{2 alpha} - e^{-2 alpha} = 2 sinh(2 alpha); alpha >= 0.
absl::StatusOr<double> ZAlpha(double alpha);

struct RateQuery {
  int64_t n = 1;
  double alpha = 1.0;
  double gamma = 0.05;
  double beta = 0.05;
  double s = 1.0;
  double R = 1.0;
  // Number of classes for discrete queries.
  std::optional<int64_t> d;

  absl::Status Validate() const;
};

// Constant-free rate kernels; the unknown constants c, C are not included.
struct RateBounds {
  double lower = 0.0;
  double upper = 0.0;
};

// lower = (n z_alpha^2)^{-2s/(4s+3)} v n^{-2s/(4s+1)},
// upper = (n alpha^2)^{-2s/(4s+3)} v n^{-2s/(4s+1)}.
absl::StatusOr<RateBounds> ContinuousRateBounds(const RateQuery& q);

// Kernels for rho / sqrt(d): (n z^2)^{-1/2} d^{1/4} v n^{-1/2} d^{-1/4} and
// the same with alpha^2 in place of z^2. Needs d >= 2.
absl::StatusOr<RateBounds> DiscreteRateBounds(const RateQuery& q);

struct SmoothnessBall {
  double s = 1.0;
  double R = 1.0;
};

// Largest amplitude certified by the lower-bound construction: the minimum of
//   (n z^2)^{-1/2} (log[1 + 4(1-2gamma-beta)^2] / L)^{1/4},
//   L^{-1} / sqrt(2 log(2L/gamma)),
// and, when a ball is given, L^{-1} (1 ^ R L^{-s}) / sqrt(2 log(2L/gamma)).
// Requires 2 gamma + beta < 1.
absl::StatusOr<double> IndistinguishableEpsilon(
    int64_t n, double alpha, int64_t L, double gamma, double beta,
    std::optional<SmoothnessBall> ball = std::nullopt);

// f_eta = f0 + epsilon sqrt(L) sum_k eta_k psi_{L,k} for uniform f0.
struct AlternativeSpec {
  int64_t L = 1;
  double epsilon = 0.0;
  std::vector<int> eta;  // L signs in {-1, +1}
  PiecewiseConstantDensity f0 = PiecewiseConstantDensity::Uniform(1);

  absl::Status Validate() const;
};

// Alternating signs (+1, -1, +1, ...).
std::vector<int> AlternatingSigns(int64_t L);

// Density with values 1 +- epsilon L on half-cells, on a grid of
// max(2L, f0 cells) cells. Fails when epsilon L > 1.
absl::StatusOr<PiecewiseConstantDensity> GenerateAlternative(
    const AlternativeSpec& spec);

// Mass-concentration alternative on an L-cell grid (L >= 2):
// f = 1 + epsilon L (L 1_{cell 0} - 1) / sqrt(L - 1), so that
// |f - 1|_2 = epsilon L. Feasible while epsilon L <= sqrt(L - 1).
absl::StatusOr<PiecewiseConstantDensity> GenerateConcentrationAlternative(
    int64_t L, double epsilon);

// Largest epsilon accepted by GenerateConcentrationAlternative.
double MaxConcentrationEpsilon(int64_t L);

// p = (1 - t) p0 + t e_0 with t chosen so that |p - p0|_2 = l2_distance.
absl::StatusOr<ProbabilityVector> GenerateMultinomialAlternative(
    const ProbabilityVector& p0, double l2_distance);

// Squared separation rho^2 solving
//   rho^2 = C (|f|_2 + |f0|_2 + sigma_L^2) sqrt(L) / n
// for uniform f0 and an alternative fully captured at resolution L, where
// |f|_2 = sqrt(1 + rho^2).
absl::StatusOr<double> UpperSeparationSquared(double constant, int64_t n,
                                              double alpha, int64_t L);

// C n^{-1/2} (1 v d^{1/4} / alpha): the l2 distance |p - p0|_2 at which the
// multinomial test has power 1 - beta.
double DiscreteSeparation(double constant, int64_t n, int64_t d, double alpha);

// C [(n alpha^2 / log^{5/2} n)^{-2s/(4s+3)} v (n / sqrt(log n))^{-2s/(4s+1)}].
double AdaptiveSeparation(double constant, int64_t n, double alpha, double s);

}  // namespace privgof

#endif  // PRIVGOF_RATES_H_
