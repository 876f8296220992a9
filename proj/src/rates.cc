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

#include "privgof/rates.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privgof/channel.h"
#include "privgof/status_macros.h"

namespace privgof {

absl::StatusOr<double> ZAlpha(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must be finite and >= 0, got ", alpha));
  }
  return 2.0 * std::sinh(2.0 * alpha);
}

absl::Status RateQuery::Validate() const {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (!(alpha > 0.0)) return absl::InvalidArgumentError("alpha must be > 0");
  if (!(s > 0.0)) return absl::InvalidArgumentError("s must be > 0");
  if (!(R > 0.0)) return absl::InvalidArgumentError("R must be > 0");
  if (!(gamma > 0.0 && gamma < 1.0) || !(beta > 0.0 && beta < 1.0)) {
    return absl::InvalidArgumentError("gamma and beta must lie in (0, 1)");
  }
  return absl::OkStatus();
}

absl::StatusOr<RateBounds> ContinuousRateBounds(const RateQuery& q) {
  RETURN_IF_ERROR(q.Validate());
  ASSIGN_OR_RETURN(double z, ZAlpha(q.alpha));
  const double n = static_cast<double>(q.n);
  const double private_exponent = -2.0 * q.s / (4.0 * q.s + 3.0);
  const double classical = std::pow(n, -2.0 * q.s / (4.0 * q.s + 1.0));
  RateBounds out;
  out.lower = std::max(std::pow(n * z * z, private_exponent), classical);
  out.upper =
      std::max(std::pow(n * q.alpha * q.alpha, private_exponent), classical);
  return out;
}

absl::StatusOr<RateBounds> DiscreteRateBounds(const RateQuery& q) {
  RETURN_IF_ERROR(q.Validate());
  if (!q.d.has_value() || *q.d < 2) {
    return absl::InvalidArgumentError("discrete rates need d >= 2");
  }
  ASSIGN_OR_RETURN(double z, ZAlpha(q.alpha));
  const double n = static_cast<double>(q.n);
  const double d = static_cast<double>(*q.d);
  const double classical = std::pow(n, -0.5) * std::pow(d, -0.25);
  RateBounds out;
  out.lower = std::max(std::pow(n * z * z, -0.5) * std::pow(d, 0.25), classical);
  out.upper = std::max(
      std::pow(n * q.alpha * q.alpha, -0.5) * std::pow(d, 0.25), classical);
  return out;
}

absl::StatusOr<double> IndistinguishableEpsilon(
    int64_t n, double alpha, int64_t L, double gamma, double beta,
    std::optional<SmoothnessBall> ball) {
  if (!(gamma > 0.0 && beta > 0.0) || !(2.0 * gamma + beta < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "the lower bound needs 2 gamma + beta < 1, got gamma=", gamma,
        ", beta=", beta));
  }
  if (n < 1 || L < 1) {
    return absl::InvalidArgumentError("n and L must be >= 1");
  }
  ASSIGN_OR_RETURN(double z, ZAlpha(alpha));
  if (!(z > 0.0)) return absl::InvalidArgumentError("alpha must be > 0");
  const double ll = static_cast<double>(L);
  const double slack = 1.0 - 2.0 * gamma - beta;
  const double information =
      std::pow(static_cast<double>(n) * z * z, -0.5) *
      std::pow(std::log(1.0 + 4.0 * slack * slack) / ll, 0.25);
  const double spread = std::sqrt(2.0 * std::log(2.0 * ll / gamma));
  double feasibility = (1.0 / ll) / spread;
  if (ball.has_value()) {
    feasibility = (1.0 / ll) *
                  std::min(1.0, ball->R * std::pow(ll, -ball->s)) / spread;
  }
  return std::min(information, feasibility);
}

absl::Status AlternativeSpec::Validate() const {
  if (L < 1) return absl::InvalidArgumentError("L must be >= 1");
  if ((L & (L - 1)) != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("L must be a power of two, got ", L));
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError("epsilon must be finite and >= 0");
  }
  if (static_cast<int64_t>(eta.size()) != L) {
    return absl::InvalidArgumentError(
        absl::StrCat("eta has ", eta.size(), " signs, expected ", L));
  }
  for (int sign : eta) {
    if (sign != 1 && sign != -1) {
      return absl::InvalidArgumentError("eta entries must be +1 or -1");
    }
  }
  for (double v : f0.values()) {
    if (v != 1.0) {
      return absl::InvalidArgumentError("the alternative needs a uniform f0");
    }
  }
  if (epsilon * static_cast<double>(L) > 1.0 + 1e-12) {
    return absl::OutOfRangeError(absl::StrCat(
        "epsilon L = ", epsilon * L, " > 1: the alternative is not a density"));
  }
  return absl::OkStatus();
}

std::vector<int> AlternatingSigns(int64_t L) {
  std::vector<int> eta(std::max<int64_t>(L, 0));
  for (int64_t k = 0; k < L; ++k) eta[k] = (k % 2 == 0) ? 1 : -1;
  return eta;
}

absl::StatusOr<PiecewiseConstantDensity> GenerateAlternative(
    const AlternativeSpec& spec) {
  RETURN_IF_ERROR(spec.Validate());
  const int64_t cells = std::max(2 * spec.L, spec.f0.cell_count());
  if (cells % (2 * spec.L) != 0 || cells % spec.f0.cell_count() != 0) {
    return absl::FailedPreconditionError(
        "f0 grid does not nest with the alternative's half-cells");
  }
  const int64_t per_half = cells / (2 * spec.L);
  const double bump = std::min(spec.epsilon * static_cast<double>(spec.L), 1.0);
  std::vector<double> values(cells, 1.0);
  for (int64_t c = 0; c < cells; ++c) {
    const int64_t half = c / per_half;
    const double sign = spec.eta[half / 2] * (half % 2 == 0 ? 1.0 : -1.0);
    values[c] = 1.0 + sign * bump;
  }
  return PiecewiseConstantDensity::Create(std::move(values));
}

double MaxConcentrationEpsilon(int64_t L) {
  if (L < 2) return 0.0;
  const double ll = static_cast<double>(L);
  return std::sqrt(ll - 1.0) / ll;
}

absl::StatusOr<PiecewiseConstantDensity> GenerateConcentrationAlternative(
    int64_t L, double epsilon) {
  if (L < 2) {
    return absl::InvalidArgumentError("concentration alternatives need L >= 2");
  }
  if (!(epsilon >= 0.0) || epsilon > MaxConcentrationEpsilon(L) * (1.0 + 1e-12)) {
    return absl::OutOfRangeError(absl::StrCat(
        "epsilon ", epsilon, " outside [0, ", MaxConcentrationEpsilon(L),
        "]: the alternative is not a density"));
  }
  const double ll = static_cast<double>(L);
  const double weight =
      std::min(epsilon * ll / std::sqrt(ll - 1.0), 1.0);  // mixture weight
  std::vector<double> values(L, 1.0 - weight);
  values[0] = 1.0 - weight + weight * ll;
  // Renormalize the rounding of the mean to keep the unit-mass invariant tight.
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / ll;
  for (double& v : values) v /= mean;
  return PiecewiseConstantDensity::Create(std::move(values));
}

absl::StatusOr<ProbabilityVector> GenerateMultinomialAlternative(
    const ProbabilityVector& p0, double l2_distance) {
  double norm = 0.0;
  for (int64_t k = 0; k < p0.d(); ++k) {
    const double diff = (k == 0 ? 1.0 : 0.0) - p0[k];
    norm += diff * diff;
  }
  norm = std::sqrt(norm);
  if (!(l2_distance >= 0.0) || l2_distance > norm * (1.0 + 1e-12)) {
    return absl::OutOfRangeError(absl::StrCat(
        "l2 distance ", l2_distance, " exceeds the reachable maximum ", norm));
  }
  const double t = norm > 0.0 ? std::min(l2_distance / norm, 1.0) : 0.0;
  std::vector<double> probs(p0.d());
  double sum = 0.0;
  for (int64_t k = 0; k < p0.d(); ++k) {
    probs[k] = (1.0 - t) * p0[k] + (k == 0 ? t : 0.0);
    sum += probs[k];
  }
  for (double& p : probs) p /= sum;
  return ProbabilityVector::Create(std::move(probs));
}

absl::StatusOr<double> UpperSeparationSquared(double constant, int64_t n,
                                              double alpha, int64_t L) {
  if (!(constant >= 0.0) || n < 1) {
    return absl::InvalidArgumentError("need constant >= 0 and n >= 1");
  }
  ASSIGN_OR_RETURN(double sigma, LaplaceScaleFor(alpha, L));
  const double scale =
      constant * std::sqrt(static_cast<double>(L)) / static_cast<double>(n);
  // rho^2 -> scale (sqrt(1 + rho^2) + 1 + sigma^2) is a contraction for
  // scale < 2; iterate from the rho = 0 value.
  double rho_sq = scale * (2.0 + sigma * sigma);
  for (int iteration = 0; iteration < 200; ++iteration) {
    const double next = scale * (std::sqrt(1.0 + rho_sq) + 1.0 + sigma * sigma);
    if (std::abs(next - rho_sq) <= 1e-15 * next) {
      rho_sq = next;
      break;
    }
    rho_sq = next;
  }
  return rho_sq;
}

double DiscreteSeparation(double constant, int64_t n, int64_t d, double alpha) {
  return constant / std::sqrt(static_cast<double>(n)) *
         std::max(1.0, std::pow(static_cast<double>(d), 0.25) / alpha);
}

double AdaptiveSeparation(double constant, int64_t n, double alpha, double s) {
  const double nn = static_cast<double>(n);
  const double log_n = std::log(nn);
  const double private_term = std::pow(nn * alpha * alpha / std::pow(log_n, 2.5),
                                       -2.0 * s / (4.0 * s + 3.0));
  const double classical_term =
      std::pow(nn / std::sqrt(log_n), -2.0 * s / (4.0 * s + 1.0));
  return constant * std::max(private_term, classical_term);
}

}  // namespace privgof
