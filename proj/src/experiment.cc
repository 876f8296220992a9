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

#include "privgof/experiment.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privgof/adaptive.h"
#include "privgof/gof_test.h"
#include "privgof/parallel.h"
#include "privgof/random.h"
#include "privgof/rates.h"
#include "privgof/status_macros.h"

namespace privgof {
namespace {

struct GridPoint {
  int64_t n = 0;
  double alpha = 0.0;
  double s = 1.0;
  double R = 1.0;
  int64_t L = 1;
};

// Product of the n, alpha, s, R and L axes in that nesting order. An empty L
// axis resolves to L*(n, alpha, s).
std::vector<GridPoint> ContinuousGrid(const ExperimentConfig& c) {
  std::vector<GridPoint> out;
  for (int64_t n : c.n) {
    for (double alpha : c.alpha) {
      for (double s : c.s) {
        for (double R : c.R) {
          if (c.L.empty()) {
            out.push_back({n, alpha, s, R, SelectResolution(n, alpha, s).L});
          } else {
            for (int64_t L : c.L) out.push_back({n, alpha, s, R, L});
          }
        }
      }
    }
  }
  return out;
}

ExperimentRecord BaseRecord(const GridPoint& p, double gamma, double beta) {
  ExperimentRecord r;
  r.n = p.n;
  r.alpha = p.alpha;
  r.gamma = gamma;
  r.beta = beta;
  r.s = p.s;
  r.R = p.R;
  r.L = p.L;
  return r;
}

void AppendNote(ExperimentRecord& r, const std::string& note) {
  r.note = r.note.empty() ? note : absl::StrCat(r.note, ";", note);
}

void FillRate(ExperimentRecord& r, double rate, int64_t trials) {
  r.rate = rate;
  r.trials = trials;
  r.se = BinomialStandardError(rate, trials);
}

// Everything needed to simulate the test statistics of one grid point.
struct Rig {
  ChannelSpec spec;
  std::vector<CoefficientVector> alpha0;
  PiecewiseConstantDensity f0 = PiecewiseConstantDensity::Uniform(1);
  int64_t n = 0;
  uint64_t calibration_seed = 0;
  uint64_t trial_seed = 0;
  int workers = 1;

  int64_t levels() const { return spec.level_count(); }

  std::vector<double> Simulate(const PiecewiseConstantDensity& f,
                               int64_t count, uint64_t seed) const {
    return SimulateTrials(f, spec, alpha0, n, count, seed, workers);
  }
};

absl::StatusOr<Rig> MakeRig(ChannelSpec spec, PiecewiseConstantDensity f0,
                            int64_t n, uint64_t master, uint64_t grid_index,
                            int workers) {
  Rig rig;
  ASSIGN_OR_RETURN(rig.alpha0, LevelCoefficients(f0, spec));
  rig.spec = std::move(spec);
  rig.f0 = std::move(f0);
  rig.n = n;
  rig.calibration_seed = DeriveSeed(master, kSeedCalibration, grid_index);
  rig.trial_seed = DeriveSeed(master, kSeedTrial, grid_index);
  rig.workers = workers;
  return rig;
}

// Splits trial-major statistics into one column per level.
std::vector<std::vector<double>> ByLevel(const std::vector<double>& stats,
                                         int64_t levels) {
  const int64_t rows = static_cast<int64_t>(stats.size()) / levels;
  std::vector<std::vector<double>> out(levels, std::vector<double>(rows));
  for (int64_t t = 0; t < rows; ++t) {
    for (int64_t j = 0; j < levels; ++j) out[j][t] = stats[t * levels + j];
  }
  return out;
}

// Fraction of trials in which some level exceeds its threshold.
double FamilyRejectionRate(const std::vector<double>& stats,
                           const std::vector<double>& thresholds) {
  const int64_t levels = static_cast<int64_t>(thresholds.size());
  const int64_t rows = static_cast<int64_t>(stats.size()) / levels;
  if (rows == 0) return 0.0;
  int64_t rejections = 0;
  for (int64_t t = 0; t < rows; ++t) {
    for (int64_t j = 0; j < levels; ++j) {
      if (stats[t * levels + j] > thresholds[j]) {
        ++rejections;
        break;
      }
    }
  }
  return static_cast<double>(rejections) / static_cast<double>(rows);
}

// The alternative with |f - f0|_2 = rho for uniform f0.
absl::StatusOr<PiecewiseConstantDensity> AlternativeAt(
    AlternativeFamily family, int64_t L_alt, double rho) {
  if (rho == 0.0) return PiecewiseConstantDensity::Uniform(std::max<int64_t>(L_alt, 1));
  const double ll = static_cast<double>(L_alt);
  if (family == AlternativeFamily::kConcentration) {
    return GenerateConcentrationAlternative(L_alt, rho / ll);
  }
  AlternativeSpec spec;
  spec.L = L_alt;
  spec.epsilon = rho / ll;
  spec.eta = AlternatingSigns(L_alt);
  return GenerateAlternative(spec);
}

// Largest separation the family can reach at resolution L_alt.
double MaxSeparation(AlternativeFamily family, int64_t L_alt) {
  if (family == AlternativeFamily::kConcentration) {
    return MaxConcentrationEpsilon(L_alt) * static_cast<double>(L_alt);
  }
  return 1.0;
}

absl::StatusOr<int64_t> ResolveAlternativeL(const ExperimentConfig& c,
                                            int64_t test_L) {
  if (c.alternative_L.has_value()) return *c.alternative_L;
  if (c.family == AlternativeFamily::kConcentration) return test_L;
  if (test_L < 2) {
    return absl::InvalidArgumentError(
        "a Haar alternative needs a test resolution L >= 2");
  }
  return test_L / 2;
}

ExperimentResult NewResult(const ExperimentConfig& config) {
  ExperimentResult result;
  result.kind = config.kind;
  result.seed = config.seed;
  result.config = config;
  return result;
}

// Marks records of one curve that drop by more than three combined standard
// errors; returns false if any did.
bool FlagNonMonotone(std::vector<ExperimentRecord*>& curve) {
  std::sort(curve.begin(), curve.end(),
            [](const ExperimentRecord* a, const ExperimentRecord* b) {
              return a->epsilon < b->epsilon;
            });
  bool monotone = true;
  double best_rate = -1.0;
  double best_se = 0.0;
  for (ExperimentRecord* r : curve) {
    if (r->rate < best_rate - 3.0 * std::hypot(best_se, r->se)) {
      AppendNote(*r, "nonmonotone");
      monotone = false;
    }
    if (r->rate > best_rate) {
      best_rate = r->rate;
      best_se = r->se;
    }
  }
  return monotone;
}

}  // namespace

double RoundUpTwoDigits(double x) {
  if (!(x > 0.0)) return x;
  // Two significant digits as an integer mantissa times a power of ten;
  // dividing by 10^k keeps 3.9 from coming out as 3.9000000000000004.
  const int exponent = static_cast<int>(std::floor(std::log10(x))) - 1;
  const double power = std::pow(10.0, std::abs(exponent));
  auto scaled = [&](double m) { return exponent < 0 ? m / power : m * power; };
  const double unscaled = exponent < 0 ? x * power : x / power;
  double mantissa = std::ceil(unscaled - 1e-9);
  while (scaled(mantissa) < x) mantissa += 1.0;
  return scaled(mantissa);
}

const char* ExperimentKindName(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kLevel:
      return "level";
    case ExperimentKind::kPowerCurve:
      return "power";
    case ExperimentKind::kRateRegression:
      return "rate";
    case ExperimentKind::kDiscrete:
      return "discrete";
    case ExperimentKind::kAdaptive:
      return "adaptive";
    case ExperimentKind::kCalibrate:
      return "calibrate";
  }
  return "unknown";
}

absl::StatusOr<ExperimentKind> ParseExperimentKind(const std::string& name) {
  for (ExperimentKind kind :
       {ExperimentKind::kLevel, ExperimentKind::kPowerCurve,
        ExperimentKind::kRateRegression, ExperimentKind::kDiscrete,
        ExperimentKind::kAdaptive, ExperimentKind::kCalibrate}) {
    if (name == ExperimentKindName(kind)) return kind;
  }
  if (name == "power-curve") return ExperimentKind::kPowerCurve;
  if (name == "rate-regression") return ExperimentKind::kRateRegression;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown experiment kind '", name, "'"));
}

absl::Status ExperimentConfig::Validate() const {
  if (trials < kMinTrials) {
    return absl::InvalidArgumentError(
        absl::StrCat("trials must be >= ", kMinTrials, ", got ", trials));
  }
  if (workers < 1) return absl::InvalidArgumentError("workers must be >= 1");
  if (n.empty()) return absl::InvalidArgumentError("the n axis is empty");
  for (int64_t v : n) {
    if (v < 2) return absl::InvalidArgumentError("every n must be >= 2");
  }
  if (alpha.empty() && !(kind == ExperimentKind::kRateRegression &&
                         alpha_rule == AlphaRule::kClassical)) {
    return absl::InvalidArgumentError("the alpha axis is empty");
  }
  for (double v : alpha) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      return absl::InvalidArgumentError("every alpha must be finite and > 0");
    }
  }
  if (gamma.empty()) return absl::InvalidArgumentError("the gamma axis is empty");
  for (double v : gamma) {
    RETURN_IF_ERROR(ValidateCalibration(v, calibration_replicates));
  }
  for (double v : beta) {
    if (!(v > 0.0 && v < 1.0)) {
      return absl::InvalidArgumentError("every beta must lie in (0, 1)");
    }
  }
  if (s.empty() || R.empty()) {
    return absl::InvalidArgumentError("the s and R axes must be non-empty");
  }
  for (double v : s) {
    if (!(v > 0.0)) return absl::InvalidArgumentError("every s must be > 0");
  }
  for (double v : R) {
    if (!(v > 0.0)) return absl::InvalidArgumentError("every R must be > 0");
  }
  for (int64_t v : L) {
    if (v < 1 || (v & (v - 1)) != 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("every L must be a power of two, got ", v));
    }
  }
  for (int64_t v : d) {
    if (v < 2) return absl::InvalidArgumentError("every d must be >= 2");
  }
  for (double v : epsilons) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      return absl::InvalidArgumentError("epsilons must be finite and >= 0");
    }
  }
  if (alternative_L.has_value() &&
      (*alternative_L < 1 || (*alternative_L & (*alternative_L - 1)) != 0)) {
    return absl::InvalidArgumentError("alternative L must be a power of two");
  }
  if (constant.has_value() && !(*constant > 0.0)) {
    return absl::InvalidArgumentError("constant must be > 0");
  }
  if (max_level.has_value() && *max_level < 0) {
    return absl::InvalidArgumentError("max_level must be >= 0");
  }
  if (bisection_iterations < 1) {
    return absl::InvalidArgumentError("bisection_iterations must be >= 1");
  }
  if (!(u_tolerance > 0.0)) {
    return absl::InvalidArgumentError("u_tolerance must be > 0");
  }
  switch (kind) {
    case ExperimentKind::kRateRegression:
      if (n.size() < 4) {
        return absl::InvalidArgumentError(
            "a rate regression needs at least 4 values of n");
      }
      if (beta.empty()) return absl::InvalidArgumentError("beta is required");
      break;
    case ExperimentKind::kDiscrete:
      if (d.empty()) return absl::InvalidArgumentError("the d axis is empty");
      break;
    case ExperimentKind::kPowerCurve:
      if (epsilons.empty() && !constant.has_value()) {
        return absl::InvalidArgumentError(
            "a power curve needs epsilons or a constant");
      }
      break;
    case ExperimentKind::kCalibrate:
      if (beta.empty()) return absl::InvalidArgumentError("beta is required");
      if (target == CalibrationTarget::kDiscrete && d.empty()) {
        return absl::InvalidArgumentError("discrete calibration needs d");
      }
      break;
    default:
      break;
  }
  return absl::OkStatus();
}

double BinomialStandardError(double rate, int64_t trials) {
  if (trials <= 0) return 0.0;
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
}

double RejectionRate(std::span<const double> statistics, double threshold) {
  if (statistics.empty()) return 0.0;
  int64_t count = 0;
  for (double t : statistics) count += t > threshold ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(statistics.size());
}

std::vector<double> SimulateTrials(const PiecewiseConstantDensity& f,
                                   const ChannelSpec& spec,
                                   std::span<const CoefficientVector> alpha0,
                                   int64_t n, int64_t trials,
                                   uint64_t base_seed, int workers) {
  const DensitySampler sampler(f);
  const int64_t levels = static_cast<int64_t>(alpha0.size());
  std::vector<double> out(trials * levels);
  ParallelFor(trials, workers, [&](int64_t t) {
    const std::vector<double> stats = SimulateStatistics(
        sampler, spec, alpha0, n, DeriveSeed(base_seed, static_cast<uint64_t>(t)));
    std::copy(stats.begin(), stats.end(), out.begin() + t * levels);
  });
  return out;
}

BisectionResult BisectCrossing(const std::function<double(double)>& power,
                               double lo, double hi, double target,
                               int iterations) {
  BisectionResult out;
  out.lo = lo;
  out.hi = hi;
  out.power_lo = power(lo);
  out.power_hi = power(hi);
  out.bracketed = out.power_lo < target && out.power_hi >= target;
  if (!out.bracketed) return out;
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (out.lo + out.hi);
    const double p = power(mid);
    if (p >= target) {
      out.hi = mid;
      out.power_hi = p;
    } else {
      out.lo = mid;
      out.power_lo = p;
    }
    ++out.iterations;
  }
  return out;
}

double OlsSlope(std::span<const double> x, std::span<const double> y) {
  const size_t m = std::min(x.size(), y.size());
  if (m < 2) return std::nan("");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < m; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

absl::StatusOr<ExperimentResult> RunLevelExperiment(
    const ExperimentConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  ExperimentResult result = NewResult(config);
  const auto grid = ContinuousGrid(config);
  for (size_t g = 0; g < grid.size(); ++g) {
    const GridPoint& p = grid[g];
    ASSIGN_OR_RETURN(ChannelSpec spec, ChannelSpec::SingleLevel(p.alpha, p.L));
    ASSIGN_OR_RETURN(Rig rig, MakeRig(std::move(spec),
                                      PiecewiseConstantDensity::Uniform(p.L),
                                      p.n, config.seed, g, config.workers));
    const auto null = rig.Simulate(rig.f0, config.calibration_replicates,
                                   rig.calibration_seed);
    const auto trials = rig.Simulate(rig.f0, config.trials, rig.trial_seed);
    for (double gamma : config.gamma) {
      ASSIGN_OR_RETURN(NullCalibration cal, QuantileFromReplicates(null, gamma));
      ExperimentRecord r = BaseRecord(p, gamma, 0.0);
      FillRate(r, RejectionRate(trials, cal.threshold), config.trials);
      r.threshold = cal.threshold;
      result.records.push_back(std::move(r));
    }
  }
  double worst_excess = -1.0;
  for (const auto& r : result.records) {
    worst_excess = std::max(worst_excess, r.rate - r.gamma);
  }
  result.summary["max_rate_minus_gamma"] = worst_excess;
  return result;
}

absl::StatusOr<ExperimentResult> RunPowerCurve(const ExperimentConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  ExperimentResult result = NewResult(config);
  const double beta = config.beta.empty() ? 0.0 : config.beta.front();
  const auto grid = ContinuousGrid(config);
  bool monotone = true;
  for (size_t g = 0; g < grid.size(); ++g) {
    const GridPoint& p = grid[g];
    ASSIGN_OR_RETURN(ChannelSpec spec, ChannelSpec::SingleLevel(p.alpha, p.L));
    ASSIGN_OR_RETURN(Rig rig, MakeRig(std::move(spec),
                                      PiecewiseConstantDensity::Uniform(p.L),
                                      p.n, config.seed, g, config.workers));
    ASSIGN_OR_RETURN(int64_t L_alt, ResolveAlternativeL(config, p.L));

    // (epsilon, note) pairs for this grid point.
    std::vector<std::pair<double, std::string>> points;
    for (double eps : config.epsilons) points.emplace_back(eps, "");
    if (config.constant.has_value()) {
      ASSIGN_OR_RETURN(double rho_sq, UpperSeparationSquared(*config.constant,
                                                             p.n, p.alpha, p.L));
      points.emplace_back(std::sqrt(rho_sq) / static_cast<double>(L_alt),
                          "constant");
    }

    const auto null = rig.Simulate(rig.f0, config.calibration_replicates,
                                   rig.calibration_seed);
    std::vector<NullCalibration> calibrations;
    for (double gamma : config.gamma) {
      ASSIGN_OR_RETURN(NullCalibration cal, QuantileFromReplicates(null, gamma));
      calibrations.push_back(std::move(cal));
    }
    std::vector<std::vector<ExperimentRecord>> curves(config.gamma.size());
    for (const auto& [eps, note] : points) {
      const double rho = eps * static_cast<double>(L_alt);
      if (rho > MaxSeparation(config.family, L_alt) * (1.0 + 1e-12)) {
        result.warnings.push_back(absl::StrCat(
            "skipped infeasible alternative: n=", p.n, " alpha=", p.alpha,
            " L_alt=", L_alt, " epsilon=", eps));
        continue;
      }
      PiecewiseConstantDensity f = rig.f0;
      if (eps > 0.0) {
        ASSIGN_OR_RETURN(f, AlternativeAt(config.family, L_alt, rho));
      }
      const auto trials = rig.Simulate(f, config.trials, rig.trial_seed);
      for (size_t k = 0; k < config.gamma.size(); ++k) {
        ExperimentRecord r = BaseRecord(p, config.gamma[k], beta);
        r.epsilon = eps;
        r.separation = rho;
        FillRate(r, RejectionRate(trials, calibrations[k].threshold),
                 config.trials);
        r.threshold = calibrations[k].threshold;
        r.note = note;
        curves[k].push_back(std::move(r));
      }
    }
    for (auto& curve : curves) {
      std::vector<ExperimentRecord*> view;
      for (auto& r : curve) view.push_back(&r);
      monotone = FlagNonMonotone(view) && monotone;
      for (auto& r : curve) result.records.push_back(std::move(r));
    }
  }
  result.summary["monotone"] = monotone ? 1.0 : 0.0;
  if (!monotone) result.warnings.push_back("power curve is not monotone in epsilon");
  return result;
}

absl::StatusOr<ExperimentResult> RunRateRegression(
    const ExperimentConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  ExperimentResult result = NewResult(config);
  const double gamma = config.gamma.front();
  const double beta = config.beta.front();
  const double s = config.s.front();
  const double R = config.R.front();
  std::vector<double> log_n, log_rho, log_kernel;
  for (size_t g = 0; g < config.n.size(); ++g) {
    const int64_t n = config.n[g];
    const double alpha =
        config.alpha_rule == AlphaRule::kClassical
            ? 2.0 * std::pow(static_cast<double>(n), 0.2)
            : config.alpha.front();
    const int64_t L = SelectResolution(n, alpha, s).L;
    GridPoint p{n, alpha, s, R, L};
    ASSIGN_OR_RETURN(ChannelSpec spec, ChannelSpec::SingleLevel(alpha, L));
    ASSIGN_OR_RETURN(Rig rig, MakeRig(std::move(spec),
                                      PiecewiseConstantDensity::Uniform(L), n,
                                      config.seed, g, config.workers));
    ASSIGN_OR_RETURN(int64_t L_alt, ResolveAlternativeL(config, L));
    if (config.family == AlternativeFamily::kConcentration && L_alt < 2) {
      return absl::InvalidArgumentError(
          "concentration alternatives need L >= 2; raise n or alpha");
    }
    const auto null = rig.Simulate(rig.f0, config.calibration_replicates,
                                   rig.calibration_seed);
    ASSIGN_OR_RETURN(NullCalibration cal, QuantileFromReplicates(null, gamma));

    absl::Status failure = absl::OkStatus();
    auto power = [&](double rho) {
      auto f = AlternativeAt(config.family, L_alt, rho);
      if (!f.ok()) {
        failure.Update(f.status());
        return 0.0;
      }
      const auto trials = rig.Simulate(*f, config.trials, rig.trial_seed);
      return RejectionRate(trials, cal.threshold);
    };
    const BisectionResult b =
        BisectCrossing(power, 0.0, MaxSeparation(config.family, L_alt),
                       1.0 - beta, config.bisection_iterations);
    RETURN_IF_ERROR(failure);

    ExperimentRecord r = BaseRecord(p, gamma, beta);
    const double rho_star = b.Midpoint();
    r.separation = rho_star;
    r.epsilon = rho_star / static_cast<double>(L_alt);
    FillRate(r, b.power_hi, config.trials);
    r.threshold = cal.threshold;
    if (!b.bracketed) {
      AppendNote(r, "unbracketed");
      result.warnings.push_back(absl::StrCat(
          "bisection not bracketed at n=", n, ": power(hi)=", b.power_hi));
    } else {
      RateQuery q;
      q.n = n;
      q.alpha = alpha;
      q.gamma = gamma;
      q.beta = beta;
      q.s = s;
      q.R = R;
      ASSIGN_OR_RETURN(RateBounds kernel, ContinuousRateBounds(q));
      log_n.push_back(std::log(static_cast<double>(n)));
      log_rho.push_back(std::log(rho_star));
      log_kernel.push_back(std::log(kernel.upper));
    }
    result.records.push_back(std::move(r));
  }
  if (log_n.size() < 2) {
    result.warnings.push_back("fewer than two bracketed points; no slope fitted");
    return result;
  }
  const double fitted = OlsSlope(log_n, log_rho);
  const double predicted = OlsSlope(log_n, log_kernel);
  result.summary["fitted_slope"] = fitted;
  result.summary["predicted_slope"] = predicted;
  result.summary["slope_gap"] = std::abs(fitted - predicted);
  result.summary["points_used"] = static_cast<double>(log_n.size());
  return result;
}

namespace {

struct DiscretePoint {
  int64_t n = 0;
  double alpha = 0.0;
  int64_t d = 0;
};

absl::StatusOr<Rig> DiscreteRig(const DiscretePoint& p, uint64_t master,
                                uint64_t grid_index, int workers) {
  ASSIGN_OR_RETURN(ChannelSpec spec, ChannelSpec::SingleLevel(p.alpha, p.d));
  return MakeRig(std::move(spec), EmbedMultinomial(ProbabilityVector::Uniform(p.d)),
                 p.n, master, grid_index, workers);
}

double MaxMultinomialDistance(int64_t d) {
  return std::sqrt(static_cast<double>(d - 1) / static_cast<double>(d));
}

absl::StatusOr<PiecewiseConstantDensity> MultinomialAt(int64_t d,
                                                       double distance) {
  ASSIGN_OR_RETURN(ProbabilityVector p,
                   GenerateMultinomialAlternative(ProbabilityVector::Uniform(d),
                                                  distance));
  return EmbedMultinomial(p);
}

ExperimentRecord DiscreteRecord(const DiscretePoint& p, double gamma,
                                double beta) {
  ExperimentRecord r;
  r.n = p.n;
  r.alpha = p.alpha;
  r.gamma = gamma;
  r.beta = beta;
  r.d = p.d;
  r.L = p.d;
  return r;
}

}  // namespace

absl::StatusOr<ExperimentResult> RunDiscreteExperiment(
    const ExperimentConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  ExperimentResult result = NewResult(config);
  const double beta = config.beta.empty() ? 0.1 : config.beta.front();
  const bool bisect = config.epsilons.empty() && !config.constant.has_value();
  std::vector<DiscretePoint> grid;
  for (int64_t n : config.n) {
    for (double alpha : config.alpha) {
      for (int64_t d : config.d) grid.push_back({n, alpha, d});
    }
  }
  std::vector<double> critical(grid.size(), std::nan(""));
  for (size_t g = 0; g < grid.size(); ++g) {
    const DiscretePoint& p = grid[g];
    ASSIGN_OR_RETURN(Rig rig, DiscreteRig(p, config.seed, g, config.workers));
    const auto null = rig.Simulate(rig.f0, config.calibration_replicates,
                                   rig.calibration_seed);
    std::vector<NullCalibration> calibrations;
    for (double gamma : config.gamma) {
      ASSIGN_OR_RETURN(NullCalibration cal, QuantileFromReplicates(null, gamma));
      calibrations.push_back(std::move(cal));
    }
    const double max_distance = MaxMultinomialDistance(p.d);
    if (bisect) {
      absl::Status failure = absl::OkStatus();
      const double threshold = calibrations.front().threshold;
      auto power = [&](double distance) {
        auto f = MultinomialAt(p.d, distance);
        if (!f.ok()) {
          failure.Update(f.status());
          return 0.0;
        }
        return RejectionRate(rig.Simulate(*f, config.trials, rig.trial_seed),
                             threshold);
      };
      const BisectionResult b = BisectCrossing(
          power, 0.0, max_distance, 1.0 - beta, config.bisection_iterations);
      RETURN_IF_ERROR(failure);
      ExperimentRecord r = DiscreteRecord(p, config.gamma.front(), beta);
      r.separation = b.Midpoint();
      r.epsilon = r.separation;
      FillRate(r, b.power_hi, config.trials);
      r.threshold = threshold;
      if (b.bracketed) {
        critical[g] = r.separation;
      } else {
        AppendNote(r, "unbracketed");
        result.warnings.push_back(
            absl::StrCat("bisection not bracketed at d=", p.d));
      }
      result.records.push_back(std::move(r));
      continue;
    }
    std::vector<std::pair<double, std::string>> points;
    for (double eps : config.epsilons) points.emplace_back(eps, "");
    if (config.constant.has_value()) {
      points.emplace_back(DiscreteSeparation(*config.constant, p.n, p.d, p.alpha),
                          "constant");
    }
    for (const auto& [distance, note] : points) {
      if (distance > max_distance * (1.0 + 1e-12)) {
        result.warnings.push_back(absl::StrCat(
            "skipped infeasible alternative: d=", p.d, " distance=", distance));
        continue;
      }
      PiecewiseConstantDensity f = rig.f0;
      if (distance > 0.0) {
        ASSIGN_OR_RETURN(f, MultinomialAt(p.d, distance));
      }
      const auto trials = rig.Simulate(f, config.trials, rig.trial_seed);
      for (size_t k = 0; k < config.gamma.size(); ++k) {
        ExperimentRecord r = DiscreteRecord(p, config.gamma[k], beta);
        r.epsilon = distance;
        r.separation = distance;
        FillRate(r, RejectionRate(trials, calibrations[k].threshold),
                 config.trials);
        r.threshold = calibrations[k].threshold;
        r.note = note;
        result.records.push_back(std::move(r));
      }
    }
  }
  if (bisect) {
    // Direction check: at fixed (n, alpha) the critical distance should grow
    // with d while the private term dominates.
    bool increasing = true;
    for (size_t g = 1; g < grid.size(); ++g) {
      if (grid[g].n == grid[g - 1].n && grid[g].alpha == grid[g - 1].alpha &&
          grid[g].d > grid[g - 1].d && !(critical[g] > critical[g - 1])) {
        increasing = false;
      }
    }
    result.summary["critical_increasing_in_d"] = increasing ? 1.0 : 0.0;
  }
  return result;
}

absl::StatusOr<ExperimentResult> RunAdaptiveExperiment(
    const ExperimentConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  ExperimentResult result = NewResult(config);
  const double beta = config.beta.empty() ? 0.0 : config.beta.front();
  const double s = config.s.front();
  const int64_t L_alt = config.alternative_L.value_or(1);
  double min_u_ratio = std::numeric_limits<double>::infinity();
  double max_excess = -1.0;
  size_t g = 0;
  for (int64_t n : config.n) {
    for (double alpha : config.alpha) {
      ASSIGN_OR_RETURN(ChannelSpec spec,
                       ChannelSpec::MultiLevel(alpha, n, config.max_level));
      const int64_t top = spec.levels.back().resolution;
      ASSIGN_OR_RETURN(Rig rig, MakeRig(std::move(spec),
                                        PiecewiseConstantDensity::Uniform(top),
                                        n, config.seed, g, config.workers));
      if (!AdaptiveRateConditionHolds(n, alpha)) {
        result.warnings.push_back(absl::StrCat(
            "n alpha^2 < log(n)^{5/2} at n=", n, " alpha=", alpha,
            "; the adaptive rate guarantee does not apply"));
      }
      const auto null_by_level =
          ByLevel(rig.Simulate(rig.f0, config.calibration_replicates,
                               rig.calibration_seed),
                  rig.levels());
      std::vector<UGammaCalibration> calibrations;
      for (double gamma : config.gamma) {
        ASSIGN_OR_RETURN(UGammaCalibration cal,
                         FindUGamma(null_by_level, gamma, config.u_tolerance));
        min_u_ratio = std::min(
            min_u_ratio,
            cal.u_gamma * static_cast<double>(rig.levels()) / gamma);
        calibrations.push_back(std::move(cal));
      }
      std::vector<std::pair<double, std::string>> points;
      for (double eps : config.epsilons) points.emplace_back(eps, "");
      if (config.epsilons.empty()) points.emplace_back(0.0, "");
      if (config.constant.has_value()) {
        points.emplace_back(
            AdaptiveSeparation(*config.constant, n, alpha, s) /
                static_cast<double>(L_alt),
            "constant");
      }
      GridPoint p{n, alpha, s, config.R.front(), top};
      for (const auto& [eps, note] : points) {
        const double rho = eps * static_cast<double>(L_alt);
        if (rho > MaxSeparation(config.family, L_alt) * (1.0 + 1e-12)) {
          result.warnings.push_back(absl::StrCat(
              "skipped infeasible alternative: n=", n, " epsilon=", eps));
          continue;
        }
        PiecewiseConstantDensity f = rig.f0;
        if (eps > 0.0) {
          ASSIGN_OR_RETURN(f, AlternativeAt(config.family, L_alt, rho));
        }
        const auto trials = rig.Simulate(f, config.trials, rig.trial_seed);
        for (size_t k = 0; k < config.gamma.size(); ++k) {
          ExperimentRecord r = BaseRecord(p, config.gamma[k], beta);
          r.epsilon = eps;
          r.separation = rho;
          FillRate(r, FamilyRejectionRate(trials, calibrations[k].thresholds),
                   config.trials);
          r.threshold = calibrations[k].u_gamma;
          r.note = note;
          if (eps == 0.0) max_excess = std::max(max_excess, r.rate - r.gamma);
          result.records.push_back(std::move(r));
        }
      }
      ++g;
    }
  }
  result.summary["min_u_gamma_times_levels_over_gamma"] = min_u_ratio;
  if (max_excess > -1.0) result.summary["max_rate_minus_gamma"] = max_excess;
  return result;
}

absl::StatusOr<ExperimentResult> RunConstantCalibration(
    const ExperimentConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  ExperimentResult result = NewResult(config);
  const int64_t n = config.n.front();
  const double alpha = config.alpha.front();
  const double gamma = config.gamma.front();
  const double beta = config.beta.front();
  const double s = config.s.front();

  Rig rig;
  // Maps a constant to the separation and the alternative it induces.
  std::function<absl::StatusOr<PiecewiseConstantDensity>(double)> alternative;
  std::function<double(double)> separation;
  // |f - f0|_2 per unit of amplitude epsilon.
  double amplitude_scale = 1.0;
  std::vector<double> thresholds;
  double max_constant = 0.0;
  ExperimentRecord base;

  switch (config.target) {
    case CalibrationTarget::kContinuous: {
      const int64_t L =
          config.L.empty() ? SelectResolution(n, alpha, s).L : config.L.front();
      ASSIGN_OR_RETURN(ChannelSpec spec, ChannelSpec::SingleLevel(alpha, L));
      ASSIGN_OR_RETURN(rig, MakeRig(std::move(spec),
                                    PiecewiseConstantDensity::Uniform(L), n,
                                    config.seed, 0, config.workers));
      ASSIGN_OR_RETURN(int64_t L_alt, ResolveAlternativeL(config, L));
      const AlternativeFamily family = config.family;
      amplitude_scale = static_cast<double>(L_alt);
      separation = [=](double c) {
        auto rho_sq = UpperSeparationSquared(c, n, alpha, L);
        return rho_sq.ok() ? std::sqrt(*rho_sq) : 0.0;
      };
      alternative = [=](double c) {
        return AlternativeAt(family, L_alt, separation(c));
      };
      // Invert rho^2 = C (sqrt(1 + rho^2) + 1 + sigma^2) sqrt(L) / n at the
      // largest feasible rho.
      const double rho_max = MaxSeparation(family, L_alt);
      const double sigma = rig.spec.levels[0].noise_scale;
      max_constant = rho_max * rho_max * static_cast<double>(n) /
                     ((std::sqrt(1.0 + rho_max * rho_max) + 1.0 + sigma * sigma) *
                      std::sqrt(static_cast<double>(L)));
      base = BaseRecord({n, alpha, s, config.R.front(), L}, gamma, beta);
      break;
    }
    case CalibrationTarget::kDiscrete: {
      const DiscretePoint p{n, alpha, config.d.front()};
      ASSIGN_OR_RETURN(rig, DiscreteRig(p, config.seed, 0, config.workers));
      separation = [=](double c) { return DiscreteSeparation(c, n, p.d, alpha); };
      alternative = [=](double c) { return MultinomialAt(p.d, separation(c)); };
      max_constant = MaxMultinomialDistance(p.d) / DiscreteSeparation(1.0, n, p.d, alpha);
      base = DiscreteRecord(p, gamma, beta);
      break;
    }
    case CalibrationTarget::kAdaptive: {
      ASSIGN_OR_RETURN(ChannelSpec spec,
                       ChannelSpec::MultiLevel(alpha, n, config.max_level));
      const int64_t top = spec.levels.back().resolution;
      ASSIGN_OR_RETURN(rig, MakeRig(std::move(spec),
                                    PiecewiseConstantDensity::Uniform(top), n,
                                    config.seed, 0, config.workers));
      const int64_t L_alt = config.alternative_L.value_or(1);
      const AlternativeFamily family = config.family;
      amplitude_scale = static_cast<double>(L_alt);
      separation = [=](double c) { return AdaptiveSeparation(c, n, alpha, s); };
      alternative = [=](double c) {
        return AlternativeAt(family, L_alt, separation(c));
      };
      max_constant =
          MaxSeparation(family, L_alt) / AdaptiveSeparation(1.0, n, alpha, s);
      base = BaseRecord({n, alpha, s, config.R.front(), top}, gamma, beta);
      break;
    }
  }

  const auto null = rig.Simulate(rig.f0, config.calibration_replicates,
                                 rig.calibration_seed);
  if (config.target == CalibrationTarget::kAdaptive) {
    ASSIGN_OR_RETURN(UGammaCalibration cal,
                     FindUGamma(ByLevel(null, rig.levels()), gamma,
                                config.u_tolerance));
    thresholds = cal.thresholds;
    base.threshold = cal.u_gamma;
  } else {
    ASSIGN_OR_RETURN(NullCalibration cal, QuantileFromReplicates(null, gamma));
    thresholds = {cal.threshold};
    base.threshold = cal.threshold;
  }

  absl::Status failure = absl::OkStatus();
  auto power = [&](double c) {
    if (c == 0.0) {
      return FamilyRejectionRate(
          rig.Simulate(rig.f0, config.trials, rig.trial_seed), thresholds);
    }
    auto f = alternative(c);
    if (!f.ok()) {
      failure.Update(f.status());
      return 0.0;
    }
    return FamilyRejectionRate(rig.Simulate(*f, config.trials, rig.trial_seed),
                               thresholds);
  };
  const BisectionResult b = BisectCrossing(power, 0.0, max_constant, 1.0 - beta,
                                           config.bisection_iterations);
  RETURN_IF_ERROR(failure);
  if (!b.bracketed) {
    return absl::FailedPreconditionError(absl::StrCat(
        "no feasible constant reaches power ", 1.0 - beta,
        "; power at the feasibility limit is ", b.power_hi));
  }
  double pinned = RoundUpTwoDigits(b.hi);
  if (pinned > max_constant) pinned = b.hi;
  const double pinned_power = power(pinned);
  RETURN_IF_ERROR(failure);

  ExperimentRecord r = base;
  r.separation = separation(pinned);
  r.epsilon = r.separation / amplitude_scale;
  FillRate(r, pinned_power, config.trials);
  r.note = "pinned";
  result.records.push_back(std::move(r));
  result.summary["constant"] = pinned;
  result.summary["constant_crossing"] = b.Midpoint();
  result.summary["max_constant"] = max_constant;
  return result;
}

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::kLevel:
      return RunLevelExperiment(config);
    case ExperimentKind::kPowerCurve:
      return RunPowerCurve(config);
    case ExperimentKind::kRateRegression:
      return RunRateRegression(config);
    case ExperimentKind::kDiscrete:
      return RunDiscreteExperiment(config);
    case ExperimentKind::kAdaptive:
      return RunAdaptiveExperiment(config);
    case ExperimentKind::kCalibrate:
      return RunConstantCalibration(config);
  }
  return absl::InvalidArgumentError("unknown experiment kind");
}

}  // namespace privgof
