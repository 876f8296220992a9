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

// Command-line front end for the experiment harness and rate calculators.
//
//   privgof level --config grid.json --out results --format csv
//   privgof calc --n 10000 --alpha 0.5 --s 1
//
// Exit codes: 0 success, 2 bad configuration, 3 --check threshold failure,
// 1 anything else.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "privgof/experiment.h"
#include "privgof/parallel.h"
#include "privgof/rates.h"
#include "privgof/serialization.h"

namespace {

using ::privgof::ExperimentConfig;
using ::privgof::ExperimentKind;
using ::privgof::ExperimentRecord;
using ::privgof::ExperimentResult;
using ::privgof::Json;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCheck = 3;

struct RunFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int64_t> trials;
  std::optional<int> workers;
  std::string out = "results";
  std::string format = "csv";
  bool check = false;
  // calibrate only
  std::string fixture_path;
  std::string fixture_key;
};

int ExitFor(const absl::Status& status) {
  std::cerr << "privgof: " << status << "\n";
  if (absl::IsInvalidArgument(status) || absl::IsOutOfRange(status) ||
      absl::IsFailedPrecondition(status) || absl::IsNotFound(status)) {
    return kExitConfig;
  }
  return kExitFailure;
}

absl::StatusOr<Json> ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot read ", path));
  Json j = Json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, " is not valid JSON"));
  }
  return j;
}

absl::StatusOr<ExperimentConfig> LoadConfig(const RunFlags& flags,
                                            ExperimentKind kind) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) {
    auto j = ReadJsonFile(flags.config_path);
    if (!j.ok()) return j.status();
    auto parsed = privgof::ConfigFromJson(*j);
    if (!parsed.ok()) return parsed.status();
    config = *parsed;
  }
  config.kind = kind;
  if (flags.seed.has_value()) config.seed = *flags.seed;
  if (flags.trials.has_value()) config.trials = *flags.trials;
  config.workers = privgof::ResolveWorkers(flags.workers);
  if (auto status = config.Validate(); !status.ok()) return status;
  return config;
}

double Band(double p, int64_t trials) {
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

// Threshold checks applied by --check; returns failure descriptions.
std::vector<std::string> Check(const ExperimentResult& result) {
  std::vector<std::string> failures;
  auto level_ok = [&](const ExperimentRecord& r) {
    if (r.rate > r.gamma + Band(r.gamma, r.trials)) {
      failures.push_back(absl::StrCat("level ", r.rate, " > ", r.gamma,
                                      " + band at n=", r.n, " L=", r.L));
    }
  };
  auto power_ok = [&](const ExperimentRecord& r) {
    if (r.rate < 1.0 - r.beta - 3.0 * r.se) {
      failures.push_back(absl::StrCat("power ", r.rate, " < 1 - beta - 3 se at n=",
                                      r.n, " separation=", r.separation));
    }
  };
  switch (result.kind) {
    case ExperimentKind::kLevel:
      for (const auto& r : result.records) level_ok(r);
      break;
    case ExperimentKind::kPowerCurve:
    case ExperimentKind::kDiscrete:
    case ExperimentKind::kAdaptive:
      for (const auto& r : result.records) {
        if (r.epsilon == 0.0 && r.note.empty()) level_ok(r);
        if (r.note.find("constant") != std::string::npos) power_ok(r);
      }
      if (result.summary.count("monotone") && result.summary.at("monotone") < 1) {
        failures.push_back("power curve not monotone");
      }
      if (result.summary.count("min_u_gamma_times_levels_over_gamma") &&
          result.summary.at("min_u_gamma_times_levels_over_gamma") < 1.0) {
        failures.push_back("u_gamma below the Bonferroni floor");
      }
      if (result.summary.count("critical_increasing_in_d") &&
          result.summary.at("critical_increasing_in_d") < 1) {
        failures.push_back("critical distance not increasing in d");
      }
      break;
    case ExperimentKind::kRateRegression:
      if (!result.summary.count("slope_gap")) {
        failures.push_back("no slope fitted");
      } else if (result.summary.at("slope_gap") > 0.15) {
        failures.push_back(absl::StrCat("slope gap ", result.summary.at("slope_gap"),
                                        " > 0.15"));
      }
      for (const auto& r : result.records) {
        if (!r.note.empty()) failures.push_back("unbracketed grid point");
      }
      break;
    case ExperimentKind::kCalibrate:
      for (const auto& r : result.records) power_ok(r);
      break;
  }
  return failures;
}

absl::Status MergeFixture(const ExperimentResult& result,
                          const std::string& path, const std::string& key) {
  Json fixture = Json::object();
  if (std::ifstream probe(path); probe) {
    auto existing = ReadJsonFile(path);
    if (!existing.ok()) return existing.status();
    fixture = *existing;
  }
  Json entry = privgof::ConfigToJson(result.config);
  entry.erase("kind");
  entry["constant"] = result.summary.at("constant");
  entry["crossing"] = result.summary.at("constant_crossing");
  entry["pilot_power"] = result.records.front().rate;
  entry["version"] = result.version;
  fixture[key] = entry;
  std::ofstream out(path, std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << fixture.dump(2) << "\n";
  return absl::OkStatus();
}

int RunKind(ExperimentKind kind, const RunFlags& flags) {
  auto config = LoadConfig(flags, kind);
  if (!config.ok()) return ExitFor(config.status());
  privgof::OutputFormat format;
  if (flags.format == "csv") {
    format = privgof::OutputFormat::kCsv;
  } else if (flags.format == "json") {
    format = privgof::OutputFormat::kJson;
  } else {
    return ExitFor(absl::InvalidArgumentError("--format must be csv or json"));
  }
  auto result = privgof::RunExperiment(*config);
  if (!result.ok()) return ExitFor(result.status());
  auto path = privgof::Emit(*result, flags.out, format);
  if (!path.ok()) return ExitFor(path.status());
  std::cout << "wrote " << *path << "\n";
  for (const auto& [name, value] : result->summary) {
    std::cout << name << " = " << value << "\n";
  }
  for (const auto& warning : result->warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  if (kind == ExperimentKind::kCalibrate && !flags.fixture_path.empty()) {
    if (auto status = MergeFixture(*result, flags.fixture_path,
                                   flags.fixture_key.empty()
                                       ? std::string("constant")
                                       : flags.fixture_key);
        !status.ok()) {
      return ExitFor(status);
    }
  }
  if (flags.check) {
    const auto failures = Check(*result);
    for (const auto& failure : failures) std::cerr << "check failed: " << failure << "\n";
    if (!failures.empty()) return kExitCheck;
    std::cout << "check passed\n";
  }
  return kExitOk;
}

struct CalcFlags {
  int64_t n = 1000;
  double alpha = 1.0;
  double gamma = 0.05;
  double beta = 0.05;
  double s = 1.0;
  double R = 1.0;
  std::optional<int64_t> d;
  std::optional<int64_t> L;
};

int RunCalc(const CalcFlags& flags) {
  privgof::RateQuery q;
  q.n = flags.n;
  q.alpha = flags.alpha;
  q.gamma = flags.gamma;
  q.beta = flags.beta;
  q.s = flags.s;
  q.R = flags.R;
  q.d = flags.d;
  auto bounds = q.d.has_value() ? privgof::DiscreteRateBounds(q)
                                : privgof::ContinuousRateBounds(q);
  if (!bounds.ok()) return ExitFor(bounds.status());
  Json record = privgof::CalcRecord(q, *bounds);
  auto z = privgof::ZAlpha(q.alpha);
  if (!z.ok()) return ExitFor(z.status());
  record["z_alpha"] = *z;
  if (!q.d.has_value()) {
    const int64_t L = flags.L.value_or(
        privgof::SelectResolution(q.n, q.alpha, q.s).L);
    auto eps = privgof::IndistinguishableEpsilon(
        q.n, q.alpha, L, q.gamma, q.beta, privgof::SmoothnessBall{q.s, q.R});
    if (!eps.ok()) return ExitFor(eps.status());
    record["L"] = L;
    record["indistinguishable_epsilon"] = *eps;
  }
  std::cout << record.dump(2) << "\n";
  return kExitOk;
}

void AddRunFlags(CLI::App* app, RunFlags& flags) {
  app->add_option("--config", flags.config_path, "JSON experiment config");
  app->add_option("--seed", flags.seed, "master seed");
  app->add_option("--trials", flags.trials, "Monte Carlo trials per grid point");
  app->add_option("--workers", flags.workers,
                  "worker threads (default $PRIVGOF_WORKERS or 1)");
  app->add_option("--out", flags.out, "output directory");
  app->add_option("--format", flags.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app->add_flag("--check", flags.check, "exit 3 when a threshold check fails");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private goodness-of-fit testing experiments"};
  app.require_subcommand(1);

  RunFlags flags;
  struct Entry {
    const char* name;
    ExperimentKind kind;
    const char* help;
  };
  const Entry entries[] = {
      {"level", ExperimentKind::kLevel, "type-I error under f = f0"},
      {"power", ExperimentKind::kPowerCurve, "rejection rate against amplitude"},
      {"rate", ExperimentKind::kRateRegression, "critical separation against n"},
      {"discrete", ExperimentKind::kDiscrete, "multinomial experiments"},
      {"adaptive", ExperimentKind::kAdaptive, "multi-resolution test"},
      {"calibrate", ExperimentKind::kCalibrate, "fit a separation constant"},
  };
  std::vector<std::pair<CLI::App*, ExperimentKind>> runners;
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    AddRunFlags(sub, flags);
    if (e.kind == ExperimentKind::kCalibrate) {
      sub->add_option("--fixture", flags.fixture_path,
                      "merge the fitted constant into this JSON file");
      sub->add_option("--key", flags.fixture_key, "fixture entry name");
    }
    runners.emplace_back(sub, e.kind);
  }

  CalcFlags calc;
  CLI::App* calc_cmd = app.add_subcommand("calc", "rate kernels and epsilon bound");
  calc_cmd->add_option("--n", calc.n)->required();
  calc_cmd->add_option("--alpha", calc.alpha)->required();
  calc_cmd->add_option("--gamma", calc.gamma);
  calc_cmd->add_option("--beta", calc.beta);
  calc_cmd->add_option("--s", calc.s);
  calc_cmd->add_option("--R", calc.R);
  calc_cmd->add_option("--d", calc.d, "number of classes (discrete kernels)");
  calc_cmd->add_option("--L", calc.L, "resolution for the epsilon bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (calc_cmd->parsed()) return RunCalc(calc);
  for (const auto& [sub, kind] : runners) {
    if (sub->parsed()) return RunKind(kind, flags);
  }
  return kExitConfig;
}
