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

#include "privgof/serialization.h"

#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privgof/status_macros.h"

namespace privgof {
namespace {

// Runs `fn` and converts nlohmann type or key errors into InvalidArgument.
template <typename Fn>
auto Guard(const char* what, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed ", what, " JSON: ", e.what()));
  }
}

}  // namespace

Json DensityToJson(const PiecewiseConstantDensity& f) {
  return Json{{"level_count", f.level_count()}, {"values", f.values()}};
}

absl::StatusOr<PiecewiseConstantDensity> DensityFromJson(const Json& j) {
  return Guard("density", [&]() -> absl::StatusOr<PiecewiseConstantDensity> {
    auto values = j.at("values").get<std::vector<double>>();
    if (j.contains("level_count") &&
        j.at("level_count").get<int64_t>() !=
            static_cast<int64_t>(values.size())) {
      return absl::InvalidArgumentError("level_count does not match values");
    }
    return PiecewiseConstantDensity::Create(std::move(values));
  });
}

Json ProbabilityVectorToJson(const ProbabilityVector& p) {
  return Json{{"d", p.d()}, {"probs", p.probs()}};
}

absl::StatusOr<ProbabilityVector> ProbabilityVectorFromJson(const Json& j) {
  return Guard("probability vector", [&]() -> absl::StatusOr<ProbabilityVector> {
    auto probs = j.at("probs").get<std::vector<double>>();
    if (j.contains("d") &&
        j.at("d").get<int64_t>() != static_cast<int64_t>(probs.size())) {
      return absl::InvalidArgumentError("d does not match probs");
    }
    return ProbabilityVector::Create(std::move(probs));
  });
}

Json ChannelSpecToJson(const ChannelSpec& spec) {
  Json levels = Json::array();
  for (const ChannelLevel& level : spec.levels) {
    levels.push_back(Json{{"L", level.resolution},
                          {"J", level.exponent},
                          {"noise_scale", level.noise_scale}});
  }
  return Json{{"alpha", spec.alpha},
              {"mode", spec.mode == ChannelMode::kSingleLevel ? "single"
                                                              : "multi"},
              {"levels", std::move(levels)}};
}

absl::StatusOr<ChannelSpec> ChannelSpecFromJson(const Json& j) {
  return Guard("channel", [&]() -> absl::StatusOr<ChannelSpec> {
    ChannelSpec spec;
    spec.alpha = j.at("alpha").get<double>();
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "single") {
      spec.mode = ChannelMode::kSingleLevel;
    } else if (mode == "multi") {
      spec.mode = ChannelMode::kMultiLevel;
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown mode ", mode));
    }
    for (const Json& level : j.at("levels")) {
      spec.levels.push_back(ChannelLevel{level.at("L").get<int64_t>(),
                                         level.at("J").get<int>(),
                                         level.at("noise_scale").get<double>()});
    }
    RETURN_IF_ERROR(spec.Validate());
    return spec;
  });
}

Json PrivatizedSampleToJson(const PrivatizedSample& z) {
  Json levels = Json::array();
  for (const ChannelLevel& level : z.channel.levels) {
    levels.push_back(level.resolution);
  }
  return Json{{"n", z.n},
              {"levels", std::move(levels)},
              {"matrices", z.matrices},
              {"channel", ChannelSpecToJson(z.channel)},
              {"seed", z.seed}};
}

absl::StatusOr<PrivatizedSample> PrivatizedSampleFromJson(const Json& j) {
  return Guard("privatized sample", [&]() -> absl::StatusOr<PrivatizedSample> {
    PrivatizedSample z;
    z.n = j.at("n").get<int64_t>();
    ASSIGN_OR_RETURN(z.channel, ChannelSpecFromJson(j.at("channel")));
    z.seed = j.at("seed").get<uint64_t>();
    z.matrices = j.at("matrices").get<std::vector<std::vector<double>>>();
    RETURN_IF_ERROR(z.Validate());
    return z;
  });
}

Json TestReportToJson(const TestReport& r) {
  return Json{{"statistic", r.statistic},
              {"threshold", r.threshold},
              {"reject", r.reject},
              {"L", r.L},
              {"gamma", r.gamma},
              {"B", r.calibration_replicates},
              {"seed", r.seed},
              {"order_index", r.order_index}};
}

absl::StatusOr<TestReport> TestReportFromJson(const Json& j) {
  return Guard("test report", [&]() -> absl::StatusOr<TestReport> {
    TestReport r;
    r.statistic = j.at("statistic").get<double>();
    r.threshold = j.at("threshold").get<double>();
    r.reject = j.at("reject").get<bool>();
    r.L = j.at("L").get<int64_t>();
    r.gamma = j.at("gamma").get<double>();
    r.calibration_replicates = j.at("B").get<int64_t>();
    r.seed = j.at("seed").get<uint64_t>();
    r.order_index = j.at("order_index").get<int64_t>();
    return r;
  });
}

Json AdaptiveReportToJson(const AdaptiveReport& r) {
  Json statistics = Json::object();
  Json thresholds = Json::object();
  Json bonferroni = Json::object();
  for (size_t i = 0; i < r.levels.size(); ++i) {
    const std::string key = std::to_string(r.levels[i]);
    statistics[key] = r.statistics[i];
    thresholds[key] = r.thresholds[i];
    bonferroni[key] = r.bonferroni_thresholds[i];
  }
  return Json{{"levels", r.levels},
              {"statistics", std::move(statistics)},
              {"thresholds", std::move(thresholds)},
              {"bonferroni_thresholds", std::move(bonferroni)},
              {"u_gamma", r.u_gamma},
              {"reject", r.reject},
              {"gamma", r.gamma},
              {"B", r.calibration_replicates},
              {"seed", r.seed},
              {"order_index", r.order_index},
              {"warnings", r.warnings}};
}

absl::StatusOr<AdaptiveReport> AdaptiveReportFromJson(const Json& j) {
  return Guard("adaptive report", [&]() -> absl::StatusOr<AdaptiveReport> {
    AdaptiveReport r;
    r.levels = j.at("levels").get<std::vector<int>>();
    for (int level : r.levels) {
      const std::string key = std::to_string(level);
      r.statistics.push_back(j.at("statistics").at(key).get<double>());
      r.thresholds.push_back(j.at("thresholds").at(key).get<double>());
      r.bonferroni_thresholds.push_back(
          j.at("bonferroni_thresholds").at(key).get<double>());
    }
    r.u_gamma = j.at("u_gamma").get<double>();
    r.reject = j.at("reject").get<bool>();
    r.gamma = j.at("gamma").get<double>();
    r.calibration_replicates = j.at("B").get<int64_t>();
    r.seed = j.at("seed").get<uint64_t>();
    r.order_index = j.at("order_index").get<int64_t>();
    r.warnings = j.value("warnings", std::vector<std::string>{});
    return r;
  });
}

Json RateQueryToJson(const RateQuery& q) {
  Json j{{"n", q.n},         {"alpha", q.alpha}, {"gamma", q.gamma},
         {"beta", q.beta},   {"s", q.s},         {"R", q.R}};
  if (q.d.has_value()) j["d"] = *q.d;
  return j;
}

absl::StatusOr<RateQuery> RateQueryFromJson(const Json& j) {
  return Guard("rate query", [&]() -> absl::StatusOr<RateQuery> {
    RateQuery q;
    q.n = j.at("n").get<int64_t>();
    q.alpha = j.at("alpha").get<double>();
    q.gamma = j.value("gamma", q.gamma);
    q.beta = j.value("beta", q.beta);
    q.s = j.value("s", q.s);
    q.R = j.value("R", q.R);
    if (j.contains("d")) q.d = j.at("d").get<int64_t>();
    RETURN_IF_ERROR(q.Validate());
    return q;
  });
}

Json CalcRecord(const RateQuery& q, const RateBounds& b) {
  return Json{{"query", RateQueryToJson(q)},
              {"lower_kernel", b.lower},
              {"upper_kernel", b.upper}};
}

}  // namespace privgof
