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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "privgof/experiment.h"
#include "privgof/status_macros.h"

namespace privgof {
namespace {

std::string Num(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

// RFC 4180 quoting for the free-text note column.
std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

const char* FamilyName(AlternativeFamily family) {
  return family == AlternativeFamily::kHaar ? "haar" : "concentration";
}

const char* TargetName(CalibrationTarget target) {
  switch (target) {
    case CalibrationTarget::kContinuous:
      return "continuous";
    case CalibrationTarget::kDiscrete:
      return "discrete";
    case CalibrationTarget::kAdaptive:
      return "adaptive";
  }
  return "continuous";
}

Json RecordToJson(const ExperimentRecord& r) {
  return Json{{"n", r.n},         {"alpha", r.alpha},
              {"gamma", r.gamma}, {"beta", r.beta},
              {"s", r.s},         {"R", r.R},
              {"d", r.d},         {"L", r.L},
              {"epsilon", r.epsilon}, {"rate", r.rate},
              {"se", r.se},       {"trials", r.trials},
              {"separation", r.separation}, {"threshold", r.threshold},
              {"note", r.note}};
}

ExperimentRecord RecordFromJson(const Json& j) {
  ExperimentRecord r;
  r.n = j.at("n").get<int64_t>();
  r.alpha = j.at("alpha").get<double>();
  r.gamma = j.at("gamma").get<double>();
  r.beta = j.at("beta").get<double>();
  r.s = j.at("s").get<double>();
  r.R = j.at("R").get<double>();
  r.d = j.at("d").get<int64_t>();
  r.L = j.at("L").get<int64_t>();
  r.epsilon = j.at("epsilon").get<double>();
  r.rate = j.at("rate").get<double>();
  r.se = j.at("se").get<double>();
  r.trials = j.at("trials").get<int64_t>();
  r.separation = j.at("separation").get<double>();
  r.threshold = j.at("threshold").get<double>();
  r.note = j.at("note").get<std::string>();
  return r;
}

}  // namespace

Json ConfigToJson(const ExperimentConfig& c) {
  Json j{{"kind", ExperimentKindName(c.kind)},
         {"n", c.n},
         {"alpha", c.alpha},
         {"gamma", c.gamma},
         {"beta", c.beta},
         {"s", c.s},
         {"R", c.R},
         {"d", c.d},
         {"L", c.L},
         {"trials", c.trials},
         {"calibration_replicates", c.calibration_replicates},
         {"seed", c.seed},
         {"epsilons", c.epsilons},
         {"family", FamilyName(c.family)},
         {"alpha_rule",
          c.alpha_rule == AlphaRule::kFixed ? "fixed" : "classical"},
         {"target", TargetName(c.target)},
         {"bisection_iterations", c.bisection_iterations},
         {"u_tolerance", c.u_tolerance}};
  if (c.alternative_L.has_value()) j["alternative_L"] = *c.alternative_L;
  if (c.constant.has_value()) j["constant"] = *c.constant;
  if (c.max_level.has_value()) j["max_level"] = *c.max_level;
  return j;
}

absl::StatusOr<ExperimentConfig> ConfigFromJson(const Json& j) {
  try {
    if (!j.is_object()) {
      return absl::InvalidArgumentError("config must be a JSON object");
    }
    ExperimentConfig c;
    if (j.contains("kind")) {
      ASSIGN_OR_RETURN(c.kind, ParseExperimentKind(j.at("kind").get<std::string>()));
    }
    c.n = j.value("n", c.n);
    c.alpha = j.value("alpha", c.alpha);
    c.gamma = j.value("gamma", c.gamma);
    c.beta = j.value("beta", c.beta);
    c.s = j.value("s", c.s);
    c.R = j.value("R", c.R);
    c.d = j.value("d", c.d);
    c.L = j.value("L", c.L);
    c.trials = j.value("trials", c.trials);
    c.calibration_replicates =
        j.value("calibration_replicates", c.calibration_replicates);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.epsilons = j.value("epsilons", c.epsilons);
    const std::string family = j.value("family", std::string("haar"));
    if (family == "haar") {
      c.family = AlternativeFamily::kHaar;
    } else if (family == "concentration") {
      c.family = AlternativeFamily::kConcentration;
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown family ", family));
    }
    const std::string rule = j.value("alpha_rule", std::string("fixed"));
    if (rule == "fixed") {
      c.alpha_rule = AlphaRule::kFixed;
    } else if (rule == "classical") {
      c.alpha_rule = AlphaRule::kClassical;
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown alpha_rule ", rule));
    }
    const std::string target = j.value("target", std::string("continuous"));
    if (target == "continuous") {
      c.target = CalibrationTarget::kContinuous;
    } else if (target == "discrete") {
      c.target = CalibrationTarget::kDiscrete;
    } else if (target == "adaptive") {
      c.target = CalibrationTarget::kAdaptive;
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown target ", target));
    }
    c.bisection_iterations = j.value("bisection_iterations", c.bisection_iterations);
    c.u_tolerance = j.value("u_tolerance", c.u_tolerance);
    if (j.contains("alternative_L")) c.alternative_L = j.at("alternative_L").get<int64_t>();
    if (j.contains("constant")) c.constant = j.at("constant").get<double>();
    if (j.contains("max_level")) c.max_level = j.at("max_level").get<int>();
    return c;
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed config: ", e.what()));
  }
}

std::string ToCsv(const ExperimentResult& result) {
  std::string out = absl::StrCat(kCsvHeader, "\n");
  for (const ExperimentRecord& r : result.records) {
    absl::StrAppend(&out, r.n, ",", Num(r.alpha), ",", Num(r.gamma), ",",
                    Num(r.beta), ",", Num(r.s), ",", Num(r.R), ",", r.d, ",",
                    r.L, ",", Num(r.epsilon), ",", Num(r.rate), ",", Num(r.se),
                    ",", r.trials, ",", Num(r.separation), ",",
                    Num(r.threshold), ",", CsvField(r.note), "\n");
  }
  return out;
}

Json ResultToJson(const ExperimentResult& result) {
  Json records = Json::array();
  for (const auto& r : result.records) records.push_back(RecordToJson(r));
  return Json{{"kind", ExperimentKindName(result.kind)},
              {"provenance", {{"seed", result.seed}, {"version", result.version}}},
              {"config", ConfigToJson(result.config)},
              {"records", std::move(records)},
              {"summary", result.summary},
              {"warnings", result.warnings}};
}

absl::StatusOr<ExperimentResult> ResultFromJson(const Json& j) {
  try {
    ExperimentResult result;
    ASSIGN_OR_RETURN(result.kind,
                     ParseExperimentKind(j.at("kind").get<std::string>()));
    result.seed = j.at("provenance").at("seed").get<uint64_t>();
    result.version = j.at("provenance").at("version").get<std::string>();
    ASSIGN_OR_RETURN(result.config, ConfigFromJson(j.at("config")));
    for (const Json& r : j.at("records")) {
      result.records.push_back(RecordFromJson(r));
    }
    result.summary = j.at("summary").get<std::map<std::string, double>>();
    result.warnings = j.at("warnings").get<std::vector<std::string>>();
    return result;
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed result: ", e.what()));
  }
}

absl::StatusOr<std::string> Emit(const ExperimentResult& result,
                                 const std::string& dir, OutputFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  const bool csv = format == OutputFormat::kCsv;
  const std::string path = (std::filesystem::path(dir) /
                            absl::StrCat(ExperimentKindName(result.kind),
                                         csv ? ".csv" : ".json"))
                               .string();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot open ", path));
  if (csv) {
    out << ToCsv(result);
  } else {
    out << ResultToJson(result).dump(2) << "\n";
  }
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return path;
}

}  // namespace privgof
