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

#ifndef PRIVGOF_SERIALIZATION_H_
#define PRIVGOF_SERIALIZATION_H_

#include "absl/status/statusor.h"
#include "json.hpp"
#include "privgof/adaptive.h"
#include "privgof/channel.h"
#include "privgof/dyadic.h"
#include "privgof/gof_test.h"
#include "privgof/rates.h"

namespace privgof {

using Json = nlohmann::json;

// {"level_count": L, "values": [...]}
Json DensityToJson(const PiecewiseConstantDensity& f);
absl::StatusOr<PiecewiseConstantDensity> DensityFromJson(const Json& j);

// {"d": d, "probs": [...]}
Json ProbabilityVectorToJson(const ProbabilityVector& p);
absl::StatusOr<ProbabilityVector> ProbabilityVectorFromJson(const Json& j);

Json ChannelSpecToJson(const ChannelSpec& spec);
absl::StatusOr<ChannelSpec> ChannelSpecFromJson(const Json& j);

// {"n", "levels": [L...], "matrices": [[row-major n x L]...], "channel",
//  "seed"}
Json PrivatizedSampleToJson(const PrivatizedSample& z);
absl::StatusOr<PrivatizedSample> PrivatizedSampleFromJson(const Json& j);

Json TestReportToJson(const TestReport& r);
absl::StatusOr<TestReport> TestReportFromJson(const Json& j);

// Per-level arrays are keyed by the decimal exponent J.
Json AdaptiveReportToJson(const AdaptiveReport& r);
absl::StatusOr<AdaptiveReport> AdaptiveReportFromJson(const Json& j);

Json RateQueryToJson(const RateQuery& q);
absl::StatusOr<RateQuery> RateQueryFromJson(const Json& j);

// {"query": ..., "lower_kernel": ..., "upper_kernel": ...}
Json CalcRecord(const RateQuery& q, const RateBounds& b);

}  // namespace privgof

#endif  // PRIVGOF_SERIALIZATION_H_
