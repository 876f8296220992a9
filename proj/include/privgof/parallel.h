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

#ifndef PRIVGOF_PARALLEL_H_
#define PRIVGOF_PARALLEL_H_

#include <cstdint>
#include <functional>
#include <optional>

namespace privgof {

// Environment variable that overrides the worker count when no explicit
// count is given.
inline constexpr char kWorkersEnvVar[] = "PRIVGOF_WORKERS";

// Explicit count if set, else $PRIVGOF_WORKERS, else 1.
int ResolveWorkers(std::optional<int> requested);

// Runs body(i) for i in [0, count) on `workers` threads. Indices are dealt
// round-robin; callers write results by index so the outcome does not depend
// on the schedule.
void ParallelFor(int64_t count, int workers,
                 const std::function<void(int64_t)>& body);

}  // namespace privgof

#endif  // PRIVGOF_PARALLEL_H_
