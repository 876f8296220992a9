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

#ifndef PRIVGOF_TESTS_TEST_UTIL_H_
#define PRIVGOF_TESTS_TEST_UTIL_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "gtest/gtest.h"

namespace privgof::testing {

inline const absl::Status& GetStatus(const absl::Status& status) {
  return status;
}
template <typename T>
const absl::Status& GetStatus(const absl::StatusOr<T>& status_or) {
  return status_or.status();
}

}  // namespace privgof::testing

#define EXPECT_OK(expr) \
  EXPECT_TRUE(::privgof::testing::GetStatus(expr).ok()) \
      << ::privgof::testing::GetStatus(expr)
#define ASSERT_OK(expr) \
  ASSERT_TRUE(::privgof::testing::GetStatus(expr).ok()) \
      << ::privgof::testing::GetStatus(expr)
#define EXPECT_STATUS_CODE(expr, expected) \
  EXPECT_EQ(::privgof::testing::GetStatus(expr).code(), (expected))

#define PRIVGOF_TEST_CONCAT_INNER_(x, y) x##y
#define PRIVGOF_TEST_CONCAT_(x, y) PRIVGOF_TEST_CONCAT_INNER_(x, y)
#define ASSERT_OK_AND_ASSIGN(lhs, rexpr) \
  ASSERT_OK_AND_ASSIGN_IMPL_(PRIVGOF_TEST_CONCAT_(_so_, __LINE__), lhs, rexpr)
#define ASSERT_OK_AND_ASSIGN_IMPL_(so, lhs, rexpr) \
  auto so = (rexpr);                                \
  ASSERT_TRUE(so.ok()) << so.status();              \
  lhs = std::move(so).value()

#endif  // PRIVGOF_TESTS_TEST_UTIL_H_
