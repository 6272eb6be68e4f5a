// Copyright 2026 The dcount Authors
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

#include "dcount/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

namespace dcount {
namespace {

TEST(Ks, StatisticOnKnownSamples) {
  EXPECT_EQ(ks_statistic({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(ks_statistic({1, 1}, {2, 2}), 1.0);
  EXPECT_NEAR(ks_statistic({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5, 1e-15);
  // Ties across samples are stepped together.
  EXPECT_NEAR(ks_statistic({0, 0, 1}, {0, 1, 1}), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(ks_statistic({}, {1}), std::invalid_argument);
}

TEST(Ks, CriticalValue) {
  EXPECT_NEAR(ks_critical(1e-3, 100000, 100000), 0.008718, 1e-6);
  EXPECT_THROW(ks_critical(0.0, 1, 1), std::invalid_argument);
}

TEST(Suites, Names) {
  EXPECT_EQ(parse_suite("attack"), Suite::kAttack);
  EXPECT_EQ(to_string(Suite::kDistributions), "distributions");
  EXPECT_THROW(parse_suite("all"), std::invalid_argument);
}

TEST(Checks, SiteSymmetryPasses) {
  const CheckResult r = check_site_symmetry({});
  EXPECT_TRUE(r.passed) << r.detail;
  EXPECT_EQ(r.id, "C6");
}

}  // namespace
}  // namespace dcount
