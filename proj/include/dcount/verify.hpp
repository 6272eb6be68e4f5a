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

// Statistical and exact oracle checks over full protocol runs. Each check
// returns its measured margins in `detail` so a failure can be read without
// rerunning.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dcount/harness.hpp"

namespace dcount {

struct CheckResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t master = kDefaultMasterSeed;
  std::size_t jobs = 0;
};

enum class Suite : std::uint8_t {
  kDistributions,
  kInvariants,
  kAccuracy,
  kAttack
};

std::string_view to_string(Suite suite) noexcept;
// Throws std::invalid_argument on unknown names.
Suite parse_suite(std::string_view name);

// HYZ12 under the round-robin attack: median signed relative error above
// epsilon for t >= N/2 and positive for t >= 1000 (k=64, eps=1/8, r=40).
CheckResult check_attack_breaks_hyz12(const VerifyOptions& options);
// HYZ12 on the uniform stream: unbiased within 4 standard errors and a 95%
// relative-error quantile of at most 3 eps at t in {1e3, 1e4, 1e5} (r=400).
CheckResult check_hyz12_oblivious(const VerifyOptions& options);
// Robust with the per-event constant for delta=0.05: failure fraction at
// t in {1e2, 1e3, 1e4, 1e5} at most 0.08, both streams (r=400).
CheckResult check_robust_per_event(const VerifyOptions& options);
// Robust with the uniform constant for delta=0.1: at least 85 of 100 seeds
// stay eps-accurate at every event.
CheckResult check_robust_uniform(const VerifyOptions& options);
// Robust at c=1: mean M_N within [0.1, 10] of 4k log_{1+sqrt(k)eps/2} N,
// and M_t = 4k * rounds + samples in the open round at every event.
CheckResult check_robust_communication(const VerifyOptions& options);
// Robust transcripts are bit-identical across site assignments.
CheckResult check_site_symmetry(const VerifyOptions& options);
// n/2 <= n' <= n at every event and boundary spacing at most 7 n_0, over
// the HYZ12 runs of the first two checks.
CheckResult check_doubling_invariants(const VerifyOptions& options);
// pgf telescoping, KS agreement of telescoped sums, and one-sided tail
// bound domination.
CheckResult check_distribution_oracles(const VerifyOptions& options);
// Fraction of Robust rounds violating eps-accuracy at some event is at most
// the per-round tail bound plus 3 sigma, for c in {1, 2, 4}.
CheckResult check_round_tail(const VerifyOptions& options);
// On the attack stream, every HYZ12 median (Acc, Comm) point with Acc > eps
// is dominated by some Robust median point of the same sweep.
CheckResult check_tradeoff_dominance(const VerifyOptions& options);

// All ten checks in the order above.
std::vector<CheckResult> run_acceptance(const VerifyOptions& options);
std::vector<CheckResult> run_suite(Suite suite, const VerifyOptions& options);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|. Sorts both.
double ks_statistic(std::vector<double> a, std::vector<double> b);
// Critical value sqrt(-ln(alpha/2)/2) * sqrt((n+m)/(n m)).
double ks_critical(double alpha, std::size_t n, std::size_t m);

}  // namespace dcount
