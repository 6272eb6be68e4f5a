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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dcount/protocol.hpp"

namespace dcount {

constexpr bool is_power_of_two(std::uint64_t v) noexcept {
  return v != 0 && (v & (v - 1)) == 0;
}

// Deterministic factor-2 tracker. Sites notify the server whenever their
// local count hits a power of two; the server keeps n' = sum_i n'_i with
// n/2 <= n' <= n and raises a boundary each time n' reaches twice the value
// it had at the previous boundary.
class DoublingTracker {
 public:
  explicit DoublingTracker(std::size_t k);

  // Site side: increments n_i and returns a notification iff n_i is a power
  // of two.
  std::optional<DoublingNotify> site_on_event(SiteId site);

  // Server side: folds in the notification and returns the new n' when it
  // reached 2*tau (tau is then moved to n'). Throws std::logic_error if v is
  // not larger than the last value notified by `site`.
  std::optional<std::uint64_t> server_on_notify(SiteId site, std::uint64_t v);

  std::size_t site_count() const noexcept { return site_counts_.size(); }
  std::uint64_t estimate() const noexcept { return total_; }
  std::uint64_t threshold() const noexcept { return tau_; }
  std::uint64_t boundaries() const noexcept { return boundaries_; }
  std::span<const std::uint64_t> site_counts() const noexcept {
    return site_counts_;
  }
  std::span<const std::uint64_t> notified_counts() const noexcept {
    return notified_;
  }

 private:
  std::vector<std::uint64_t> site_counts_;
  std::vector<std::uint64_t> notified_;
  std::uint64_t total_ = 0;
  std::uint64_t tau_ = 1;
  std::uint64_t boundaries_ = 0;
};

}  // namespace dcount
