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

#include "dcount/doubling.hpp"

#include <stdexcept>
#include <string>

namespace dcount {

DoublingTracker::DoublingTracker(std::size_t k)
    : site_counts_(k, 0), notified_(k, 0) {
  if (k == 0) {
    throw std::invalid_argument("DoublingTracker: need at least one site");
  }
}

std::optional<DoublingNotify> DoublingTracker::site_on_event(SiteId site) {
  const std::uint64_t n = ++site_counts_.at(site);
  if (is_power_of_two(n)) {
    return DoublingNotify{site, n};
  }
  return std::nullopt;
}

std::optional<std::uint64_t> DoublingTracker::server_on_notify(
    SiteId site, std::uint64_t v) {
  std::uint64_t& last = notified_.at(site);
  if (v <= last) {
    throw std::logic_error("DoublingTracker: stale notify from site " +
                           std::to_string(site) + ": " + std::to_string(v) +
                           " <= " + std::to_string(last));
  }
  total_ += v - last;
  last = v;
  if (total_ >= 2 * tau_) {
    tau_ = total_;
    ++boundaries_;
    return total_;
  }
  return std::nullopt;
}

}  // namespace dcount
