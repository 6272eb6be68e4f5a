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
#include <string_view>
#include <vector>

#include "dcount/protocol.hpp"

namespace dcount {

// Safety factor that makes the per-round failure probability at most
// `round_delta`:  c = max{sqrt(8 ln(2/d)), 4 ln(2/d) / sqrt(k)}.
double robust_c_for_round_budget(double round_delta, std::size_t k);

// Per-round budget used for a per-event failure target delta:
// delta / (1 + ln(1/delta)).
double robust_round_budget(double delta);

// c for per-event (epsilon, delta) accuracy.
double robust_c_per_event(double delta, std::size_t k);

// c for uniform accuracy over a horizon of `horizon` events:
//   A = ln(1/delta) + ln ln N + max{0, ln(1/(sqrt(k) epsilon))},
//   c = robust_c_for_round_budget(e^-A, k).
double robust_c_uniform(double delta, std::size_t k, double epsilon,
                        std::uint64_t horizon);

// The round-based robust counting protocol.
//
// Sites send a payload-free ReportSample with probability p per event. The
// server counts them in B and publishes n- + B/p. The k-th sample of a round
// closes it: the server requests every exact count, sets
// p = min{1, c sqrt(k) / (epsilon n-)} and broadcasts it. Nothing the server
// does depends on which site saw an event.
class RobustProtocol final : public Protocol {
 public:
  RobustProtocol(std::size_t k, double epsilon, double c);

  std::string_view name() const override { return "robust"; }
  std::size_t site_count() const override { return counts_.size(); }

  void on_event(SiteId site, RngStream& rng, Outbox& out) override;
  void on_site_message(SiteId site, const Message& msg, RngStream& rng,
                       Outbox& out) override;
  void on_server_message(const Message& msg, RngStream& rng,
                         Outbox& out) override;

  double current_estimate() const override;
  std::uint64_t round_index() const override { return rounds_; }
  double transmission_probability() const override { return p_; }
  std::span<const std::uint64_t> local_counts() const override {
    return counts_;
  }

  // n_i += 1; one Bernoulli(p) draw.
  std::optional<ReportSample> site_on_event(SiteId site, RngStream& rng);
  // B += 1; the k-th sample emits a CountRequest broadcast. Returns the
  // published estimate right after the increment.
  double server_on_report_sample(Outbox& out);
  ReportCount site_on_count_request(SiteId site) const;
  // Stores the exact count; the last reply of a round completes the resync
  // and emits the probability broadcast.
  void server_on_report_count(SiteId site, std::uint64_t count, Outbox& out);

  std::size_t k() const noexcept { return counts_.size(); }
  // L: samples that close a round. Always k.
  std::size_t samples_per_round() const noexcept { return k(); }
  double epsilon() const noexcept { return epsilon_; }
  double c() const noexcept { return c_; }
  std::uint64_t samples_in_round() const noexcept { return samples_; }
  std::uint64_t synced_total() const noexcept { return synced_total_; }
  std::span<const std::uint64_t> synced_counts() const noexcept {
    return synced_;
  }
  bool resync_in_progress() const noexcept { return pending_replies_ != 0; }

 private:
  double epsilon_;
  double c_;

  // Sites.
  std::vector<std::uint64_t> counts_;
  std::vector<double> site_p_;

  // Server.
  std::vector<std::uint64_t> synced_;
  std::uint64_t synced_total_ = 0;
  std::uint64_t samples_ = 0;
  double p_ = 1.0;
  std::size_t pending_replies_ = 0;
  std::uint64_t rounds_ = 0;
};

}  // namespace dcount
