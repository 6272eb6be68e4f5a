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

#include "dcount/doubling.hpp"
#include "dcount/protocol.hpp"

namespace dcount {

// floor(log2(sqrt(k) / (epsilon * n_prime))), computed from a floating
// estimate and then corrected by exact-ish comparisons
// 2^e * epsilon * n' <= sqrt(k)  <=>  (2^e * epsilon * n')^2 <= k
// in long double, so that ratios sitting exactly on a power of two land on
// the right side of the floor.
int floor_log2_ratio(std::size_t k, double epsilon, std::uint64_t n_prime);

// The HYZ12 probability exponent e >= 0 with p = 2^-e:
//   p = 2^min{0, floor(log2(sqrt(k) / (epsilon n')))}.
unsigned hyz12_exponent(std::size_t k, double epsilon, std::uint64_t n_prime);

// The oblivious sampling protocol of Huang, Yi and Zhang, run together with
// the Doubling tracker that decides where its rounds begin.
//
// Every p the server ever holds is a power of two, so 1/p is an integer and
// all per-site estimates n^_i = n-_i - 1 + 1/p are integers. The published
// estimate is kept as an exact integer sum.
class Hyz12Protocol final : public Protocol {
 public:
  Hyz12Protocol(std::size_t k, double epsilon);

  std::string_view name() const override { return "hyz12"; }
  std::size_t site_count() const override { return counts_.size(); }

  void on_event(SiteId site, RngStream& rng, Outbox& out) override;
  void on_site_message(SiteId site, const Message& msg, RngStream& rng,
                       Outbox& out) override;
  void on_server_message(const Message& msg, RngStream& rng,
                         Outbox& out) override;

  double current_estimate() const override {
    return static_cast<double>(estimate_);
  }
  std::uint64_t round_index() const override { return rounds_; }
  double transmission_probability() const override;
  std::span<const std::uint64_t> local_counts() const override {
    return counts_;
  }

  // Site half of an event: n_i += 1, then one Bernoulli(p) draw decides
  // whether the exact count is reported.
  std::optional<Report> site_on_event(SiteId site, RngStream& rng);

  // n-_i <- v, n^_i <- v - 1 + 1/p. Returns the published estimate.
  double server_on_report(SiteId site, std::uint64_t v);

  // Round change at Doubling estimate n'. Recomputes p; when p < 1, thins
  // every stored count by a Z_{p, p_old} draw and returns the probability to
  // broadcast.
  std::optional<double> server_on_boundary(std::uint64_t n_prime,
                                           RngStream& rng);

  const DoublingTracker& doubling() const noexcept { return doubling_; }
  std::span<const std::uint64_t> last_reports() const noexcept {
    return last_report_;
  }
  std::span<const std::uint64_t> site_estimates() const noexcept {
    return site_estimate_;
  }
  std::span<const double> site_probabilities() const noexcept {
    return site_p_;
  }
  std::uint64_t inverse_probability() const noexcept { return inv_p_; }
  std::uint64_t previous_inverse_probability() const noexcept {
    return inv_p_old_;
  }
  std::size_t k() const noexcept { return counts_.size(); }
  double epsilon() const noexcept { return epsilon_; }

 private:
  std::uint64_t formula_estimate(std::uint64_t last) const noexcept {
    return last == 0 ? 0 : last - 1 + inv_p_;
  }
  void set_site_estimate(SiteId site, std::uint64_t value) noexcept;

  double epsilon_;
  DoublingTracker doubling_;

  // Sites.
  std::vector<std::uint64_t> counts_;
  std::vector<double> site_p_;

  // Server.
  std::vector<std::uint64_t> last_report_;
  std::vector<std::uint64_t> site_estimate_;
  std::uint64_t estimate_ = 0;
  std::uint64_t inv_p_ = 1;
  std::uint64_t inv_p_old_ = 1;
  std::uint64_t rounds_ = 0;
};

}  // namespace dcount
