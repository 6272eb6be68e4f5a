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

#include "dcount/robust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dcount {

double robust_c_for_round_budget(double round_delta, std::size_t k) {
  if (!(round_delta > 0.0 && round_delta < 1.0) || k == 0) {
    throw std::invalid_argument(
        "robust_c_for_round_budget: need 0 < delta < 1, k >= 1");
  }
  const double log_term = std::log(2.0 / round_delta);
  return std::max(std::sqrt(8.0 * log_term),
                  4.0 * log_term / std::sqrt(static_cast<double>(k)));
}

double robust_round_budget(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("robust_round_budget: need 0 < delta < 1");
  }
  return delta / (1.0 + std::log(1.0 / delta));
}

double robust_c_per_event(double delta, std::size_t k) {
  return robust_c_for_round_budget(robust_round_budget(delta), k);
}

double robust_c_uniform(double delta, std::size_t k, double epsilon,
                        std::uint64_t horizon) {
  if (!(delta > 0.0 && delta < 1.0) || k == 0 || !(epsilon > 0.0) ||
      horizon < 3) {
    throw std::invalid_argument(
        "robust_c_uniform: need 0 < delta < 1, k >= 1, epsilon > 0, N >= 3");
  }
  const double a =
      std::log(1.0 / delta) +
      std::log(std::log(static_cast<double>(horizon))) +
      std::max(0.0,
               std::log(1.0 / (std::sqrt(static_cast<double>(k)) * epsilon)));
  // ln(2/d) with d = e^-A, written out to stay finite for large A.
  const double log_term = a + std::log(2.0);
  return std::max(std::sqrt(8.0 * log_term),
                  4.0 * log_term / std::sqrt(static_cast<double>(k)));
}

RobustProtocol::RobustProtocol(std::size_t k, double epsilon, double c)
    : epsilon_(epsilon),
      c_(c),
      counts_(k, 0),
      site_p_(k, 1.0),
      synced_(k, 0) {
  if (k == 0) {
    throw std::invalid_argument("RobustProtocol: need at least one site");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("RobustProtocol: epsilon must be positive");
  }
  if (!(c >= 1.0)) {
    throw std::invalid_argument("RobustProtocol: c must be >= 1");
  }
}

double RobustProtocol::current_estimate() const {
  return static_cast<double>(synced_total_) +
         static_cast<double>(samples_) / p_;
}

std::optional<ReportSample> RobustProtocol::site_on_event(SiteId site,
                                                          RngStream& rng) {
  ++counts_.at(site);
  if (sample_bernoulli(site_p_[site], rng)) {
    return ReportSample{};
  }
  return std::nullopt;
}

double RobustProtocol::server_on_report_sample(Outbox& out) {
  if (pending_replies_ != 0) {
    throw std::logic_error("RobustProtocol: sample during resync");
  }
  ++samples_;
  const double published = current_estimate();
  if (samples_ == samples_per_round()) {
    pending_replies_ = k();
    out.broadcast(CountRequest{});
  }
  return published;
}

ReportCount RobustProtocol::site_on_count_request(SiteId site) const {
  return ReportCount{site, counts_.at(site)};
}

void RobustProtocol::server_on_report_count(SiteId site, std::uint64_t count,
                                            Outbox& out) {
  if (pending_replies_ == 0) {
    throw std::logic_error("RobustProtocol: unsolicited count report");
  }
  synced_.at(site) = count;
  if (--pending_replies_ != 0) {
    return;
  }
  synced_total_ = std::accumulate(synced_.begin(), synced_.end(),
                                  std::uint64_t{0});
  p_ = std::min(1.0, c_ * std::sqrt(static_cast<double>(k())) /
                         (epsilon_ * static_cast<double>(synced_total_)));
  samples_ = 0;
  ++rounds_;
  out.broadcast(ProbabilityUpdate{p_});
}

void RobustProtocol::on_event(SiteId site, RngStream& rng, Outbox& out) {
  if (auto sample = site_on_event(site, rng)) {
    out.to_server(*sample);
  }
}

void RobustProtocol::on_site_message(SiteId site, const Message& msg,
                                     RngStream& /*rng*/, Outbox& out) {
  if (std::holds_alternative<CountRequest>(msg)) {
    out.to_server(site_on_count_request(site));
  } else if (const auto* update = std::get_if<ProbabilityUpdate>(&msg)) {
    site_p_.at(site) = update->p;
  } else {
    throw std::logic_error("RobustProtocol: unexpected message at site");
  }
}

void RobustProtocol::on_server_message(const Message& msg, RngStream& /*rng*/,
                                       Outbox& out) {
  if (std::holds_alternative<ReportSample>(msg)) {
    server_on_report_sample(out);
  } else if (const auto* reply = std::get_if<ReportCount>(&msg)) {
    server_on_report_count(reply->site, reply->count, out);
  } else {
    throw std::logic_error("RobustProtocol: unexpected message at server");
  }
}

}  // namespace dcount
