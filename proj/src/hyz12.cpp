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

#include "dcount/hyz12.hpp"

#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace dcount {

namespace {

// 1/p is kept as a 64-bit integer.
constexpr unsigned kMaxExponent = 62;

// (2^e * epsilon * n')^2 <= k
bool power_fits(int e, std::size_t k, double epsilon, std::uint64_t n_prime) {
  const long double scaled = std::ldexp(
      static_cast<long double>(epsilon) * static_cast<long double>(n_prime),
      e);
  return scaled * scaled <= static_cast<long double>(k);
}

}  // namespace

int floor_log2_ratio(std::size_t k, double epsilon, std::uint64_t n_prime) {
  if (k == 0 || !(epsilon > 0.0) || n_prime == 0) {
    throw std::invalid_argument("floor_log2_ratio: need k, epsilon, n' > 0");
  }
  const double ratio = std::sqrt(static_cast<double>(k)) /
                       (epsilon * static_cast<double>(n_prime));
  int e = static_cast<int>(std::floor(std::log2(ratio)));
  while (!power_fits(e, k, epsilon, n_prime)) {
    --e;
  }
  while (power_fits(e + 1, k, epsilon, n_prime)) {
    ++e;
  }
  return e;
}

unsigned hyz12_exponent(std::size_t k, double epsilon, std::uint64_t n_prime) {
  const int e = floor_log2_ratio(k, epsilon, n_prime);
  if (e >= 0) {
    return 0;
  }
  const unsigned neg = static_cast<unsigned>(-e);
  return neg > kMaxExponent ? kMaxExponent : neg;
}

Hyz12Protocol::Hyz12Protocol(std::size_t k, double epsilon)
    : epsilon_(epsilon),
      doubling_(k),
      counts_(k, 0),
      site_p_(k, 1.0),
      last_report_(k, 0),
      site_estimate_(k, 0) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("Hyz12Protocol: epsilon must be positive");
  }
}

double Hyz12Protocol::transmission_probability() const {
  return 1.0 / static_cast<double>(inv_p_);
}

std::optional<Report> Hyz12Protocol::site_on_event(SiteId site,
                                                   RngStream& rng) {
  const std::uint64_t n = ++counts_.at(site);
  if (sample_bernoulli(site_p_[site], rng)) {
    return Report{site, n};
  }
  return std::nullopt;
}

void Hyz12Protocol::set_site_estimate(SiteId site,
                                      std::uint64_t value) noexcept {
  estimate_ = estimate_ - site_estimate_[site] + value;
  site_estimate_[site] = value;
}

double Hyz12Protocol::server_on_report(SiteId site, std::uint64_t v) {
  if (v == 0) {
    throw std::logic_error("Hyz12Protocol: report of a zero count");
  }
  last_report_.at(site) = v;
  set_site_estimate(site, formula_estimate(v));
  return current_estimate();
}

std::optional<double> Hyz12Protocol::server_on_boundary(std::uint64_t n_prime,
                                                        RngStream& rng) {
  ++rounds_;
  inv_p_old_ = inv_p_;
  inv_p_ = std::uint64_t{1} << hyz12_exponent(k(), epsilon_, n_prime);
  if (inv_p_ == 1) {
    return std::nullopt;
  }
  const double p = 1.0 / static_cast<double>(inv_p_);
  const double p_old = 1.0 / static_cast<double>(inv_p_old_);
  const ZeroInflatedParams thinning(p, p_old);
  for (SiteId i = 0; i < k(); ++i) {
    const std::uint64_t z = sample_zero_inflated(thinning, rng);
    std::uint64_t& last = last_report_[i];
    last = z >= last ? 0 : last - z;
    set_site_estimate(i, formula_estimate(last));
  }
  return p;
}

void Hyz12Protocol::on_event(SiteId site, RngStream& rng, Outbox& out) {
  if (auto report = site_on_event(site, rng)) {
    out.to_server(*report);
  }
  if (auto notify = doubling_.site_on_event(site)) {
    out.to_server(*notify);
  }
}

void Hyz12Protocol::on_site_message(SiteId site, const Message& msg,
                                    RngStream& /*rng*/, Outbox& /*out*/) {
  if (const auto* update = std::get_if<ProbabilityUpdate>(&msg)) {
    site_p_.at(site) = update->p;
    return;
  }
  throw std::logic_error("Hyz12Protocol: unexpected message at site");
}

void Hyz12Protocol::on_server_message(const Message& msg, RngStream& rng,
                                      Outbox& out) {
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Report>) {
          server_on_report(m.site, m.count);
        } else if constexpr (std::is_same_v<T, DoublingNotify>) {
          if (auto n_prime = doubling_.server_on_notify(m.site, m.count)) {
            out.raise(BoundaryReached{*n_prime});
          }
        } else if constexpr (std::is_same_v<T, BoundaryReached>) {
          if (auto p = server_on_boundary(m.estimate, rng)) {
            out.broadcast(ProbabilityUpdate{*p});
          }
        } else {
          throw std::logic_error("Hyz12Protocol: unexpected message at server");
        }
      },
      msg);
}

}  // namespace dcount
