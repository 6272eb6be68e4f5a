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

#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <numeric>

#include "dcount/engine.hpp"

namespace dcount {
namespace {

// Drives a protocol directly without an engine.
void set_probability(Hyz12Protocol& proto, SiteId site, double p) {
  std::deque<Envelope> queue;
  Outbox out(queue);
  RngStream rng(0, 0);
  proto.on_site_message(site, ProbabilityUpdate{p}, rng, out);
}

TEST(Hyz12Exponent, Examples) {
  EXPECT_EQ(floor_log2_ratio(64, 0.125, 64), 0);
  EXPECT_EQ(hyz12_exponent(64, 0.125, 64), 0u);
  EXPECT_EQ(floor_log2_ratio(64, 0.125, 256), -2);
  EXPECT_EQ(hyz12_exponent(64, 0.125, 256), 2u);
  EXPECT_EQ(hyz12_exponent(64, 0.125, 1), 0u);
  EXPECT_THROW(floor_log2_ratio(0, 0.1, 1), std::invalid_argument);
  EXPECT_THROW(floor_log2_ratio(4, 0.1, 0), std::invalid_argument);
}

// Integer oracle for eps = 1/8 and square k = s^2: the ratio is 8 s / n',
// and floor(log2) is the largest e with 2^e n' <= 8 s (for e <= 0) or
// n' 2^e <= 8 s (for e > 0).
int oracle_floor_log2(std::uint64_t s, std::uint64_t n_prime) {
  const std::uint64_t num = 8 * s;
  int e = 0;
  if (n_prime <= num) {
    while ((n_prime << (e + 1)) <= num) ++e;
    return e;
  }
  while ((num << (-e)) < n_prime) --e;
  return e;
}

TEST(Hyz12Exponent, MatchesIntegerOracle) {
  for (std::uint64_t s : {1u, 2u, 3u, 8u, 16u}) {
    for (std::uint64_t n = 1; n <= 5000; ++n) {
      ASSERT_EQ(floor_log2_ratio(s * s, 0.125, n), oracle_floor_log2(s, n))
          << "k=" << s * s << " n'=" << n;
    }
    for (std::uint64_t n = 1; n < (std::uint64_t{1} << 40); n = n * 2 + 1) {
      ASSERT_EQ(floor_log2_ratio(s * s, 0.125, n), oracle_floor_log2(s, n));
      ASSERT_EQ(floor_log2_ratio(s * s, 0.125, n + 1),
                oracle_floor_log2(s, n + 1));
    }
  }
}

TEST(Hyz12Protocol, EstimatorExamples) {
  Hyz12Protocol proto(4, 0.125);
  EXPECT_DOUBLE_EQ(proto.server_on_report(0, 1), 1.0);
  EXPECT_EQ(proto.site_estimates()[0], 1u);
  EXPECT_THROW(proto.server_on_report(0, 0), std::logic_error);

  RngStream rng(1, 0);
  // Boundary at n' = 1024 with k = 4: ratio 2 / 128 -> p = 2^-6.
  proto.server_on_boundary(1024, rng);
  EXPECT_EQ(proto.inverse_probability(), 64u);
  proto.server_on_report(1, 10);
  EXPECT_EQ(proto.site_estimates()[1], 73u);
}

TEST(Hyz12Protocol, EstimatorQuarter) {
  Hyz12Protocol proto(64, 0.125);
  RngStream rng(2, 0);
  proto.server_on_boundary(256, rng);
  EXPECT_DOUBLE_EQ(proto.transmission_probability(), 0.25);
  proto.server_on_report(3, 5);
  EXPECT_EQ(proto.site_estimates()[3], 8u);
}

TEST(Hyz12Protocol, NoBroadcastWhileExact) {
  Hyz12Protocol proto(64, 0.125);
  RngStream rng(3, 0);
  EXPECT_FALSE(proto.server_on_boundary(64, rng).has_value());
  EXPECT_EQ(rng.draws(), 0u);
  auto p = proto.server_on_boundary(256, rng);
  ASSERT_TRUE(p.has_value());
  EXPECT_DOUBLE_EQ(*p, 0.25);
  // One zero-inflated correction (two draws) per site.
  EXPECT_EQ(rng.draws(), 2u * 64);
  // Unchanged p < 1 still draws and broadcasts; corrections are zero.
  const std::vector<std::uint64_t> before(proto.last_reports().begin(),
                                          proto.last_reports().end());
  auto same = proto.server_on_boundary(256, rng);
  ASSERT_TRUE(same.has_value());
  EXPECT_EQ(rng.draws(), 4u * 64);
  EXPECT_TRUE(std::equal(before.begin(), before.end(),
                         proto.last_reports().begin()));
}

TEST(Hyz12Protocol, SiteReportsEveryEventAtPOne) {
  Hyz12Protocol proto(2, 0.1);
  RngStream rng(4, 0);
  for (std::uint64_t n = 1; n <= 100; ++n) {
    auto r = proto.site_on_event(1, rng);
    ASSERT_TRUE(r.has_value());
    EXPECT_EQ(r->count, n);
  }
}

TEST(Hyz12Protocol, ReportCountBand) {
  Hyz12Protocol proto(1, 0.1);
  set_probability(proto, 0, 0.5);
  RngStream rng(5, 0);
  int reports = 0;
  for (int i = 0; i < 100000; ++i) {
    reports += proto.site_on_event(0, rng).has_value() ? 1 : 0;
  }
  EXPECT_GE(reports, 49400);
  EXPECT_LE(reports, 50600);
}

TEST(Hyz12Protocol, CorrectionClampsAtZero) {
  // After a large drop in p, most sites with small last reports go to 0.
  Hyz12Protocol proto(64, 0.125);
  RngStream rng(6, 0);
  for (SiteId i = 0; i < 64; ++i) proto.server_on_report(i, 1);
  proto.server_on_boundary(std::uint64_t{1} << 20, rng);
  for (SiteId i = 0; i < 64; ++i) {
    const std::uint64_t last = proto.last_reports()[i];
    EXPECT_LE(last, 1u);
    EXPECT_EQ(proto.site_estimates()[i],
              last == 0 ? 0 : last - 1 + proto.inverse_probability());
  }
  const std::uint64_t sum = std::accumulate(proto.site_estimates().begin(),
                                            proto.site_estimates().end(),
                                            std::uint64_t{0});
  EXPECT_DOUBLE_EQ(proto.current_estimate(), static_cast<double>(sum));
}

RunConfig hyz_config(std::size_t k, StreamKind stream, std::uint64_t seed,
                     std::uint64_t events) {
  RunConfig config;
  config.k = k;
  config.epsilon = 0.125;
  config.events = events;
  config.seed = seed;
  config.protocol = ProtocolKind::kHyz12;
  config.stream = stream;
  return config;
}

// Observation on the transmission probability at round start, on both
// streams: min{1, sqrt(k)/(2 eps n0)} <= p <= min{1, 2 sqrt(k)/(eps n0)}.
TEST(Hyz12Protocol, ProbabilityBoundsAtRoundStart) {
  for (StreamKind stream : {StreamKind::kUniform, StreamKind::kAttack}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const RunConfig config = hyz_config(64, stream, mix_seed(31, seed), 50000);
      std::uint64_t round = 0;
      run(config, [&](const EventRecord& row, const Engine& engine) {
        if (row.round == round) return;
        round = row.round;
        const double p = engine.protocol().transmission_probability();
        const double root = 8.0;
        const double n0 = static_cast<double>(row.t);
        EXPECT_GE(p, std::min(1.0, root / (2.0 * 0.125 * n0)));
        EXPECT_LE(p, std::min(1.0, 2.0 * root / (0.125 * n0)));
      });
    }
  }
}

// Seed-mean error within 4 standard errors of zero on the uniform stream.
TEST(Hyz12Protocol, UnbiasedOnUniformStream) {
  constexpr int kRuns = 300;
  constexpr std::uint64_t kEvents = 20000;
  double sum = 0.0;
  double sq = 0.0;
  for (int s = 0; s < kRuns; ++s) {
    const Transcript t =
        run(hyz_config(16, StreamKind::kUniform, mix_seed(32, s), kEvents));
    const double e = t.estimate.back() - static_cast<double>(kEvents);
    sum += e;
    sq += e * e;
  }
  const double mean = sum / kRuns;
  const double var = (sq - kRuns * mean * mean) / (kRuns - 1);
  EXPECT_LE(std::abs(mean), 4.0 * std::sqrt(var / kRuns));
}

// Messages stay within a constant factor of sqrt(k)/eps log N.
TEST(Hyz12Protocol, CommunicationScale) {
  const Transcript t =
      run(hyz_config(64, StreamKind::kUniform, mix_seed(33, 0), 100000));
  const double scale = 8.0 / 0.125 * std::log(100000.0);
  const double m = static_cast<double>(t.messages.back());
  EXPECT_GT(m, 0.5 * scale);
  EXPECT_LT(m, 20.0 * scale);
}

}  // namespace
}  // namespace dcount
