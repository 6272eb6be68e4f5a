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

#include <array>
#include <cstdint>
#include <limits>

namespace dcount {

// SplitMix64 finalizer. Used for seeding and for stream derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Derives the seed of stream `index` from `master`:
//   mix(master, index) = splitmix64(master ^ splitmix64(index + 1))
// The function is part of the reproducibility contract; changing it changes
// every recorded experiment.
constexpr std::uint64_t mix_seed(std::uint64_t master,
                                 std::uint64_t index) noexcept {
  return splitmix64(master ^ splitmix64(index + 1));
}

// Seeded xoshiro256** generator. One RngStream belongs to exactly one run
// (or one component of a run). It is movable but not copyable so that two
// owners can never silently replay the same draws.
//
// The 256-bit state is filled from a SplitMix64 sequence started at
// mix_seed(seed, stream). Given (seed, stream) the output sequence is fixed
// on every platform.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  RngStream(const RngStream&) = delete;
  RngStream& operator=(const RngStream&) = delete;
  RngStream(RngStream&&) noexcept = default;
  RngStream& operator=(RngStream&&) noexcept = default;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept;

  // Uniform on [0, 1) with 53 random bits.
  double next_unit() noexcept;

  // Uniform on the open interval (0, 1) with 52 random bits.
  double next_open_unit() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  // Number of 64-bit words drawn so far.
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t draws_ = 0;
};

// Z_{q,p} = B * G with B ~ Bernoulli(1 - q/p) and G ~ Geom(q), independent.
// Requires 0 < q <= p <= 1; q = 0 is rejected because Geom(0) is undefined.
class ZeroInflatedParams {
 public:
  ZeroInflatedParams(double q, double p);

  double q() const noexcept { return q_; }
  double p() const noexcept { return p_; }

  // Pr[B = 1] = 1 - q/p.
  double inflation() const noexcept { return 1.0 - q_ / p_; }

  // E[Z] = (1 - q/p) / q = 1/q - 1/p.
  double mean() const noexcept { return inflation() / q_; }

 private:
  double q_;
  double p_;
};

// Returns true with probability p. Consumes exactly one draw.
bool sample_bernoulli(double p, RngStream& rng);

// Geom(p) on {1, 2, ...} by inverse CDF: ceil(ln U / ln(1 - p)).
// Consumes exactly one draw, including for p = 1 (which returns 1).
std::uint64_t sample_geometric(double p, RngStream& rng);

// B * G as in ZeroInflatedParams. Always consumes two draws (B then G).
std::uint64_t sample_zero_inflated(const ZeroInflatedParams& params,
                                   RngStream& rng);

// Uniform on {0, ..., n-1} by 128-bit multiply of one draw. Bias <= n/2^64.
std::uint64_t sample_uniform_index(std::uint64_t n, RngStream& rng);

// Probability generating function of Z_{q,p}:
//   F(s) = (q/p) * (1 - (1-p)s) / (1 - (1-q)s),  0 <= s < 1/(1-q).
// Throws std::domain_error outside the convergence range.
double zi_pgf(const ZeroInflatedParams& params, double s);

// Upper bound on Pr[sum_i B_i G_i - A/p >= t] for independent
// B_i ~ Bernoulli(alpha_i), G_i ~ Geom(p), A = sum alpha_i:
//   exp(-1/2 * min{p^2 t^2 / (A (1-p)), p t}).
// For p = 1 the quadratic branch is +inf and the linear branch is taken.
double zi_bernstein_tail(double A, double p, double t);

// Same tail in variance form, before the min{} relaxation:
//   exp(-t^2 / (2 (A(1-p)/p^2 + t/p))).
// Never smaller than zi_bernstein_tail. The relaxation is not implied by
// this form; at A=32, p=0.1, t=200 the true tail is about 4e-3 while
// zi_bernstein_tail returns 9.6e-4.
double zi_bernstein_tail_full(double A, double p, double t);

// Upper bound on Pr[max_{i<=r} |S_i - i/p| >= t] for S_i a sum of i iid
// Geom(p) variables:  2 exp(-min{t^2 p^2 / (8r), t p / 4}).
double max_partial_sum_tail(std::uint64_t r, double p, double t);

}  // namespace dcount
