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

#include "dcount/randkit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dcount {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) +
                                ": probability outside [0, 1]: " +
                                std::to_string(p));
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : seed_(seed), stream_(stream) {
  std::uint64_t x = mix_seed(seed, stream);
  for (auto& word : s_) {
    x += 0x9E3779B97F4A7C15ULL;
    word = splitmix64(x);
  }
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
    s_[0] = 1;
  }
}

std::uint64_t RngStream::next_u64() noexcept {
  ++draws_;
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::next_unit() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_open_unit() noexcept {
  // (m + 1/2) 2^-52 for m in [0, 2^52): both ends are excluded and every
  // value is exactly representable.
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

ZeroInflatedParams::ZeroInflatedParams(double q, double p) : q_(q), p_(p) {
  if (!(q > 0.0 && q <= p && p <= 1.0)) {
    throw std::invalid_argument(
        "ZeroInflatedParams: need 0 < q <= p <= 1, got q=" +
        std::to_string(q) + " p=" + std::to_string(p));
  }
}

bool sample_bernoulli(double p, RngStream& rng) {
  require_probability(p, "sample_bernoulli");
  return rng.next_unit() < p;
}

std::uint64_t sample_geometric(double p, RngStream& rng) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("sample_geometric: need 0 < p <= 1, got " +
                                std::to_string(p));
  }
  const double u = rng.next_open_unit();
  if (p == 1.0) {
    return 1;
  }
  const double g = std::ceil(std::log(u) / std::log1p(-p));
  constexpr double kMax = 0x1.0p63;
  if (!(g < kMax)) {
    return std::uint64_t{1} << 63;
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(g));
}

std::uint64_t sample_zero_inflated(const ZeroInflatedParams& params,
                                   RngStream& rng) {
  const bool inflated = sample_bernoulli(params.inflation(), rng);
  const std::uint64_t g = sample_geometric(params.q(), rng);
  return inflated ? g : 0;
}

std::uint64_t sample_uniform_index(std::uint64_t n, RngStream& rng) {
  if (n == 0) {
    throw std::invalid_argument("sample_uniform_index: empty range");
  }
  __extension__ using u128 = unsigned __int128;
  const u128 wide = static_cast<u128>(rng.next_u64()) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

double zi_pgf(const ZeroInflatedParams& params, double s) {
  const double q = params.q();
  const double p = params.p();
  // For q = 1 the series converges everywhere on s >= 0.
  if (!(s >= 0.0) || (q < 1.0 && !(s * (1.0 - q) < 1.0))) {
    throw std::domain_error("zi_pgf: s=" + std::to_string(s) +
                            " outside [0, 1/(1-q))");
  }
  return (q / p) * (1.0 - (1.0 - p) * s) / (1.0 - (1.0 - q) * s);
}

double zi_bernstein_tail(double A, double p, double t) {
  if (!(A > 0.0) || !(p > 0.0 && p <= 1.0) || !(t >= 0.0)) {
    throw std::invalid_argument("zi_bernstein_tail: need A > 0, 0 < p <= 1, "
                                "t >= 0");
  }
  const double linear = p * t;
  double exponent = linear;
  if (p < 1.0) {
    const double quadratic = (p * t) * (p * t) / (A * (1.0 - p));
    exponent = std::min(quadratic, linear);
  }
  return std::exp(-0.5 * exponent);
}

double zi_bernstein_tail_full(double A, double p, double t) {
  if (!(A > 0.0) || !(p > 0.0 && p <= 1.0) || !(t >= 0.0)) {
    throw std::invalid_argument("zi_bernstein_tail_full: need A > 0, "
                                "0 < p <= 1, t >= 0");
  }
  // Multiplied through by p^2: t^2 / (2 (A(1-p)/p^2 + t/p)).
  const double pt = p * t;
  return std::exp(-pt * pt / (2.0 * (A * (1.0 - p) + pt)));
}

double max_partial_sum_tail(std::uint64_t r, double p, double t) {
  if (r == 0 || !(p > 0.0 && p <= 1.0) || !(t > 0.0)) {
    throw std::invalid_argument("max_partial_sum_tail: need r >= 1, "
                                "0 < p <= 1, t > 0");
  }
  const double tp = t * p;
  const double exponent =
      std::min(tp * tp / (8.0 * static_cast<double>(r)), tp / 4.0);
  return 2.0 * std::exp(-exponent);
}

}  // namespace dcount
