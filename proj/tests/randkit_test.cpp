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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dcount {
namespace {

// Half-width of a 4-sigma band for the mean of n draws with variance var.
double band(double var, double n) { return 4.0 * std::sqrt(var / n); }

TEST(SplitMix, MixSeedSeparatesIndices) {
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
  EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
  EXPECT_EQ(mix_seed(7, 3), mix_seed(7, 3));
}

TEST(RngStream, EqualSeedsGiveEqualDraws) {
  RngStream a(42, 0);
  RngStream b(42, 0);
  RngStream c(42, 1);
  bool differs = false;
  for (int i = 0; i < 10000; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differs = differs || x != c.next_u64();
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(a.draws(), 10000u);
}

TEST(RngStream, SamplersAreDeterministic) {
  RngStream a(9, 0);
  RngStream b(9, 0);
  const ZeroInflatedParams zi(0.1, 0.4);
  for (int i = 0; i < 10000; ++i) {
    ASSERT_EQ(sample_bernoulli(0.3, a), sample_bernoulli(0.3, b));
    ASSERT_EQ(sample_geometric(0.05, a), sample_geometric(0.05, b));
    ASSERT_EQ(sample_zero_inflated(zi, a), sample_zero_inflated(zi, b));
    ASSERT_EQ(sample_uniform_index(64, a), sample_uniform_index(64, b));
  }
}

TEST(RngStream, UnitIntervals) {
  RngStream rng(3, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_unit();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.next_open_unit();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(Samplers, FixedDrawCounts) {
  RngStream rng(5, 0);
  sample_bernoulli(1.0, rng);
  EXPECT_EQ(rng.draws(), 1u);
  sample_geometric(1.0, rng);
  EXPECT_EQ(rng.draws(), 2u);
  sample_geometric(0.01, rng);
  EXPECT_EQ(rng.draws(), 3u);
  sample_zero_inflated(ZeroInflatedParams(0.3, 0.3), rng);
  EXPECT_EQ(rng.draws(), 5u);
}

TEST(Bernoulli, Degenerate) {
  RngStream rng(1, 0);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_TRUE(sample_bernoulli(1.0, rng));
    EXPECT_FALSE(sample_bernoulli(0.0, rng));
  }
}

TEST(Bernoulli, HalfMean) {
  RngStream rng(2, 0);
  constexpr int kN = 1000000;
  int hits = 0;
  for (int i = 0; i < kN; ++i) hits += sample_bernoulli(0.5, rng) ? 1 : 0;
  const double mean = static_cast<double>(hits) / kN;
  EXPECT_GE(mean, 0.498);
  EXPECT_LE(mean, 0.502);
}

TEST(Bernoulli, RejectsBadProbability) {
  RngStream rng(1, 0);
  EXPECT_THROW(sample_bernoulli(-0.1, rng), std::invalid_argument);
  EXPECT_THROW(sample_bernoulli(1.5, rng), std::invalid_argument);
  EXPECT_THROW(sample_bernoulli(std::nan(""), rng), std::invalid_argument);
}

TEST(Geometric, PEqualsOneIsOne) {
  RngStream rng(1, 0);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_geometric(1.0, rng), 1u);
}

TEST(Geometric, HalfMean) {
  RngStream rng(4, 0);
  constexpr int kN = 1000000;
  double sum = 0.0;
  for (int i = 0; i < kN; ++i) {
    sum += static_cast<double>(sample_geometric(0.5, rng));
  }
  const double mean = sum / kN;
  EXPECT_GE(mean, 1.994);
  EXPECT_LE(mean, 2.006);
}

TEST(Geometric, SurvivalAtHundred) {
  RngStream rng(6, 0);
  constexpr int kN = 1000000;
  int over = 0;
  for (int i = 0; i < kN; ++i) over += sample_geometric(0.01, rng) > 100 ? 1 : 0;
  const double freq = static_cast<double>(over) / kN;
  EXPECT_GE(freq, 0.361);
  EXPECT_LE(freq, 0.371);
}

TEST(Geometric, RejectsBadProbability) {
  RngStream rng(1, 0);
  EXPECT_THROW(sample_geometric(0.0, rng), std::invalid_argument);
  EXPECT_THROW(sample_geometric(-1.0, rng), std::invalid_argument);
  EXPECT_THROW(sample_geometric(1.01, rng), std::invalid_argument);
}

// CLT check on the geometric mean over many seeds and generated p.
TEST(Geometric, MeanWithinFourSigmaAcrossSeeds) {
  constexpr int kSeeds = 200;
  constexpr int kN = 5000;
  RngStream gen(77, 0);
  int outside = 0;
  for (int s = 0; s < kSeeds; ++s) {
    const double p = std::pow(10.0, -2.0 * gen.next_unit());
    RngStream rng(mix_seed(1234, s), 0);
    double sum = 0.0;
    for (int i = 0; i < kN; ++i) {
      sum += static_cast<double>(sample_geometric(p, rng));
    }
    const double mean = sum / kN;
    if (std::abs(mean - 1.0 / p) > band((1.0 - p) / (p * p), kN)) ++outside;
  }
  EXPECT_EQ(outside, 0);
}

TEST(ZeroInflated, ParamsValidated) {
  EXPECT_THROW(ZeroInflatedParams(0.0, 0.5), std::invalid_argument);
  EXPECT_THROW(ZeroInflatedParams(0.6, 0.5), std::invalid_argument);
  EXPECT_THROW(ZeroInflatedParams(0.2, 1.1), std::invalid_argument);
  EXPECT_NO_THROW(ZeroInflatedParams(1.0, 1.0));
  const ZeroInflatedParams zi(0.25, 0.5);
  EXPECT_DOUBLE_EQ(zi.inflation(), 0.5);
  EXPECT_DOUBLE_EQ(zi.mean(), 2.0);
}

TEST(ZeroInflated, EqualParametersGiveZero) {
  RngStream rng(8, 0);
  const ZeroInflatedParams zi(0.3, 0.3);
  for (int i = 0; i < 10000; ++i) EXPECT_EQ(sample_zero_inflated(zi, rng), 0u);
}

TEST(ZeroInflated, Mean) {
  RngStream rng(10, 0);
  const ZeroInflatedParams zi(0.25, 0.5);
  constexpr int kN = 1000000;
  double sum = 0.0;
  for (int i = 0; i < kN; ++i) {
    sum += static_cast<double>(sample_zero_inflated(zi, rng));
  }
  const double mean = sum / kN;
  EXPECT_GE(mean, 1.98);
  EXPECT_LE(mean, 2.02);
}

TEST(ZeroInflated, IsBernoulliTimesGeometric) {
  RngStream a(12, 0);
  RngStream b(12, 0);
  const ZeroInflatedParams zi(0.1, 0.2);
  for (int i = 0; i < 10000; ++i) {
    const bool keep = sample_bernoulli(zi.inflation(), b);
    const std::uint64_t g = sample_geometric(zi.q(), b);
    ASSERT_EQ(sample_zero_inflated(zi, a), keep ? g : 0u);
  }
}

TEST(UniformIndex, InRangeAndRejectsEmpty) {
  RngStream rng(13, 0);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_LT(sample_uniform_index(7, rng), 7u);
    EXPECT_EQ(sample_uniform_index(1, rng), 0u);
  }
  EXPECT_THROW(sample_uniform_index(0, rng), std::invalid_argument);
}

TEST(Pgf, NormalizationAndOrigin) {
  RngStream gen(14, 0);
  for (int i = 0; i < 100; ++i) {
    const double p = 0.01 + 0.99 * gen.next_unit();
    const double q = p * (0.01 + 0.99 * gen.next_unit());
    const ZeroInflatedParams zi(q, p);
    EXPECT_NEAR(zi_pgf(zi, 1.0), 1.0, 1e-12);
    EXPECT_NEAR(zi_pgf(zi, 0.0), q / p, 1e-15);
  }
}

TEST(Pgf, TelescopingExample) {
  const ZeroInflatedParams a(0.5, 1.0);
  const ZeroInflatedParams b(0.25, 0.5);
  const ZeroInflatedParams direct(0.25, 1.0);
  for (double s : {0.0, 0.3, 0.9}) {
    EXPECT_NEAR(zi_pgf(a, s) * zi_pgf(b, s), zi_pgf(direct, s), 1e-12);
  }
}

TEST(Pgf, TelescopingProperty) {
  RngStream gen(15, 0);
  for (int trial = 0; trial < 500; ++trial) {
    const int r = 2 + static_cast<int>(sample_uniform_index(9, gen));
    std::vector<double> chain(r);
    for (double& p : chain) p = std::pow(10.0, -3.0 * gen.next_unit());
    std::sort(chain.begin(), chain.end(), std::greater<>());
    for (int j = 0; j <= 99; ++j) {
      const double s = 0.01 * j;
      double product = 1.0;
      for (int i = 0; i + 1 < r; ++i) {
        product *= zi_pgf(ZeroInflatedParams(chain[i + 1], chain[i]), s);
      }
      ASSERT_NEAR(product,
                  zi_pgf(ZeroInflatedParams(chain.back(), chain.front()), s),
                  1e-12);
    }
  }
}

TEST(Pgf, DomainError) {
  const ZeroInflatedParams zi(0.5, 1.0);
  EXPECT_THROW(zi_pgf(zi, 2.0), std::domain_error);
  EXPECT_THROW(zi_pgf(zi, -0.1), std::domain_error);
  EXPECT_NO_THROW(zi_pgf(zi, 1.99));
}

TEST(BernsteinTail, Examples) {
  EXPECT_DOUBLE_EQ(zi_bernstein_tail(64.0, 0.1, 0.0), 1.0);
  EXPECT_NEAR(zi_bernstein_tail(64.0, 0.1, 100.0),
              std::exp(-0.5 * 10000.0 * 0.01 / (64.0 * 0.9)), 1e-15);
  EXPECT_NEAR(zi_bernstein_tail(64.0, 0.1, 100.0), std::exp(-0.868055555),
              1e-9);
  EXPECT_NEAR(zi_bernstein_tail(5.0, 1.0, 3.0), std::exp(-1.5), 1e-15);
  EXPECT_THROW(zi_bernstein_tail(0.0, 0.5, 1.0), std::invalid_argument);
  EXPECT_THROW(zi_bernstein_tail(1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(zi_bernstein_tail(1.0, 0.5, -1.0), std::invalid_argument);
}

TEST(BernsteinTail, VarianceFormIsNeverSmaller) {
  RngStream gen(16, 0);
  for (int i = 0; i < 10000; ++i) {
    const double A = 0.1 + 200.0 * gen.next_unit();
    const double p = 0.001 + 0.999 * gen.next_unit();
    const double t = 1000.0 * gen.next_unit();
    ASSERT_GE(zi_bernstein_tail_full(A, p, t) + 1e-15,
              zi_bernstein_tail(A, p, t));
  }
}

// 64 variates with alpha=0.5, geometric parameter 0.1.
TEST(BernsteinTail, EmpiricalTail) {
  RngStream rng(17, 0);
  const ZeroInflatedParams zi(0.1, 0.2);
  constexpr int kN = 100000;
  constexpr double kA = 32.0;
  const double mean = kA / 0.1;
  const std::vector<double> ts{50.0, 100.0, 200.0};
  std::vector<int> over(ts.size(), 0);
  for (int n = 0; n < kN; ++n) {
    std::uint64_t sum = 0;
    for (int i = 0; i < 64; ++i) sum += sample_zero_inflated(zi, rng);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      over[j] += static_cast<double>(sum) - mean >= ts[j] ? 1 : 0;
    }
  }
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const double freq = static_cast<double>(over[j]) / kN;
    EXPECT_LE(freq, zi_bernstein_tail_full(kA, 0.1, ts[j])) << "t=" << ts[j];
  }
  // The min form holds at the two smaller deviations and is exceeded at
  // t=200, where the true tail is about 4e-3.
  EXPECT_LE(static_cast<double>(over[0]) / kN, zi_bernstein_tail(kA, 0.1, 50));
  EXPECT_LE(static_cast<double>(over[1]) / kN, zi_bernstein_tail(kA, 0.1, 100));
  EXPECT_GT(static_cast<double>(over[2]) / kN, zi_bernstein_tail(kA, 0.1, 200));
}

TEST(PartialSumTail, Examples) {
  EXPECT_NEAR(max_partial_sum_tail(64, 0.01, 1600.0), 2.0 * std::exp(-0.5),
              1e-15);
  EXPECT_NEAR(max_partial_sum_tail(64, 0.01, 6400.0), 2.0 * std::exp(-8.0),
              1e-15);
  double previous = max_partial_sum_tail(64, 0.01, 1.0);
  for (double t = 10.0; t < 1e5; t *= 1.5) {
    const double b = max_partial_sum_tail(64, 0.01, t);
    EXPECT_LE(b, previous);
    EXPECT_GT(b, 0.0);
    previous = b;
  }
  EXPECT_LT(previous, 1e-50);
  EXPECT_THROW(max_partial_sum_tail(0, 0.5, 1.0), std::invalid_argument);
  EXPECT_THROW(max_partial_sum_tail(1, 0.5, 0.0), std::invalid_argument);
}

TEST(PartialSumTail, EmpiricalTail) {
  RngStream rng(18, 0);
  constexpr int kN = 100000;
  const std::vector<double> ts{1600.0, 3200.0, 6400.0};
  std::vector<int> over(ts.size(), 0);
  for (int n = 0; n < kN; ++n) {
    double s = 0.0;
    double worst = 0.0;
    for (int i = 1; i <= 64; ++i) {
      s += static_cast<double>(sample_geometric(0.01, rng));
      worst = std::max(worst, std::abs(s - i / 0.01));
    }
    for (std::size_t j = 0; j < ts.size(); ++j) {
      over[j] += worst >= ts[j] ? 1 : 0;
    }
  }
  for (std::size_t j = 0; j < ts.size(); ++j) {
    const double bound = std::min(1.0, max_partial_sum_tail(64, 0.01, ts[j]));
    const double margin = 3.0 * std::sqrt(bound * (1.0 - bound) / kN);
    EXPECT_LE(static_cast<double>(over[j]) / kN, bound + margin)
        << "t=" << ts[j];
  }
}

}  // namespace
}  // namespace dcount
