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

#include "dcount/verify.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>

#include "dcount/hyz12.hpp"
#include "dcount/robust.hpp"

namespace dcount {
namespace {

// Pinned parameters shared by several checks.
constexpr std::size_t kK = 64;
constexpr double kEps = 0.125;
constexpr std::uint64_t kHorizon = 100000;

// Independent sub-streams of the master seed for the non-engine oracles.
constexpr std::uint64_t kOracleSeedIndex = 1u << 20;

std::string printf_string(const char* format, ...) {
  va_list args;
  va_start(args, format);
  va_list copy;
  va_copy(copy, args);
  const int n = std::vsnprintf(nullptr, 0, format, args);
  va_end(args);
  std::string out(static_cast<std::size_t>(std::max(n, 0)), '\0');
  std::vsnprintf(out.data(), out.size() + 1, format, copy);
  va_end(copy);
  return out;
}

void append(std::string& detail, const std::string& part) {
  if (!detail.empty()) {
    detail += "; ";
  }
  detail += part;
}

void throw_on_failures(const std::vector<RunFailure>& failures) {
  if (!failures.empty()) {
    throw std::runtime_error("run " + std::to_string(failures.front().seed_index) +
                             " failed: " + failures.front().message);
  }
}

RunConfig base_config(ProtocolKind protocol, StreamKind stream) {
  RunConfig config;
  config.k = kK;
  config.epsilon = kEps;
  config.events = kHorizon;
  config.protocol = protocol;
  config.stream = stream;
  return config;
}

double relerr(double estimate, std::uint64_t t) {
  const double n = static_cast<double>(t);
  return std::abs(estimate - n) / n;
}

// Wraps a check body so an exception becomes a failed result.
template <typename Body>
CheckResult guarded(std::string id, std::string title, Body body) {
  CheckResult result{std::move(id), std::move(title), false, {}};
  try {
    body(result);
  } catch (const std::exception& e) {
    result.passed = false;
    append(result.detail, std::string("error: ") + e.what());
  }
  return result;
}

double binomial_sigma(double p, std::size_t n) {
  const double q = std::clamp(p, 0.0, 1.0);
  return std::sqrt(q * (1.0 - q) / static_cast<double>(n));
}

}  // namespace

std::string_view to_string(Suite suite) noexcept {
  switch (suite) {
    case Suite::kDistributions:
      return "distributions";
    case Suite::kInvariants:
      return "invariants";
    case Suite::kAccuracy:
      return "accuracy";
    case Suite::kAttack:
      return "attack";
  }
  return "?";
}

Suite parse_suite(std::string_view name) {
  for (Suite s : {Suite::kDistributions, Suite::kInvariants, Suite::kAccuracy,
                  Suite::kAttack}) {
    if (name == to_string(s)) {
      return s;
    }
  }
  throw std::invalid_argument(
      "unknown suite '" + std::string(name) +
      "' (expected distributions, invariants, accuracy or attack)");
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("ks_statistic: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  // Step both empirical CDFs past each distinct value before comparing, so
  // ties (the samples here are integers) are handled exactly.
  while (i < a.size() || j < b.size()) {
    double x;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      x = a[i];
    } else {
      x = b[j];
    }
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical(double alpha, std::size_t n, std::size_t m) {
  if (!(alpha > 0.0 && alpha < 1.0) || n == 0 || m == 0) {
    throw std::invalid_argument("ks_critical: need 0 < alpha < 1, n, m >= 1");
  }
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

CheckResult check_attack_breaks_hyz12(const VerifyOptions& options) {
  return guarded("C1", "attack breaks HYZ12", [&](CheckResult& result) {
    constexpr std::size_t kRuns = 40;
    constexpr std::uint64_t kPositiveFrom = 1000;
    const RunConfig config =
        base_config(ProtocolKind::kHyz12, StreamKind::kAttack);
    const MatrixResult matrix =
        run_matrix(std::span(&config, 1), kRuns, options.master, options.jobs);
    throw_on_failures(matrix.failures);
    const AggregateSeries ratio =
        aggregate(matrix.config_runs(0), Metric::kRatio);

    double min_tail = std::numeric_limits<double>::infinity();
    std::uint64_t min_tail_t = 0;
    double min_mid = std::numeric_limits<double>::infinity();
    std::uint64_t min_mid_t = 0;
    for (std::uint64_t t = kPositiveFrom; t <= kHorizon; ++t) {
      const double bias = ratio.median[t - 1] - 1.0;
      if (bias < min_mid) {
        min_mid = bias;
        min_mid_t = t;
      }
      if (t >= kHorizon / 2 && bias < min_tail) {
        min_tail = bias;
        min_tail_t = t;
      }
    }
    result.passed = min_tail > kEps && min_mid > 0.0;
    result.detail = printf_string(
        "min median bias over t>=N/2 = %.4f at t=%llu (need > %.3f); "
        "min over t>=1000 = %.4f at t=%llu (need > 0)",
        min_tail, static_cast<unsigned long long>(min_tail_t), kEps, min_mid,
        static_cast<unsigned long long>(min_mid_t));
  });
}

CheckResult check_hyz12_oblivious(const VerifyOptions& options) {
  return guarded("C2", "HYZ12 unbiased on the uniform stream",
                 [&](CheckResult& result) {
    constexpr std::size_t kRuns = 400;
    constexpr std::array<std::uint64_t, 3> kCheckpoints{1000, 10000, 100000};
    constexpr double kMaxSe = 4.0;
    const double quantile_cap = 3.0 * kEps;

    const RunConfig config =
        base_config(ProtocolKind::kHyz12, StreamKind::kUniform);
    // [seed][checkpoint] signed error n_hat - t.
    std::vector<std::array<double, kCheckpoints.size()>> errors(kRuns);
    const auto failures = for_each_run(
        std::span(&config, 1), kRuns, options.master, options.jobs,
        [&](const RunSlot& slot) {
          std::size_t next = 0;
          run(slot.config, [&](const EventRecord& row, const Engine&) {
            if (next < kCheckpoints.size() && row.t == kCheckpoints[next]) {
              errors[slot.seed_index][next++] =
                  row.estimate - static_cast<double>(row.t);
            }
          });
        });
    throw_on_failures(failures);

    result.passed = true;
    for (std::size_t c = 0; c < kCheckpoints.size(); ++c) {
      const double t = static_cast<double>(kCheckpoints[c]);
      double sum = 0.0;
      std::vector<double> rel(kRuns);
      for (std::size_t s = 0; s < kRuns; ++s) {
        sum += errors[s][c];
        rel[s] = std::abs(errors[s][c]) / t;
      }
      const double mean = sum / kRuns;
      double ss = 0.0;
      for (std::size_t s = 0; s < kRuns; ++s) {
        ss += (errors[s][c] - mean) * (errors[s][c] - mean);
      }
      const double se = std::sqrt(ss / (kRuns - 1) / kRuns);
      const double z = se > 0.0 ? mean / se : 0.0;
      std::sort(rel.begin(), rel.end());
      const double q95 = nearest_rank(rel, 95);
      const bool ok = std::abs(z) <= kMaxSe && q95 <= quantile_cap;
      result.passed = result.passed && ok;
      append(result.detail,
             printf_string("t=%g: mean=%.2f se=%.2f |z|=%.2f, q95 relerr=%.4f",
                           t, mean, se, std::abs(z), q95));
    }
    append(result.detail, printf_string("limits |z|<=%.0f, q95<=%.3f", kMaxSe,
                                        quantile_cap));
  });
}

CheckResult check_robust_per_event(const VerifyOptions& options) {
  return guarded("C3", "Robust per-event accuracy", [&](CheckResult& result) {
    constexpr std::size_t kRuns = 400;
    constexpr std::array<std::uint64_t, 4> kCheckpoints{100, 1000, 10000,
                                                        100000};
    constexpr double kDelta = 0.05;
    constexpr double kMargin = 0.03;
    const double c = robust_c_per_event(kDelta, kK);

    std::vector<RunConfig> configs;
    for (StreamKind stream : {StreamKind::kUniform, StreamKind::kAttack}) {
      RunConfig config = base_config(ProtocolKind::kRobust, stream);
      config.c = c;
      configs.push_back(config);
    }
    // [config][seed][checkpoint] violation flag.
    std::vector<std::vector<std::array<bool, kCheckpoints.size()>>> bad(
        configs.size(),
        std::vector<std::array<bool, kCheckpoints.size()>>(kRuns));
    const auto failures = for_each_run(
        configs, kRuns, options.master, options.jobs,
        [&](const RunSlot& slot) {
          std::size_t next = 0;
          auto& flags = bad[slot.config_index][slot.seed_index];
          run(slot.config, [&](const EventRecord& row, const Engine&) {
            if (next < kCheckpoints.size() && row.t == kCheckpoints[next]) {
              flags[next++] = relerr(row.estimate, row.t) > kEps;
            }
          });
        });
    throw_on_failures(failures);

    result.passed = true;
    double worst = 0.0;
    append(result.detail, printf_string("c=%.4f", c));
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
      std::string fractions;
      for (std::size_t k = 0; k < kCheckpoints.size(); ++k) {
        std::size_t count = 0;
        for (std::size_t s = 0; s < kRuns; ++s) {
          count += bad[ci][s][k] ? 1 : 0;
        }
        const double fraction = static_cast<double>(count) / kRuns;
        worst = std::max(worst, fraction);
        fractions += printf_string("%s%.4f", k == 0 ? "" : ",", fraction);
      }
      append(result.detail,
             printf_string("%s fail fractions=[%s]",
                           std::string(to_string(configs[ci].stream)).c_str(),
                           fractions.c_str()));
    }
    result.passed = worst <= kDelta + kMargin;
    append(result.detail,
           printf_string("worst=%.4f (limit %.2f)", worst, kDelta + kMargin));
  });
}

CheckResult check_robust_uniform(const VerifyOptions& options) {
  return guarded("C4", "Robust uniform accuracy", [&](CheckResult& result) {
    constexpr std::size_t kRuns = 100;
    constexpr double kDelta = 0.1;
    constexpr double kMinFraction = 0.85;
    const double c = robust_c_uniform(kDelta, kK, kEps, kHorizon);

    std::vector<RunConfig> configs;
    for (StreamKind stream : {StreamKind::kUniform, StreamKind::kAttack}) {
      RunConfig config = base_config(ProtocolKind::kRobust, stream);
      config.c = c;
      configs.push_back(config);
    }
    std::vector<double> max_err(configs.size() * kRuns, 0.0);
    const auto failures = for_each_run(
        configs, kRuns, options.master, options.jobs,
        [&](const RunSlot& slot) {
          double& worst = max_err[slot.config_index * kRuns + slot.seed_index];
          run(slot.config, [&](const EventRecord& row, const Engine&) {
            worst = std::max(worst, relerr(row.estimate, row.t));
          });
        });
    throw_on_failures(failures);

    result.passed = true;
    append(result.detail, printf_string("c=%.4f", c));
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
      std::size_t good = 0;
      double largest = 0.0;
      for (std::size_t s = 0; s < kRuns; ++s) {
        const double e = max_err[ci * kRuns + s];
        good += e <= kEps ? 1 : 0;
        largest = std::max(largest, e);
      }
      const double fraction = static_cast<double>(good) / kRuns;
      result.passed = result.passed && fraction >= kMinFraction;
      append(result.detail,
             printf_string("%s: %zu/%zu seeds accurate (need >= %.0f%%), "
                           "largest max relerr=%.4f",
                           std::string(to_string(configs[ci].stream)).c_str(),
                           good, kRuns, 100.0 * kMinFraction, largest));
    }
  });
}

CheckResult check_robust_communication(const VerifyOptions& options) {
  return guarded("C5", "Robust communication", [&](CheckResult& result) {
    constexpr std::size_t kRuns = 40;
    constexpr double kC = 1.0;
    RunConfig config = base_config(ProtocolKind::kRobust, StreamKind::kUniform);
    config.c = kC;
    const std::uint64_t per_round = 4 * kK;

    std::vector<std::uint64_t> totals(kRuns, 0);
    std::vector<std::uint64_t> mismatches(kRuns, 0);
    std::vector<std::uint64_t> rounds(kRuns, 0);
    const auto failures = for_each_run(
        std::span(&config, 1), kRuns, options.master, options.jobs,
        [&](const RunSlot& slot) {
          run(slot.config, [&](const EventRecord& row, const Engine& engine) {
            const auto& robust =
                dynamic_cast<const RobustProtocol&>(engine.protocol());
            const std::uint64_t expected =
                per_round * row.round + robust.samples_in_round();
            if (row.messages != expected) {
              ++mismatches[slot.seed_index];
            }
            totals[slot.seed_index] = row.messages;
            rounds[slot.seed_index] = row.round;
          });
        });
    throw_on_failures(failures);

    double mean = 0.0;
    std::uint64_t bad = 0;
    std::uint64_t completed = 0;
    for (std::size_t s = 0; s < kRuns; ++s) {
      mean += static_cast<double>(totals[s]) / kRuns;
      bad += mismatches[s];
      completed += rounds[s];
    }
    const double base =
        1.0 + std::sqrt(static_cast<double>(kK)) * kEps / (2.0 * kC);
    const double predicted = static_cast<double>(per_round) *
                             std::log(static_cast<double>(kHorizon)) /
                             std::log(base);
    const double ratio = mean / predicted;
    result.passed = ratio >= 0.1 && ratio <= 10.0 && bad == 0;
    result.detail = printf_string(
        "mean M_N=%.1f, predicted=%.1f, ratio=%.4f (need [0.1, 10]); "
        "%llu completed rounds, %llu events with M_t != 4k*rounds+samples",
        mean, predicted, ratio, static_cast<unsigned long long>(completed),
        static_cast<unsigned long long>(bad));
  });
}

CheckResult check_site_symmetry(const VerifyOptions& options) {
  return guarded("C6", "Robust site symmetry", [&](CheckResult& result) {
    constexpr std::size_t kSeeds = 8;
    RunConfig config = base_config(ProtocolKind::kRobust, StreamKind::kUniform);
    config.c = 2.0;

    const auto record = [](Engine& engine, std::uint64_t events) {
      Transcript t;
      for (std::uint64_t i = 0; i < events; ++i) {
        engine.advance();
        t.estimate.push_back(engine.estimate());
        t.messages.push_back(engine.ledger().total());
        t.round.push_back(engine.protocol().round_index());
      }
      return t;
    };
    const auto identical = [](const Transcript& a, const Transcript& b) {
      if (a.size() != b.size() || a.messages != b.messages ||
          a.round != b.round) {
        return false;
      }
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(a.estimate[i]) !=
            std::bit_cast<std::uint64_t>(b.estimate[i])) {
          return false;
        }
      }
      return true;
    };

    std::size_t mismatched = 0;
    std::size_t compared = 0;
    for (std::size_t s = 0; s < kSeeds; ++s) {
      RunConfig cell = config;
      cell.seed = run_seed(options.master, s);
      std::vector<Transcript> variants;
      for (StreamKind stream : {StreamKind::kUniform, StreamKind::kAttack}) {
        cell.stream = stream;
        Engine engine = make_engine(cell);
        variants.push_back(record(engine, cell.events));
      }
      {
        Engine engine(make_protocol(cell), std::make_unique<SingleSiteStream>(0),
                      cell.seed);
        variants.push_back(record(engine, cell.events));
      }
      {
        // White-box assignment: always the currently least loaded site.
        auto script = [](const Observation& obs) -> SiteId {
          const auto counts = obs.white_box->protocol->local_counts();
          return static_cast<SiteId>(
              std::min_element(counts.begin(), counts.end()) - counts.begin());
        };
        Engine engine(make_protocol(cell),
                      std::make_unique<ScriptedAdversary>(Access::kWhiteBox,
                                                          script),
                      cell.seed);
        variants.push_back(record(engine, cell.events));
      }
      for (std::size_t v = 1; v < variants.size(); ++v) {
        ++compared;
        mismatched += identical(variants[0], variants[v]) ? 0 : 1;
      }
    }
    result.passed = mismatched == 0;
    result.detail = printf_string(
        "%zu seeds x {attack, single-site, white-box} vs uniform: "
        "%zu/%zu transcripts differ",
        kSeeds, mismatched, compared);
  });
}

CheckResult check_doubling_invariants(const VerifyOptions& options) {
  return guarded("C7", "Doubling invariants", [&](CheckResult& result) {
    constexpr std::uint64_t kMaxSpacing = 7;
    std::vector<RunConfig> configs{
        base_config(ProtocolKind::kHyz12, StreamKind::kAttack),
        base_config(ProtocolKind::kHyz12, StreamKind::kUniform)};
    const std::array<std::size_t, 2> runs{40, 400};

    struct Tally {
      std::uint64_t sandwich_violations = 0;
      std::uint64_t spacing_violations = 0;
      std::uint64_t boundaries = 0;
      double worst_spacing = 0.0;
    };
    std::size_t total_runs = 0;
    Tally total;
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
      std::vector<Tally> tallies(runs[ci]);
      const auto failures = for_each_run(
          std::span(&configs[ci], 1), runs[ci], options.master, options.jobs,
          [&](const RunSlot& slot) {
            Tally& tally = tallies[slot.seed_index];
            std::uint64_t seen = 0;
            std::uint64_t previous_n = 0;
            run(slot.config, [&](const EventRecord& row, const Engine& engine) {
              const auto& doubling =
                  dynamic_cast<const Hyz12Protocol&>(engine.protocol())
                      .doubling();
              const std::uint64_t n_prime = doubling.estimate();
              if (2 * n_prime < row.t || n_prime > row.t) {
                ++tally.sandwich_violations;
              }
              if (doubling.boundaries() != seen) {
                seen = doubling.boundaries();
                ++tally.boundaries;
                if (previous_n != 0) {
                  const std::uint64_t gap = row.t - previous_n;
                  tally.worst_spacing =
                      std::max(tally.worst_spacing,
                               static_cast<double>(gap) /
                                   static_cast<double>(previous_n));
                  if (gap > kMaxSpacing * previous_n) {
                    ++tally.spacing_violations;
                  }
                }
                previous_n = row.t;
              }
            });
          });
      throw_on_failures(failures);
      total_runs += runs[ci];
      for (const Tally& t : tallies) {
        total.sandwich_violations += t.sandwich_violations;
        total.spacing_violations += t.spacing_violations;
        total.boundaries += t.boundaries;
        total.worst_spacing = std::max(total.worst_spacing, t.worst_spacing);
      }
    }
    result.passed =
        total.sandwich_violations == 0 && total.spacing_violations == 0;
    result.detail = printf_string(
        "%zu runs, %llu boundaries: %llu sandwich violations, %llu spacing "
        "violations, worst spacing ratio=%.4f (limit %llu)",
        total_runs, static_cast<unsigned long long>(total.boundaries),
        static_cast<unsigned long long>(total.sandwich_violations),
        static_cast<unsigned long long>(total.spacing_violations),
        total.worst_spacing, static_cast<unsigned long long>(kMaxSpacing));
  });
}

namespace {

// Descending chain p_1 >= ... >= p_r with p_1 = 1 half of the time.
std::vector<double> random_chain(RngStream& rng, bool powers_of_two) {
  const std::size_t r = 2 + sample_uniform_index(7, rng);
  std::vector<double> chain(r);
  if (powers_of_two) {
    unsigned e = static_cast<unsigned>(sample_uniform_index(2, rng));
    for (double& p : chain) {
      p = std::ldexp(1.0, -static_cast<int>(e));
      e += static_cast<unsigned>(sample_uniform_index(3, rng));
    }
    return chain;
  }
  for (double& p : chain) {
    // Log-uniform on [1e-3, 1].
    p = std::pow(10.0, -3.0 * rng.next_unit());
  }
  std::sort(chain.begin(), chain.end(), std::greater<>());
  if (sample_bernoulli(0.5, rng)) {
    chain.front() = 1.0;
  }
  return chain;
}

std::uint64_t sample_telescoped(std::span<const double> chain,
                                RngStream& rng) {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    sum += sample_zero_inflated(ZeroInflatedParams(chain[i + 1], chain[i]), rng);
  }
  return sum;
}

// Inverts a target bound b for the Bernstein tail: the smallest t with
// min{p^2 t^2/(A(1-p)), p t} >= 2 ln(1/b).
double bernstein_t_for(double A, double p, double b) {
  const double l = 2.0 * std::log(1.0 / b);
  return std::max(std::sqrt(l * A * (1.0 - p)) / p, l / p);
}

// Same for 2 exp(-min{t^2 p^2/(8r), t p/4}).
double partial_sum_t_for(std::uint64_t r, double p, double b) {
  const double l = std::log(2.0 / b);
  return std::max(std::sqrt(8.0 * static_cast<double>(r) * l) / p,
                  4.0 * l / p);
}

}  // namespace

CheckResult check_distribution_oracles(const VerifyOptions& options) {
  return guarded("C8", "distribution oracles", [&](CheckResult& result) {
    RngStream rng(run_seed(options.master, kOracleSeedIndex), 0);

    // pgf telescoping.
    constexpr std::size_t kChains = 200;
    constexpr double kPgfTol = 1e-12;
    double worst_pgf = 0.0;
    for (std::size_t c = 0; c < kChains; ++c) {
      const std::vector<double> chain = random_chain(rng, c % 2 == 0);
      const ZeroInflatedParams direct(chain.back(), chain.front());
      for (int j = 0; j <= 99; ++j) {
        const double s = 0.01 * j;
        double product = 1.0;
        for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
          product *= zi_pgf(ZeroInflatedParams(chain[i + 1], chain[i]), s);
        }
        worst_pgf = std::max(worst_pgf, std::abs(product - zi_pgf(direct, s)));
      }
    }
    const bool pgf_ok = worst_pgf <= kPgfTol;
    append(result.detail,
           printf_string("pgf: %zu chains, max |diff|=%.3g (tol %.0e)", kChains,
                         worst_pgf, kPgfTol));

    // KS on telescoped sums.
    constexpr std::size_t kSamples = 100000;
    constexpr std::size_t kKsChains = 4;
    constexpr double kAlpha = 1e-3;
    const double d_crit = ks_critical(kAlpha, kSamples, kSamples);
    double worst_ks = 0.0;
    for (std::size_t c = 0; c < kKsChains; ++c) {
      const std::vector<double> chain = random_chain(rng, c % 2 == 0);
      const ZeroInflatedParams direct(chain.back(), chain.front());
      std::vector<double> summed(kSamples);
      std::vector<double> single(kSamples);
      for (std::size_t i = 0; i < kSamples; ++i) {
        summed[i] = static_cast<double>(sample_telescoped(chain, rng));
        single[i] = static_cast<double>(sample_zero_inflated(direct, rng));
      }
      worst_ks = std::max(worst_ks, ks_statistic(summed, single));
    }
    const bool ks_ok = worst_ks < d_crit;
    append(result.detail,
           printf_string("KS: %zu chains, max D=%.5f (critical %.5f)",
                         kKsChains, worst_ks, d_crit));

    // Bernstein tail: sums of k zero-inflated variates with common
    // geometric parameter p and inflation alpha.
    constexpr std::size_t kTailSamples = 100000;
    constexpr double kSigmas = 3.0;
    struct BernsteinPoint {
      std::size_t k;
      double alpha;
      double p;
      std::vector<double> ts;
    };
    std::vector<BernsteinPoint> points{{64, 0.5, 0.1, {50.0, 100.0, 200.0}}};
    for (int g = 0; g < 4; ++g) {
      BernsteinPoint point{8 + sample_uniform_index(120, rng),
                           0.1 + 0.8 * rng.next_unit(), 0.0, {}};
      point.p = (1.0 - point.alpha) * std::pow(10.0, -2.0 * rng.next_unit());
      const double A = point.alpha * static_cast<double>(point.k);
      for (double b : {0.5, 0.1, 0.01}) {
        point.ts.push_back(bernstein_t_for(A, point.p, b));
      }
      points.push_back(point);
    }
    bool bernstein_ok = true;
    bool full_ok = true;
    double bernstein_slack = std::numeric_limits<double>::infinity();
    double full_slack = std::numeric_limits<double>::infinity();
    std::size_t bernstein_misses = 0;
    std::size_t bernstein_checks = 0;
    for (const BernsteinPoint& point : points) {
      // Z_{q,p} with q = p_geom and inflation alpha: p_outer = q/(1-alpha).
      const ZeroInflatedParams params(point.p, point.p / (1.0 - point.alpha));
      const double A = point.alpha * static_cast<double>(point.k);
      const double mean = A / point.p;
      std::vector<std::size_t> exceed(point.ts.size(), 0);
      for (std::size_t n = 0; n < kTailSamples; ++n) {
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < point.k; ++i) {
          sum += sample_zero_inflated(params, rng);
        }
        const double dev = static_cast<double>(sum) - mean;
        for (std::size_t j = 0; j < point.ts.size(); ++j) {
          exceed[j] += dev >= point.ts[j] ? 1 : 0;
        }
      }
      for (std::size_t j = 0; j < point.ts.size(); ++j) {
        const double freq = static_cast<double>(exceed[j]) / kTailSamples;
        const double bound = zi_bernstein_tail(A, point.p, point.ts[j]);
        const double limit = bound + kSigmas * binomial_sigma(bound, kTailSamples);
        ++bernstein_checks;
        if (freq > limit) {
          bernstein_ok = false;
          ++bernstein_misses;
        }
        bernstein_slack = std::min(bernstein_slack, limit - freq);
        const double full = zi_bernstein_tail_full(A, point.p, point.ts[j]);
        const double full_limit =
            full + kSigmas * binomial_sigma(full, kTailSamples);
        full_ok = full_ok && freq <= full_limit;
        full_slack = std::min(full_slack, full_limit - freq);
      }
    }
    append(result.detail,
           printf_string("Bernstein (min form): %zu/%zu (point, t) pairs "
                         "exceed the bound, min slack=%.4f; variance form: "
                         "%s, min slack=%.4f",
                         bernstein_misses, bernstein_checks, bernstein_slack,
                         full_ok ? "dominates" : "exceeded", full_slack));

    // Maximal partial-sum deviation of iid geometrics.
    struct PartialPoint {
      std::uint64_t r;
      double p;
      std::vector<double> ts;
    };
    std::vector<PartialPoint> partial{{64, 0.01, {1600.0, 6400.0}}};
    for (int g = 0; g < 3; ++g) {
      PartialPoint point{4 + sample_uniform_index(125, rng),
                         0.01 + 0.49 * rng.next_unit(),
                         {}};
      for (double b : {0.5, 0.1, 0.01}) {
        point.ts.push_back(partial_sum_t_for(point.r, point.p, b));
      }
      partial.push_back(point);
    }
    bool partial_ok = true;
    double partial_slack = std::numeric_limits<double>::infinity();
    for (const PartialPoint& point : partial) {
      std::vector<std::size_t> exceed(point.ts.size(), 0);
      for (std::size_t n = 0; n < kTailSamples; ++n) {
        double s = 0.0;
        double worst = 0.0;
        for (std::uint64_t i = 1; i <= point.r; ++i) {
          s += static_cast<double>(sample_geometric(point.p, rng));
          worst = std::max(worst, std::abs(s - static_cast<double>(i) / point.p));
        }
        for (std::size_t j = 0; j < point.ts.size(); ++j) {
          exceed[j] += worst >= point.ts[j] ? 1 : 0;
        }
      }
      for (std::size_t j = 0; j < point.ts.size(); ++j) {
        const double bound = max_partial_sum_tail(point.r, point.p, point.ts[j]);
        const double freq = static_cast<double>(exceed[j]) / kTailSamples;
        const double limit = bound + kSigmas * binomial_sigma(bound, kTailSamples);
        partial_ok = partial_ok && freq <= limit;
        partial_slack = std::min(partial_slack, limit - freq);
      }
    }
    append(result.detail,
           printf_string("partial sums: %zu points, min slack=%.4f",
                         partial.size(), partial_slack));

    result.passed = pgf_ok && ks_ok && bernstein_ok && partial_ok;
  });
}

CheckResult check_round_tail(const VerifyOptions& options) {
  return guarded("C9", "per-round accuracy tail", [&](CheckResult& result) {
    constexpr std::size_t kRounds = 400;
    constexpr double kSigmas = 3.0;
    constexpr std::size_t kSeeds = 200;
    result.passed = true;

    for (double c : {1.0, 2.0, 4.0}) {
      RunConfig config =
          base_config(ProtocolKind::kRobust, StreamKind::kUniform);
      config.c = c;

      // Per seed, whether each completed round that opened with p < 1
      // violated eps-accuracy, in order.
      std::vector<std::vector<bool>> per_seed(kSeeds);
      const auto failures = for_each_run(
          std::span(&config, 1), kSeeds, options.master, options.jobs,
          [&](const RunSlot& slot) {
            std::vector<bool>& out = per_seed[slot.seed_index];
            Engine engine = make_engine(slot.config);
            bool sampled = engine.protocol().transmission_probability() < 1.0;
            bool violated = false;
            std::uint64_t round = engine.protocol().round_index();
            for (std::uint64_t t = 1; t <= slot.config.events; ++t) {
              engine.advance();
              violated = violated || relerr(engine.estimate(), t) > kEps;
              const std::uint64_t now = engine.protocol().round_index();
              if (now != round) {
                if (sampled) {
                  out.push_back(violated);
                }
                round = now;
                violated = false;
                sampled = engine.protocol().transmission_probability() < 1.0;
              }
            }
          });
      throw_on_failures(failures);
      std::vector<bool> rounds;
      for (const auto& seed_rounds : per_seed) {
        for (bool r : seed_rounds) {
          if (rounds.size() < kRounds) {
            rounds.push_back(r);
          }
        }
      }
      if (rounds.size() < kRounds) {
        throw std::runtime_error("only " + std::to_string(rounds.size()) +
                                 " sampled rounds collected");
      }
      std::size_t violated = 0;
      for (bool r : rounds) {
        violated += r ? 1 : 0;
      }
      const double fraction = static_cast<double>(violated) / kRounds;
      const double bound =
          2.0 * std::exp(-std::min(c * c / 8.0,
                                   c * std::sqrt(static_cast<double>(kK)) / 4.0));
      const double limit = bound + kSigmas * binomial_sigma(bound, kRounds);
      const bool ok = fraction <= limit;
      result.passed = result.passed && ok;
      append(result.detail,
             printf_string("c=%g: %zu/%zu rounds violated (%.4f), bound=%.4f, "
                           "limit=%.4f",
                           c, violated, kRounds, fraction, bound, limit));
    }
  });
}

CheckResult check_tradeoff_dominance(const VerifyOptions& options) {
  return guarded("C10", "tradeoff dominance under attack",
                 [&](CheckResult& result) {
    TradeoffOptions base;
    base.k = kK;
    base.events = kHorizon;
    base.runs = 40;
    base.stream = StreamKind::kAttack;
    base.master = options.master;
    base.jobs = options.jobs;
    TradeoffOptions hyz = base;
    hyz.protocol = ProtocolKind::kHyz12;
    TradeoffOptions robust = base;
    robust.protocol = ProtocolKind::kRobust;
    const auto hyz_points = tradeoff(hyz);
    const auto robust_points = tradeoff(robust);

    std::size_t considered = 0;
    std::size_t dominated = 0;
    std::size_t same_eps = 0;
    std::string per_eps;
    for (std::size_t i = 0; i < hyz_points.size(); ++i) {
      const TradeoffPoint& h = hyz_points[i];
      if (!(h.acc.median > h.epsilon)) {
        continue;
      }
      ++considered;
      const auto dominates = [&](const TradeoffPoint& r) {
        return r.acc.median <= h.acc.median && r.comm.median <= h.comm.median;
      };
      const auto witness =
          std::find_if(robust_points.begin(), robust_points.end(), dominates);
      if (witness != robust_points.end()) {
        ++dominated;
      }
      same_eps += dominates(robust_points[i]) ? 1 : 0;
      per_eps += printf_string(
          "%seps=%g hyz(acc=%.4f,comm=%.0f) robust(acc=%.4f,comm=%.0f) "
          "witness eps=%s",
          per_eps.empty() ? "" : "; ", h.epsilon, h.acc.median, h.comm.median,
          robust_points[i].acc.median, robust_points[i].comm.median,
          witness == robust_points.end()
              ? "none"
              : printf_string("%g", witness->epsilon).c_str());
    }
    result.passed = considered > 0 && dominated == considered;
    result.detail = printf_string(
        "%zu/%zu HYZ12 points with Acc > eps dominated by the Robust curve; "
        "%zu/%zu dominated at equal eps",
        dominated, considered, same_eps, considered);
    append(result.detail, per_eps);
  });
}

std::vector<CheckResult> run_acceptance(const VerifyOptions& options) {
  return {check_attack_breaks_hyz12(options),
          check_hyz12_oblivious(options),
          check_robust_per_event(options),
          check_robust_uniform(options),
          check_robust_communication(options),
          check_site_symmetry(options),
          check_doubling_invariants(options),
          check_distribution_oracles(options),
          check_round_tail(options),
          check_tradeoff_dominance(options)};
}

std::vector<CheckResult> run_suite(Suite suite, const VerifyOptions& options) {
  switch (suite) {
    case Suite::kDistributions:
      return {check_distribution_oracles(options)};
    case Suite::kInvariants:
      return {check_robust_communication(options),
              check_site_symmetry(options),
              check_doubling_invariants(options)};
    case Suite::kAccuracy:
      return {check_hyz12_oblivious(options), check_robust_per_event(options),
              check_robust_uniform(options), check_round_tail(options)};
    case Suite::kAttack:
      return {check_attack_breaks_hyz12(options),
              check_tradeoff_dominance(options)};
  }
  throw std::invalid_argument("run_suite: unknown suite");
}

}  // namespace dcount
