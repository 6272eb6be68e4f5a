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
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dcount/engine.hpp"

namespace dcount {

inline constexpr std::uint64_t kDefaultMasterSeed = 20240607;

// Seed of the `seed_index`-th run of every config in a matrix. Depends only
// on the position, so serial and parallel execution agree, and configs that
// share a seed index share protocol randomness.
inline std::uint64_t run_seed(std::uint64_t master, std::size_t seed_index) {
  return mix_seed(master, seed_index);
}

struct RunSlot {
  std::size_t config_index = 0;
  std::size_t seed_index = 0;
  // Copy of the matrix config with `seed` filled in.
  RunConfig config;
};

struct RunFailure {
  std::size_t config_index = 0;
  std::size_t seed_index = 0;
  std::string message;
};

// 0 means one worker per hardware thread.
std::size_t resolve_jobs(std::size_t jobs);

// Calls `body` once per (config, seed) slot on up to `jobs` threads. A slot
// that throws is recorded and does not stop the others. Failures come back
// ordered by (config index, seed index).
std::vector<RunFailure> for_each_run(
    std::span<const RunConfig> configs, std::size_t runs,
    std::uint64_t master, std::size_t jobs,
    const std::function<void(const RunSlot&)>& body);

struct MatrixResult {
  std::size_t runs = 0;
  // Ordered by (config index, seed index); failed slots hold an empty
  // transcript.
  std::vector<Transcript> transcripts;
  std::vector<RunFailure> failures;

  const Transcript& at(std::size_t config_index,
                       std::size_t seed_index) const {
    return transcripts.at(config_index * runs + seed_index);
  }
  std::span<const Transcript> config_runs(std::size_t config_index) const {
    return std::span<const Transcript>(transcripts)
        .subspan(config_index * runs, runs);
  }
};

MatrixResult run_matrix(std::span<const RunConfig> configs, std::size_t runs,
                        std::uint64_t master, std::size_t jobs = 0);

enum class Metric : std::uint8_t { kMessages, kRatio, kRelativeError };

std::string_view to_string(Metric metric) noexcept;

// Value of `metric` at row `row` (event t = row + 1).
double metric_value(Metric metric, const Transcript& transcript,
                    std::size_t row);

struct QuantileBand {
  double median = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
};

// Nearest-rank quantile on a sorted sample: element ceil(percent * r / 100),
// 1-based, with the rank computed in integers.
double nearest_rank(std::span<const double> sorted, unsigned percent);

// Median (midpoint of the two central values for even r) with nearest-rank
// 5% and 95% quantiles. Sorts `values`.
QuantileBand summarize(std::vector<double> values);

struct AggregateSeries {
  Metric metric = Metric::kMessages;
  std::vector<double> median;
  std::vector<double> q05;
  std::vector<double> q95;

  std::size_t size() const noexcept { return median.size(); }
};

// Per-event quantiles across runs. Throws std::invalid_argument when the
// transcripts are empty or differ in length.
AggregateSeries aggregate(std::span<const Transcript> transcripts,
                          Metric metric);

// eps_i = 2^i / sqrt(k), i = -3..2, keeping eps_i <= 1/2. Throws
// std::invalid_argument when nothing survives.
std::vector<double> epsilon_grid(std::size_t k);

// Mean relative error over t in [floor(N/2), N], fed one event at a time.
class TailAccuracy {
 public:
  explicit TailAccuracy(std::uint64_t horizon);
  void add(std::uint64_t t, double estimate);
  double value() const;

 private:
  std::uint64_t first_;
  std::uint64_t last_;
  std::uint64_t terms_ = 0;
  double sum_ = 0.0;
};

double tail_accuracy(const Transcript& transcript);

struct TradeoffPoint {
  double epsilon = 0.0;
  QuantileBand comm;
  QuantileBand acc;
};

struct TradeoffOptions {
  std::size_t k = 64;
  std::uint64_t events = 100000;
  std::size_t runs = 40;
  ProtocolKind protocol = ProtocolKind::kRobust;
  StreamKind stream = StreamKind::kAttack;
  double c = 1.0;
  std::uint64_t master = kDefaultMasterSeed;
  std::size_t jobs = 0;
};

// Sweeps epsilon_grid(k); per epsilon, the median and band across seeds of
// Comm = M_N and Acc = tail accuracy.
std::vector<TradeoffPoint> tradeoff(const TradeoffOptions& options);

// Event indices written to plot files: every t <= 1000, then about 200
// geometrically spaced indices per decade, always ending at N.
std::vector<std::uint64_t> plot_indices(std::uint64_t horizon);

// Shortest round-trip decimal form, locale independent.
std::string format_double(double value);

// CSV writers. Comma separated, LF line endings, header row always present.
// Throw std::runtime_error naming the path on I/O failure.
void write_series_csv(const std::filesystem::path& path,
                      const AggregateSeries& series,
                      std::span<const std::uint64_t> indices);
void write_tradeoff_csv(const std::filesystem::path& path,
                        std::span<const TradeoffPoint> points);
void write_transcripts_csv(const std::filesystem::path& path,
                           std::span<const Transcript> transcripts,
                           std::span<const std::uint64_t> indices);

struct FiguresOptions {
  std::vector<std::size_t> ks{64, 256};
  double epsilon = 0.125;
  double c = 1.0;
  std::size_t runs = 40;
  std::uint64_t events = 100000;
  std::uint64_t master = kDefaultMasterSeed;
  std::size_t jobs = 0;
};

// Runs every (k, protocol, stream) cell and writes
// <out>/<protocol>_<stream>_k<k>_<metric>.csv. Returns the written paths.
std::vector<std::filesystem::path> write_figures(
    const std::filesystem::path& out, const FiguresOptions& options);

}  // namespace dcount
