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

#include "dcount/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <system_error>
#include <thread>
#include <tuple>

namespace dcount {

std::size_t resolve_jobs(std::size_t jobs) {
  if (jobs != 0) {
    return jobs;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<RunFailure> for_each_run(
    std::span<const RunConfig> configs, std::size_t runs,
    std::uint64_t master, std::size_t jobs,
    const std::function<void(const RunSlot&)>& body) {
  if (runs == 0) {
    throw std::invalid_argument("for_each_run: need at least one run");
  }
  const std::size_t total = configs.size() * runs;
  std::atomic<std::size_t> next{0};
  std::mutex failures_mutex;
  std::vector<RunFailure> failures;

  auto worker = [&] {
    for (std::size_t slot = next++; slot < total; slot = next++) {
      RunSlot run_slot{slot / runs, slot % runs, {}};
      run_slot.config = configs[run_slot.config_index];
      run_slot.config.seed = run_seed(master, run_slot.seed_index);
      try {
        body(run_slot);
      } catch (const std::exception& e) {
        std::lock_guard lock(failures_mutex);
        failures.push_back(
            {run_slot.config_index, run_slot.seed_index, e.what()});
      }
    }
  };

  const std::size_t workers = std::min(resolve_jobs(jobs), total);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) {
      pool.emplace_back(worker);
    }
  }
  std::sort(failures.begin(), failures.end(),
            [](const RunFailure& a, const RunFailure& b) {
              return std::tie(a.config_index, a.seed_index) <
                     std::tie(b.config_index, b.seed_index);
            });
  return failures;
}

MatrixResult run_matrix(std::span<const RunConfig> configs, std::size_t runs,
                        std::uint64_t master, std::size_t jobs) {
  MatrixResult result;
  result.runs = runs;
  result.transcripts.resize(configs.size() * runs);
  result.failures =
      for_each_run(configs, runs, master, jobs, [&](const RunSlot& slot) {
        result.transcripts[slot.config_index * runs + slot.seed_index] =
            run(slot.config);
      });
  return result;
}

std::string_view to_string(Metric metric) noexcept {
  switch (metric) {
    case Metric::kMessages:
      return "messages";
    case Metric::kRatio:
      return "ratio";
    case Metric::kRelativeError:
      return "relerr";
  }
  return "?";
}

double metric_value(Metric metric, const Transcript& transcript,
                    std::size_t row) {
  const double t = static_cast<double>(row + 1);
  switch (metric) {
    case Metric::kMessages:
      return static_cast<double>(transcript.messages[row]);
    case Metric::kRatio:
      return transcript.estimate[row] / t;
    case Metric::kRelativeError:
      return std::abs(transcript.estimate[row] - t) / t;
  }
  return 0.0;
}

double nearest_rank(std::span<const double> sorted, unsigned percent) {
  if (sorted.empty() || percent > 100) {
    throw std::invalid_argument("nearest_rank: empty sample or bad percent");
  }
  const std::size_t r = sorted.size();
  std::size_t rank = (static_cast<std::size_t>(percent) * r + 99) / 100;
  rank = std::clamp<std::size_t>(rank, 1, r);
  return sorted[rank - 1];
}

QuantileBand summarize(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("summarize: empty sample");
  }
  std::sort(values.begin(), values.end());
  const std::size_t r = values.size();
  QuantileBand band;
  band.median = r % 2 == 1 ? values[r / 2]
                           : 0.5 * (values[r / 2 - 1] + values[r / 2]);
  band.q05 = nearest_rank(values, 5);
  band.q95 = nearest_rank(values, 95);
  return band;
}

AggregateSeries aggregate(std::span<const Transcript> transcripts,
                          Metric metric) {
  if (transcripts.empty()) {
    throw std::invalid_argument("aggregate: no transcripts");
  }
  const std::size_t n = transcripts.front().size();
  for (const Transcript& t : transcripts) {
    if (t.size() != n) {
      throw std::invalid_argument("aggregate: transcripts differ in length (" +
                                  std::to_string(t.size()) + " vs " +
                                  std::to_string(n) + ")");
    }
  }
  AggregateSeries series;
  series.metric = metric;
  series.median.resize(n);
  series.q05.resize(n);
  series.q95.resize(n);
  std::vector<double> column(transcripts.size());
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t j = 0; j < transcripts.size(); ++j) {
      column[j] = metric_value(metric, transcripts[j], row);
    }
    const QuantileBand band = summarize(column);
    series.median[row] = band.median;
    series.q05[row] = band.q05;
    series.q95[row] = band.q95;
  }
  return series;
}

std::vector<double> epsilon_grid(std::size_t k) {
  if (k == 0) {
    throw std::invalid_argument("epsilon_grid: need k >= 1");
  }
  std::vector<double> grid;
  const double root = std::sqrt(static_cast<double>(k));
  for (int i = -3; i <= 2; ++i) {
    const double eps = std::ldexp(1.0, i) / root;
    if (eps <= 0.5) {
      grid.push_back(eps);
    }
  }
  if (grid.empty()) {
    throw std::invalid_argument("epsilon_grid: every grid value exceeds 1/2 "
                                "for k=" +
                                std::to_string(k));
  }
  return grid;
}

TailAccuracy::TailAccuracy(std::uint64_t horizon)
    : first_(std::max<std::uint64_t>(1, horizon / 2)), last_(horizon) {
  if (horizon == 0) {
    throw std::invalid_argument("TailAccuracy: empty horizon");
  }
}

void TailAccuracy::add(std::uint64_t t, double estimate) {
  if (t < first_ || t > last_) {
    return;
  }
  const double n = static_cast<double>(t);
  sum_ += std::abs(estimate - n) / n;
  ++terms_;
}

double TailAccuracy::value() const {
  if (terms_ != last_ - first_ + 1) {
    throw std::logic_error("TailAccuracy: incomplete tail window");
  }
  return sum_ / static_cast<double>(terms_);
}

double tail_accuracy(const Transcript& transcript) {
  TailAccuracy acc(transcript.size());
  for (std::size_t row = 0; row < transcript.size(); ++row) {
    acc.add(row + 1, transcript.estimate[row]);
  }
  return acc.value();
}

std::vector<TradeoffPoint> tradeoff(const TradeoffOptions& options) {
  const std::vector<double> grid = epsilon_grid(options.k);
  std::vector<RunConfig> configs;
  for (double eps : grid) {
    RunConfig config;
    config.k = options.k;
    config.epsilon = eps;
    config.c = options.c;
    config.events = options.events;
    config.protocol = options.protocol;
    config.stream = options.stream;
    config.validate();
    configs.push_back(config);
  }
  const std::size_t runs = options.runs;
  std::vector<double> comm(configs.size() * runs);
  std::vector<double> acc(configs.size() * runs);
  const auto failures = for_each_run(
      configs, runs, options.master, options.jobs, [&](const RunSlot& slot) {
        TailAccuracy tail(slot.config.events);
        std::uint64_t messages = 0;
        run(slot.config, [&](const EventRecord& row, const Engine&) {
          tail.add(row.t, row.estimate);
          messages = row.messages;
        });
        const std::size_t at = slot.config_index * runs + slot.seed_index;
        comm[at] = static_cast<double>(messages);
        acc[at] = tail.value();
      });
  if (!failures.empty()) {
    throw std::runtime_error("tradeoff: run failed for epsilon=" +
                             format_double(grid[failures[0].config_index]) +
                             ": " + failures[0].message);
  }
  std::vector<TradeoffPoint> points;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto first = static_cast<std::ptrdiff_t>(i * runs);
    const auto last = first + static_cast<std::ptrdiff_t>(runs);
    points.push_back(
        {grid[i],
         summarize(std::vector<double>(comm.begin() + first,
                                       comm.begin() + last)),
         summarize(
             std::vector<double>(acc.begin() + first, acc.begin() + last))});
  }
  return points;
}

std::vector<std::uint64_t> plot_indices(std::uint64_t horizon) {
  std::vector<std::uint64_t> out;
  const std::uint64_t dense = std::min<std::uint64_t>(horizon, 1000);
  for (std::uint64_t t = 1; t <= dense; ++t) {
    out.push_back(t);
  }
  for (int j = 1;; ++j) {
    const auto t = static_cast<std::uint64_t>(
        std::llround(1000.0 * std::pow(10.0, j / 200.0)));
    if (t >= horizon) {
      break;
    }
    if (t > out.back()) {
      out.push_back(t);
    }
  }
  if (out.back() != horizon) {
    out.push_back(horizon);
  }
  return out;
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (result.ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buffer, result.ptr);
}

namespace {

class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) {
      throw std::runtime_error("cannot open " + path_.string() +
                               " for writing");
    }
  }

  std::ofstream& stream() { return out_; }

  void close() {
    out_.close();
    if (!out_) {
      throw std::runtime_error("write failed for " + path_.string());
    }
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace

void write_series_csv(const std::filesystem::path& path,
                      const AggregateSeries& series,
                      std::span<const std::uint64_t> indices) {
  CsvFile file(path);
  auto& out = file.stream();
  out << "t,median,q05,q95\n";
  for (std::uint64_t t : indices) {
    if (t == 0 || t > series.size()) {
      throw std::out_of_range("write_series_csv: index " + std::to_string(t) +
                              " outside the series");
    }
    const std::size_t row = t - 1;
    out << t << ',' << format_double(series.median[row]) << ','
        << format_double(series.q05[row]) << ','
        << format_double(series.q95[row]) << '\n';
  }
  file.close();
}

void write_tradeoff_csv(const std::filesystem::path& path,
                        std::span<const TradeoffPoint> points) {
  CsvFile file(path);
  auto& out = file.stream();
  out << "epsilon,comm_med,comm_q05,comm_q95,acc_med,acc_q05,acc_q95\n";
  for (const TradeoffPoint& p : points) {
    out << format_double(p.epsilon) << ',' << format_double(p.comm.median)
        << ',' << format_double(p.comm.q05) << ','
        << format_double(p.comm.q95) << ',' << format_double(p.acc.median)
        << ',' << format_double(p.acc.q05) << ',' << format_double(p.acc.q95)
        << '\n';
  }
  file.close();
}

void write_transcripts_csv(const std::filesystem::path& path,
                           std::span<const Transcript> transcripts,
                           std::span<const std::uint64_t> indices) {
  CsvFile file(path);
  auto& out = file.stream();
  out << "seed,t,n_hat,messages_cum,round\n";
  for (const Transcript& tr : transcripts) {
    for (std::uint64_t t : indices) {
      if (t == 0 || t > tr.size()) {
        throw std::out_of_range("write_transcripts_csv: index " +
                                std::to_string(t) + " outside the run");
      }
      const std::size_t row = t - 1;
      out << tr.seed << ',' << t << ',' << format_double(tr.estimate[row])
          << ',' << tr.messages[row] << ',' << tr.round[row] << '\n';
    }
  }
  file.close();
}

std::vector<std::filesystem::path> write_figures(
    const std::filesystem::path& out, const FiguresOptions& options) {
  std::filesystem::create_directories(out);
  const std::vector<std::uint64_t> indices = plot_indices(options.events);
  std::vector<std::filesystem::path> written;
  for (std::size_t k : options.ks) {
    for (ProtocolKind protocol : {ProtocolKind::kHyz12, ProtocolKind::kRobust}) {
      for (StreamKind stream : {StreamKind::kUniform, StreamKind::kAttack}) {
        RunConfig config;
        config.k = k;
        config.epsilon = options.epsilon;
        config.c = options.c;
        config.events = options.events;
        config.protocol = protocol;
        config.stream = stream;
        const RunConfig configs[] = {config};
        const MatrixResult result =
            run_matrix(configs, options.runs, options.master, options.jobs);
        if (!result.failures.empty()) {
          throw std::runtime_error("figures: " + std::string(to_string(protocol)) +
                                   "/" + std::string(to_string(stream)) +
                                   " k=" + std::to_string(k) + ": " +
                                   result.failures.front().message);
        }
        for (Metric metric :
             {Metric::kMessages, Metric::kRatio, Metric::kRelativeError}) {
          const auto path =
              out / (std::string(to_string(protocol)) + "_" +
                     std::string(to_string(stream)) + "_k" +
                     std::to_string(k) + "_" + std::string(to_string(metric)) +
                     ".csv");
          write_series_csv(path, aggregate(result.config_runs(0), metric),
                           indices);
          written.push_back(path);
        }
      }
    }
  }
  return written;
}

}  // namespace dcount
