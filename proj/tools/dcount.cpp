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

// Command-line front end: simulate, figures, tradeoff, verify.

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "dcount/harness.hpp"
#include "dcount/verify.hpp"

namespace {

namespace fs = std::filesystem;
using namespace dcount;

struct SimulateArgs {
  std::string protocol = "robust";
  std::string stream = "uniform";
  std::size_t k = 64;
  double eps = 0.125;
  double c = 1.0;
  std::uint64_t events = 100000;
  std::size_t runs = 40;
  std::uint64_t seed = kDefaultMasterSeed;
  std::string out;
  std::size_t jobs = 0;
};

int simulate(const SimulateArgs& args) {
  RunConfig config;
  config.k = args.k;
  config.epsilon = args.eps;
  config.c = args.c;
  config.events = args.events;
  config.protocol = parse_protocol(args.protocol);
  config.stream = parse_stream(args.stream);
  config.validate();

  const fs::path out(args.out);
  fs::create_directories(out);
  const RunConfig configs[] = {config};
  const MatrixResult result = run_matrix(configs, args.runs, args.seed, args.jobs);
  for (const RunFailure& f : result.failures) {
    std::fprintf(stderr, "run %zu failed: %s\n", f.seed_index, f.message.c_str());
  }
  if (!result.failures.empty()) {
    return 1;
  }
  const auto runs = result.config_runs(0);
  const std::vector<std::uint64_t> indices = plot_indices(config.events);
  write_transcripts_csv(out / "transcripts.csv", runs, indices);
  for (Metric metric :
       {Metric::kMessages, Metric::kRatio, Metric::kRelativeError}) {
    write_series_csv(out / (std::string(to_string(metric)) + ".csv"),
                     aggregate(runs, metric), indices);
  }

  std::vector<double> final_messages;
  std::vector<double> final_relerr;
  std::vector<double> acc;
  for (const Transcript& t : runs) {
    const std::size_t last = t.size() - 1;
    final_messages.push_back(metric_value(Metric::kMessages, t, last));
    final_relerr.push_back(metric_value(Metric::kRelativeError, t, last));
    acc.push_back(tail_accuracy(t));
  }
  const QuantileBand m = summarize(final_messages);
  const QuantileBand e = summarize(final_relerr);
  const QuantileBand a = summarize(acc);
  std::printf("%s/%s k=%zu eps=%g c=%g N=%llu runs=%zu seed=%llu\n",
              args.protocol.c_str(), args.stream.c_str(), config.k,
              config.epsilon, config.c,
              static_cast<unsigned long long>(config.events), args.runs,
              static_cast<unsigned long long>(args.seed));
  std::printf("  M_N     median %s  [%s, %s]\n", format_double(m.median).c_str(),
              format_double(m.q05).c_str(), format_double(m.q95).c_str());
  std::printf("  relerr  median %s  [%s, %s] at t=N\n",
              format_double(e.median).c_str(), format_double(e.q05).c_str(),
              format_double(e.q95).c_str());
  std::printf("  Acc     median %s  [%s, %s]\n", format_double(a.median).c_str(),
              format_double(a.q05).c_str(), format_double(a.q95).c_str());
  std::printf("  wrote %s\n", out.string().c_str());
  return 0;
}

int figures(const fs::path& out, std::uint64_t seed, std::size_t jobs) {
  FiguresOptions options;
  options.master = seed;
  options.jobs = jobs;
  for (const fs::path& p : write_figures(out, options)) {
    std::printf("%s\n", p.string().c_str());
  }
  return 0;
}

int tradeoff_sweep(std::size_t k, std::uint64_t events, std::size_t runs,
                   const fs::path& out, std::uint64_t seed, std::size_t jobs) {
  fs::create_directories(out);
  for (ProtocolKind protocol : {ProtocolKind::kHyz12, ProtocolKind::kRobust}) {
    for (StreamKind stream : {StreamKind::kUniform, StreamKind::kAttack}) {
      TradeoffOptions options;
      options.k = k;
      options.events = events;
      options.runs = runs;
      options.protocol = protocol;
      options.stream = stream;
      options.master = seed;
      options.jobs = jobs;
      const fs::path path =
          out / ("tradeoff_" + std::string(to_string(protocol)) + "_" +
                 std::string(to_string(stream)) + "_k" + std::to_string(k) +
                 ".csv");
      write_tradeoff_csv(path, tradeoff(options));
      std::printf("%s\n", path.string().c_str());
    }
  }
  return 0;
}

int verify(const std::string& suite, std::uint64_t seed, std::size_t jobs) {
  VerifyOptions options;
  options.master = seed;
  options.jobs = jobs;
  const std::vector<CheckResult> results =
      suite.empty() ? run_acceptance(options)
                    : run_suite(parse_suite(suite), options);
  std::size_t failed = 0;
  for (const CheckResult& r : results) {
    failed += r.passed ? 0 : 1;
    std::printf("%s %-4s %s: %s\n", r.passed ? "PASS" : "FAIL", r.id.c_str(),
                r.title.c_str(), r.detail.c_str());
  }
  std::printf("%zu/%zu checks passed\n", results.size() - failed,
              results.size());
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for continuous distributed counting protocols"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "run one configuration");
  simulate_cmd->add_option("--protocol", sim.protocol, "hyz12 or robust")
      ->required()
      ->check(CLI::IsMember({"hyz12", "robust"}));
  simulate_cmd->add_option("--stream", sim.stream, "uniform or attack")
      ->required()
      ->check(CLI::IsMember({"uniform", "attack"}));
  simulate_cmd->add_option("--k", sim.k, "number of sites")->required();
  simulate_cmd->add_option("--eps", sim.eps, "accuracy parameter")->required();
  simulate_cmd->add_option("--c", sim.c, "Robust constant (>= 1)");
  simulate_cmd->add_option("--events", sim.events, "events per run")->required();
  simulate_cmd->add_option("--runs", sim.runs, "seeds")->required();
  simulate_cmd->add_option("--seed", sim.seed, "master seed");
  simulate_cmd->add_option("--out", sim.out, "output directory")->required();
  simulate_cmd->add_option("--jobs", sim.jobs, "worker threads (0 = all)");

  std::string out;
  std::uint64_t seed = kDefaultMasterSeed;
  std::size_t jobs = 0;
  auto* figures_cmd =
      app.add_subcommand("figures", "k in {64, 256}, eps=1/8, r=40, N=1e5");
  figures_cmd->add_option("--out", out, "output directory")->required();
  figures_cmd->add_option("--seed", seed, "master seed");
  figures_cmd->add_option("--jobs", jobs, "worker threads (0 = all)");

  std::size_t k = 64;
  std::uint64_t events = 100000;
  std::size_t runs = 40;
  auto* tradeoff_cmd =
      app.add_subcommand("tradeoff", "eps sweep, both protocols and streams");
  tradeoff_cmd->add_option("--k", k, "number of sites")->required();
  tradeoff_cmd->add_option("--events", events, "events per run")->required();
  tradeoff_cmd->add_option("--runs", runs, "seeds")->required();
  tradeoff_cmd->add_option("--out", out, "output directory")->required();
  tradeoff_cmd->add_option("--seed", seed, "master seed");
  tradeoff_cmd->add_option("--jobs", jobs, "worker threads (0 = all)");

  std::string suite;
  auto* verify_cmd = app.add_subcommand("verify", "statistical oracle checks");
  verify_cmd
      ->add_option("--suite", suite,
                   "distributions, invariants, accuracy or attack (default all)")
      ->check(CLI::IsMember({"distributions", "invariants", "accuracy", "attack"}));
  verify_cmd->add_option("--seed", seed, "master seed");
  verify_cmd->add_option("--jobs", jobs, "worker threads (0 = all)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*simulate_cmd) return simulate(sim);
    if (*figures_cmd) return figures(out, seed, jobs);
    if (*tradeoff_cmd) return tradeoff_sweep(k, events, runs, out, seed, jobs);
    if (*verify_cmd) return verify(suite, seed, jobs);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
