// Copyright 2026 The signopt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "signopt/cli/commands.hpp"
#include "signopt/cli/config.hpp"

namespace {

using namespace signopt;
using namespace signopt::cli;

struct Common {
  std::string config;
  std::string out;
  std::string seeds;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, Common& common, bool needs_config) {
  auto* opt = cmd->add_option("--config", common.config, "Experiment file (key = value)");
  if (needs_config) opt->required();
  cmd->add_option("--out", common.out, "Output directory");
  cmd->add_option("--seeds", common.seeds, "Seed list such as 0,3,5-9");
  cmd->add_option("--threads", common.threads, "Worker threads for seeds")
      ->check(CLI::PositiveNumber);
}

ExperimentConfig resolve_config(const Common& common) {
  ExperimentConfig config = common.config.empty() ? ExperimentConfig{}
                                                  : load_config(common.config);
  if (!common.seeds.empty()) config.seeds = parse_seed_list(common.seeds, "--seeds");
  return config;
}

fs::path out_dir(const Common& common, const ExperimentConfig& config) {
  return common.out.empty() ? fs::path(config.out_dir) : fs::path(common.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sign-based stochastic optimization experiments"};
  app.require_subcommand(1);

  Common common;

  auto* run = app.add_subcommand("run", "Run a configured experiment over its seeds");
  add_common(run, common, true);

  auto* sparse = app.add_subcommand("reproduce-sparse-noise",
                                    "signSGD vs SGD on the sparse-noise toy problem");
  add_common(sparse, common, false);
  std::uint64_t sparse_steps = 1000;
  sparse->add_option("--steps", sparse_steps, "Iterations per run");

  auto* bounds = app.add_subcommand("bounds", "Compare a run against its convergence bound");
  add_common(bounds, common, true);

  auto* comm = app.add_subcommand("commcost", "Bits per iteration for each scheme");
  add_common(comm, common, false);
  std::size_t workers = 2, dim = 10;
  std::uint64_t iterations = 1;
  comm->add_option("--workers,-M", workers)->check(CLI::PositiveNumber);
  comm->add_option("--dim,-d", dim)->check(CLI::PositiveNumber);
  comm->add_option("--iterations,-K", iterations)->check(CLI::PositiveNumber);

  auto* stats = app.add_subcommand("stats", "Gradient density and noise statistics");
  add_common(stats, common, false);
  std::uint64_t samples = 1000;
  std::string points_path;
  stats->add_option("--samples", samples)->check(CLI::Range(2, 100000000));
  stats->add_option("--points", points_path, "CSV of points, one per row");

  auto* vote = app.add_subcommand("votesim", "Monte Carlo majority-vote error rates");
  add_common(vote, common, false);
  VoteSimOptions vote_opts;
  std::string dump;
  vote->add_option("--noise", vote_opts.noise)->check(CLI::IsMember({"gaussian", "skewed"}));
  vote->add_option("--snr", vote_opts.snr);
  vote->add_option("--workers,-M", vote_opts.workers)->delimiter(',');
  vote->add_option("--rounds", vote_opts.rounds)->check(CLI::PositiveNumber);
  vote->add_option("--seed", vote_opts.seed);
  vote->add_option("--dump", dump, "Write one round of serialized messages here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run->parsed()) {
      const auto config = resolve_config(common);
      return cmd_run(config, out_dir(common, config), common.threads, std::cout);
    }
    if (sparse->parsed()) {
      SparseNoiseOptions opts;
      opts.steps = sparse_steps;
      if (!common.seeds.empty()) opts.seeds = parse_seed_list(common.seeds, "--seeds");
      return cmd_reproduce_sparse_noise(opts, common.out.empty() ? "out" : common.out,
                                        common.threads, std::cout);
    }
    if (bounds->parsed()) {
      return cmd_bounds(resolve_config(common), common.threads, std::cout);
    }
    if (comm->parsed()) {
      std::optional<fs::path> dir;
      if (!common.out.empty()) dir = common.out;
      return cmd_commcost(workers, dim, iterations, dir, std::cout);
    }
    if (stats->parsed()) {
      const auto config = resolve_config(common);
      std::vector<Vector> points;
      if (!points_path.empty()) points = read_points_csv(points_path);
      return cmd_stats(config, points, samples, out_dir(common, config), std::cout);
    }
    if (vote->parsed()) {
      if (!dump.empty()) vote_opts.dump = dump;
      return cmd_votesim(vote_opts, common.out.empty() ? "out" : common.out, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfigError;
  }
  return kExitConfigError;
}
