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

#ifndef SIGNOPT_CLI_COMMANDS_HPP_
#define SIGNOPT_CLI_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "signopt/cli/config.hpp"
#include "signopt/core.hpp"
#include "signopt/stats.hpp"

namespace signopt::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitCheckFailed = 2 };

/// Calls fn(i) for i in [0, n) on up to `threads` threads. Exceptions are
/// rethrown on the caller (the first by index).
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

/// One trajectory for one seed of the configured experiment.
Trajectory run_seed(const ExperimentConfig& config, const Problem& problem,
                    std::uint64_t seed);

/// Trajectories in the order of config.seeds, regardless of thread count.
std::vector<Trajectory> run_experiment(const ExperimentConfig& config,
                                       unsigned threads = 1);

struct AggregateRow {
  std::uint64_t k = 0;
  double f_mean = 0.0;
  double f_std = 0.0;
  double g1_mean = 0.0;
  double g1_std = 0.0;
};

/// Per-step mean and population std across trajectories of equal length.
std::vector<AggregateRow> aggregate(const std::vector<Trajectory>& runs);

/// 17 significant digits, '.' decimal point.
std::string format_double(double value);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_snapshot_csv(std::ostream& out, const Trajectory& traj);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);

/// Writes seed_<s>.csv per seed and aggregate.csv into `out_dir`.
int cmd_run(const ExperimentConfig& config, const fs::path& out_dir,
            unsigned threads, std::ostream& log);

// ---------------------------------------------------------------------------

struct SparseNoiseOptions {
  std::vector<std::uint64_t> seeds;  // empty -> 0..49
  std::uint64_t steps = 1000;
  double signsgd_delta = 0.01;
  double sgd_delta = 0.001;
};

struct SparseNoiseReport {
  std::vector<AggregateRow> signsgd;
  std::vector<AggregateRow> sgd;
  double signsgd_final = 0.0;
  double sgd_final = 0.0;
  bool pass = false;
};

SparseNoiseReport reproduce_sparse_noise(const SparseNoiseOptions& options,
                                         unsigned threads = 1);

/// Writes sparse_noise.csv with +/- 1 std bands for both optimizers.
int cmd_reproduce_sparse_noise(const SparseNoiseOptions& options,
                               const fs::path& out_dir, unsigned threads,
                               std::ostream& log);

// ---------------------------------------------------------------------------

struct BoundReport {
  std::string theorem;
  double lhs = 0.0;
  double rhs = 0.0;
  std::uint64_t oracle_calls = 0;
  bool pass = false;

  double margin() const { return rhs - lhs; }
};

/// Runs the configured experiment and compares the guarantee's statistic
/// against its closed-form right-hand side. Supported pairings:
///   signsgd + thm1        (mean_k ||g_k||_1)^2 vs thm1_rhs
///   majority + thm1       same statistic vs thm2b_rhs
///   signsgd + smallbatch  min_k mixed_norm vs smallbatch_rhs
///   sgd + sgd_large/small mean_k ||g_k||_2^2 vs sgd_rhs
///   signum + signum       post-warmup statistic / signum_bound_shape <= 10
/// Seed averages are taken before squaring. When x0 varies by seed the
/// largest f0 is used.
BoundReport evaluate_bound(const ExperimentConfig& config, unsigned threads = 1);

int cmd_bounds(const ExperimentConfig& config, unsigned threads, std::ostream& log);

// ---------------------------------------------------------------------------

struct CommCostRow {
  std::string scheme;
  double bits_per_iter = 0.0;
  double bits_per_run = 0.0;
};

struct CommCostReport {
  std::vector<CommCostRow> rows;
  std::uint64_t measured_up = 0;
  std::uint64_t measured_down = 0;            // broadcast counted once
  std::uint64_t measured_down_delivered = 0;  // one copy per worker
  double measured_per_iter = 0.0;             // (up + delivered) / rounds
  bool pass = false;
};

/// Formula table plus a simulated majority-vote run of `iterations` rounds.
CommCostReport commcost(std::size_t workers, std::size_t dim, std::uint64_t iterations);

int cmd_commcost(std::size_t workers, std::size_t dim, std::uint64_t iterations,
                 const std::optional<fs::path>& out_dir, std::ostream& log);

// ---------------------------------------------------------------------------

struct StatsRow {
  std::size_t point = 0;
  GradientStats stats;
  double phi_lipschitz = 0.0;
};

/// Gradient moments and densities at each point, `samples` draws apiece.
std::vector<StatsRow> gradient_stats(const ExperimentConfig& config,
                                     const std::vector<Vector>& points,
                                     std::uint64_t samples);

/// Reads rows of comma-separated coordinates; '#' lines and a header row
/// starting with a non-numeric field are skipped.
std::vector<Vector> read_points_csv(const fs::path& path);

/// Writes stats.csv (point, phi_g, phi_sigma, phi_L, R1, R2) and
/// stats_coords.csv (point, i, mean, std). Points default to each seed's x0.
int cmd_stats(const ExperimentConfig& config, const std::vector<Vector>& points,
              std::uint64_t samples, const fs::path& out_dir, std::ostream& log);

// ---------------------------------------------------------------------------

struct VoteSimOptions {
  std::string noise = "gaussian";  // gaussian | skewed
  double snr = 1.0;
  std::vector<std::size_t> workers{1, 3, 9, 33};
  std::uint64_t rounds = 100000;
  std::uint64_t seed = 0;
  /// Directory receiving up_<m>.bin and decision.bin from one 16-dimensional
  /// round with the largest worker count.
  std::optional<fs::path> dump;
};

struct VoteSimRow {
  std::size_t workers = 0;
  VoteErrorEstimate estimate;
  double bound = 0.0;  // NaN for the skewed variable
};

std::vector<VoteSimRow> votesim(const VoteSimOptions& options);

/// Writes votesim.csv (M, error_rate, standard_error, bound).
int cmd_votesim(const VoteSimOptions& options, const fs::path& out_dir,
                std::ostream& log);

}  // namespace signopt::cli

#endif  // SIGNOPT_CLI_COMMANDS_HPP_
