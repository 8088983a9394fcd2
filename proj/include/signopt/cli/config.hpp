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

#ifndef SIGNOPT_CLI_CONFIG_HPP_
#define SIGNOPT_CLI_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "signopt/optimizers.hpp"
#include "signopt/problems.hpp"
#include "signopt/votesim.hpp"

namespace signopt::cli {

/// Configuration error tied to one key of the experiment file.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class RunKind { signsgd, signum, sgd, majority };

/// Everything an experiment needs. Populated from a `key = value` file:
///
///   problem.name      sparse_noise | quadratic
///   problem.d         dimension (sparse_noise default 100, quadratic 10)
///   problem.a_min     quadratic curvature range, default 0.5
///   problem.a_max     default 2.0
///   problem.noise     none | gaussian | sparse_gaussian | uniform | skewed
///   problem.sigma     noise scale (std, or halfwidth for uniform)
///   problem.noise_indices  coordinates for sparse_gaussian, default 0
///   problem.seed      curvature / fixed-start seed
///   problem.x0        per_seed | fixed
///   problem.x0_scale  std of the Gaussian start, default 1
///   optimizer.kind    signsgd | signum | sgd | majority
///   schedule.kind     constant | thm1 | smallbatch | signum | sgd_large | sgd_small
///   schedule.delta    constant learning rate
///   schedule.batch    constant mini-batch size
///   run.K             iterations
///   run.seeds         list such as 1,2,5-9
///   run.snapshots     true | false
///   run.out           output directory
///   distributed.M     workers (majority only)
///   distributed.mode  majority | sum_of_signs
///   signum.beta       momentum, default 0.9
///   signum.delta0     base learning rate, default 0.1
///   signum.warmup     override for the warmup length
///
/// Blank lines and text after '#' are ignored. Unknown or repeated keys are
/// errors.
struct ExperimentConfig {
  std::string problem_name = "sparse_noise";
  std::optional<std::size_t> dim;
  double a_min = 0.5;
  double a_max = 2.0;
  std::optional<std::string> noise_kind;
  std::optional<double> noise_scale;
  std::vector<std::size_t> noise_indices{0};
  std::uint64_t problem_seed = 0;
  std::optional<bool> x0_per_seed;
  double x0_scale = 1.0;

  RunKind optimizer = RunKind::signsgd;
  ScheduleKind schedule = ScheduleKind::constant;
  double delta = 0.01;
  std::uint64_t batch = 1;

  std::uint64_t iterations = 100;
  std::vector<std::uint64_t> seeds{0};
  bool snapshots = false;
  std::string out_dir = "out";

  std::size_t workers = 1;
  AggregationMode mode = AggregationMode::majority;

  double beta = 0.9;
  double delta0 = 0.1;
  std::optional<std::uint64_t> warmup;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// "1,2,5-9" -> {1, 2, 5, 6, 7, 8, 9}. Throws ConfigError against `key`.
std::vector<std::uint64_t> parse_seed_list(std::string_view text,
                                           const std::string& key = "run.seeds");

std::string_view to_string(RunKind kind);

Problem build_problem(const ExperimentConfig& config);
Schedule build_schedule(const ExperimentConfig& config, const Problem& problem);
RunOptions build_run_options(const ExperimentConfig& config);

}  // namespace signopt::cli

#endif  // SIGNOPT_CLI_CONFIG_HPP_
