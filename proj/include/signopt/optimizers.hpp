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

#ifndef SIGNOPT_OPTIMIZERS_HPP_
#define SIGNOPT_OPTIMIZERS_HPP_

#include <cstdint>
#include <optional>
#include <string_view>

#include "signopt/core.hpp"

namespace signopt {

/// Learning rate and mini-batch size for one iteration.
struct StepSize {
  double delta = 0.0;
  std::uint64_t batch = 1;
};

// ---------------------------------------------------------------------------
// Schedules
// ---------------------------------------------------------------------------

/// Large-batch signSGD: delta = 1 / sqrt(||L||_1 K), batch = K.
StepSize schedule_thm1(std::uint64_t iterations, std::span<const double> lipschitz);

/// Any-time Signum: delta_k = delta0 / sqrt(k + 1), batch_k = k + 1.
StepSize schedule_signum(std::uint64_t k, double delta0);

/// Small-batch signSGD: delta = 1 / sqrt(||L||_1 K), batch = 1.
StepSize schedule_smallbatch(std::uint64_t iterations,
                             std::span<const double> lipschitz);

enum class SgdBatchMode { large, small };

/// SGD: large -> (1 / L_inf, K); small -> (1 / (L_inf sqrt(K)), 1).
StepSize schedule_sgd(std::uint64_t iterations, double lipschitz_inf,
                      SgdBatchMode mode);

/// Smallest positive integer C with
///   (C / 2) beta^C <= 1 / ((1 - beta^2)(C + 1))  and  beta^(C + 1) <= 1/2.
std::uint64_t compute_warmup(double beta);

enum class ScheduleKind { constant, thm1, small_batch, signum, sgd_large, sgd_small };

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view name);

/// Per-iteration step sizes for a run of known length.
class Schedule {
 public:
  static Schedule constant(double delta, std::uint64_t batch);
  static Schedule thm1(std::uint64_t iterations, std::span<const double> lipschitz);
  static Schedule small_batch(std::uint64_t iterations,
                              std::span<const double> lipschitz);
  static Schedule signum(double delta0);
  static Schedule sgd(std::uint64_t iterations, double lipschitz_inf,
                      SgdBatchMode mode);

  ScheduleKind kind() const { return kind_; }
  StepSize at(std::uint64_t k) const;

  /// Exact oracle calls consumed by the first `iterations` steps.
  std::uint64_t total_batch(std::uint64_t iterations) const;

 private:
  Schedule(ScheduleKind kind, StepSize fixed) : kind_(kind), fixed_(fixed) {}

  ScheduleKind kind_;
  StepSize fixed_;  // delta0 for signum
};

// ---------------------------------------------------------------------------
// Optimizer states and steps
// ---------------------------------------------------------------------------

struct SignSgdState {
  Vector x;
  std::uint64_t k = 0;
};

/// Signum keeps the unnormalized momentum m <- beta m + (1 - beta) g.
/// For k < warmup it steps along sign(g) while still accumulating m.
struct SignumState {
  Vector x;
  Vector momentum;
  std::uint64_t k = 0;
  double beta = 0.9;
  std::uint64_t warmup = 0;

  /// Zero momentum; warmup defaults to compute_warmup(beta).
  static SignumState start(Vector x0, double beta,
                           std::optional<std::uint64_t> warmup = std::nullopt);
};

struct SgdState {
  Vector x;
  std::uint64_t k = 0;
};

void signsgd_step(SignSgdState& state, GradientOracle& oracle, StepSize step);
void signum_step(SignumState& state, GradientOracle& oracle, StepSize step);
void sgd_step(SgdState& state, GradientOracle& oracle, StepSize step);

enum class OptimizerKind { signsgd, signum, sgd };

std::string_view to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(std::string_view name);

struct RunOptions {
  bool snapshots = false;
  double beta = 0.9;
  std::optional<std::uint64_t> warmup;
};

/// Runs `iterations` steps from x0 and records iterates 0..iterations.
/// Zero iterations yields an empty trajectory. Gradient norms come from the
/// analytic gradient of `objective`, not from the oracle.
Trajectory run(OptimizerKind kind, const Objective& objective,
               GradientOracle& oracle, const Schedule& schedule,
               std::uint64_t iterations, Vector x0, const RunOptions& options = {});

}  // namespace signopt

#endif  // SIGNOPT_OPTIMIZERS_HPP_
