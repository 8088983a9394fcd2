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

#include "signopt/optimizers.hpp"

#include <cmath>
#include <string>

namespace signopt {

namespace {

double positive_l1(std::span<const double> lipschitz) {
  const double l1 = l1_norm(lipschitz);
  if (!(l1 > 0.0)) throw Error("lipschitz vector must have positive l1 norm");
  return l1;
}

void require_iterations(std::uint64_t iterations) {
  if (iterations == 0) throw Error("schedule needs K >= 1");
}

void check_step(const Vector& x, const GradientOracle& oracle, StepSize step) {
  if (!(step.delta >= 0.0) || !std::isfinite(step.delta)) {
    throw Error("learning rate must be finite and non-negative");
  }
  if (step.batch == 0) throw Error("empty batch");
  if (x.size() != oracle.dim()) throw Error("dimension mismatch");
}

}  // namespace

StepSize schedule_thm1(std::uint64_t iterations, std::span<const double> lipschitz) {
  require_iterations(iterations);
  const double l1 = positive_l1(lipschitz);
  return {1.0 / std::sqrt(l1 * static_cast<double>(iterations)), iterations};
}

StepSize schedule_signum(std::uint64_t k, double delta0) {
  if (!(delta0 > 0.0)) throw Error("signum delta0 must be positive");
  return {delta0 / std::sqrt(static_cast<double>(k + 1)), k + 1};
}

StepSize schedule_smallbatch(std::uint64_t iterations,
                             std::span<const double> lipschitz) {
  require_iterations(iterations);
  const double l1 = positive_l1(lipschitz);
  return {1.0 / std::sqrt(l1 * static_cast<double>(iterations)), 1};
}

StepSize schedule_sgd(std::uint64_t iterations, double lipschitz_inf,
                      SgdBatchMode mode) {
  require_iterations(iterations);
  if (!(lipschitz_inf > 0.0)) throw Error("lipschitz constant must be positive");
  if (mode == SgdBatchMode::large) return {1.0 / lipschitz_inf, iterations};
  return {1.0 / (lipschitz_inf * std::sqrt(static_cast<double>(iterations))), 1};
}

std::uint64_t compute_warmup(double beta) {
  if (!(beta >= 0.0)) throw Error("momentum must be >= 0");
  if (!(beta < 1.0)) throw Error("momentum must be < 1");
  const double bound_scale = 1.0 / (1.0 - beta * beta);
  for (std::uint64_t c = 1;; ++c) {
    const double cd = static_cast<double>(c);
    const bool bias_ok = 0.5 * cd * std::pow(beta, cd) <= bound_scale / (cd + 1.0);
    const bool half_ok = std::pow(beta, cd + 1.0) <= 0.5;
    if (bias_ok && half_ok) return c;
  }
}

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::constant: return "constant";
    case ScheduleKind::thm1: return "thm1";
    case ScheduleKind::small_batch: return "smallbatch";
    case ScheduleKind::signum: return "signum";
    case ScheduleKind::sgd_large: return "sgd_large";
    case ScheduleKind::sgd_small: return "sgd_small";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  for (auto kind : {ScheduleKind::constant, ScheduleKind::thm1,
                    ScheduleKind::small_batch, ScheduleKind::signum,
                    ScheduleKind::sgd_large, ScheduleKind::sgd_small}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error("unknown schedule kind '" + std::string(name) + "'");
}

Schedule Schedule::constant(double delta, std::uint64_t batch) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw Error("learning rate must be finite and non-negative");
  }
  if (batch == 0) throw Error("empty batch");
  return Schedule(ScheduleKind::constant, {delta, batch});
}

Schedule Schedule::thm1(std::uint64_t iterations, std::span<const double> lipschitz) {
  return Schedule(ScheduleKind::thm1, schedule_thm1(iterations, lipschitz));
}

Schedule Schedule::small_batch(std::uint64_t iterations,
                               std::span<const double> lipschitz) {
  return Schedule(ScheduleKind::small_batch,
                  schedule_smallbatch(iterations, lipschitz));
}

Schedule Schedule::signum(double delta0) {
  (void)schedule_signum(0, delta0);
  return Schedule(ScheduleKind::signum, {delta0, 1});
}

Schedule Schedule::sgd(std::uint64_t iterations, double lipschitz_inf,
                       SgdBatchMode mode) {
  return Schedule(mode == SgdBatchMode::large ? ScheduleKind::sgd_large
                                              : ScheduleKind::sgd_small,
                  schedule_sgd(iterations, lipschitz_inf, mode));
}

StepSize Schedule::at(std::uint64_t k) const {
  if (kind_ == ScheduleKind::signum) return schedule_signum(k, fixed_.delta);
  return fixed_;
}

std::uint64_t Schedule::total_batch(std::uint64_t iterations) const {
  if (kind_ == ScheduleKind::signum) return iterations * (iterations + 1) / 2;
  return iterations * fixed_.batch;
}

// ---------------------------------------------------------------------------

SignumState SignumState::start(Vector x0, double beta,
                               std::optional<std::uint64_t> warmup) {
  SignumState s;
  s.beta = beta;
  s.warmup = warmup ? *warmup : compute_warmup(beta);
  s.momentum.assign(x0.size(), 0.0);
  s.x = std::move(x0);
  return s;
}

void signsgd_step(SignSgdState& state, GradientOracle& oracle, StepSize step) {
  check_step(state.x, oracle, step);
  const Vector direction = sign_vec(minibatch_draw(oracle, state.x, step.batch));
  for (std::size_t i = 0; i < state.x.size(); ++i) {
    state.x[i] -= step.delta * direction[i];
  }
  ++state.k;
}

void signum_step(SignumState& state, GradientOracle& oracle, StepSize step) {
  check_step(state.x, oracle, step);
  if (!(state.beta >= 0.0 && state.beta < 1.0)) {
    throw Error("momentum must be < 1");
  }
  const Vector g = minibatch_draw(oracle, state.x, step.batch);
  for (std::size_t i = 0; i < g.size(); ++i) {
    state.momentum[i] = state.beta * state.momentum[i] + (1.0 - state.beta) * g[i];
  }
  const Vector direction =
      state.k < state.warmup ? sign_vec(g) : sign_vec(state.momentum);
  for (std::size_t i = 0; i < state.x.size(); ++i) {
    state.x[i] -= step.delta * direction[i];
  }
  ++state.k;
}

void sgd_step(SgdState& state, GradientOracle& oracle, StepSize step) {
  check_step(state.x, oracle, step);
  const Vector g = minibatch_draw(oracle, state.x, step.batch);
  for (std::size_t i = 0; i < state.x.size(); ++i) {
    state.x[i] -= step.delta * g[i];
  }
  require_finite(state.x, "non-finite iterate");
  ++state.k;
}

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::signsgd: return "signsgd";
    case OptimizerKind::signum: return "signum";
    case OptimizerKind::sgd: return "sgd";
  }
  return "unknown";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
  for (auto kind : {OptimizerKind::signsgd, OptimizerKind::signum, OptimizerKind::sgd}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error("unknown optimizer kind '" + std::string(name) + "'");
}

namespace {

template <class State, class StepFn>
Trajectory drive(State state, const Objective& objective, GradientOracle& oracle,
                 const Schedule& schedule, std::uint64_t iterations,
                 bool snapshots, StepFn step_fn) {
  Trajectory traj;
  if (iterations == 0) return traj;
  const std::uint64_t calls0 = oracle.draw_count();
  for (std::uint64_t k = 0; k <= iterations; ++k) {
    StepRecord rec = make_record(objective, k, state.x, snapshots);
    rec.oracle_calls = oracle.draw_count() - calls0;
    traj.append(std::move(rec));
    if (k < iterations) step_fn(state, oracle, schedule.at(k));
  }
  return traj;
}

}  // namespace

Trajectory run(OptimizerKind kind, const Objective& objective,
               GradientOracle& oracle, const Schedule& schedule,
               std::uint64_t iterations, Vector x0, const RunOptions& options) {
  if (x0.size() != objective.dim() || oracle.dim() != objective.dim()) {
    throw Error("dimension mismatch");
  }
  switch (kind) {
    case OptimizerKind::signsgd:
      return drive(SignSgdState{std::move(x0)}, objective, oracle, schedule,
                   iterations, options.snapshots, signsgd_step);
    case OptimizerKind::signum:
      return drive(SignumState::start(std::move(x0), options.beta, options.warmup),
                   objective, oracle, schedule, iterations, options.snapshots,
                   signum_step);
    case OptimizerKind::sgd:
      return drive(SgdState{std::move(x0)}, objective, oracle, schedule,
                   iterations, options.snapshots, sgd_step);
  }
  throw Error("unknown optimizer kind");
}

}  // namespace signopt
