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

#ifndef SIGNOPT_CORE_HPP_
#define SIGNOPT_CORE_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace signopt {

/// Dense real coordinate vector. Gradients, iterates, L and sigma all use it.
using Vector = std::vector<double>;

/// Every recoverable failure in the library is reported with this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double l1_norm(std::span<const double> v);
double l2_norm(std::span<const double> v);
double linf_norm(std::span<const double> v);
bool all_finite(std::span<const double> v);

/// Throws Error(message) when any entry is NaN or infinite.
void require_finite(std::span<const double> v, const char* message);

/// Elementwise sign with sign(0) = sign(-0) = +1.
///
/// Every output entry is exactly +1.0 or -1.0, so the result is always
/// representable as one bit per coordinate.
Vector sign_vec(std::span<const double> v);

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// One step of the splitmix64 generator: advance `state` by the golden-ratio
/// increment and return the mixed output.
std::uint64_t splitmix64(std::uint64_t state);

/// Seed for worker `worker_index` derived from a run seed:
/// splitmix64(base_seed ^ (worker_index + 1) * 0x9E3779B97F4A7C15).
std::uint64_t worker_seed(std::uint64_t base_seed, std::uint64_t worker_index);

/// xoshiro256** seeded through splitmix64, with Marsaglia-polar normals.
///
/// The bit stream, uniform() and normal() are fully specified here rather
/// than delegated to <random> distributions, whose output differs between
/// standard library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal.
  double normal();

 private:
  std::array<std::uint64_t, 4> s_{};
  std::optional<double> spare_;
};

// ---------------------------------------------------------------------------
// Objectives and oracles
// ---------------------------------------------------------------------------

/// Differentiable objective with per-coordinate smoothness constants.
///
/// Implementations promise value(x) >= lower_bound() everywhere and
///   |f(y) - f(x) - g(x)^T (y - x)| <= 1/2 sum_i L_i (y_i - x_i)^2
/// for all x, y.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dim() const = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual Vector gradient(std::span<const double> x) const = 0;
  virtual const Vector& lipschitz() const = 0;
  virtual double lower_bound() const = 0;
};

/// Largest relative deviation between gradient(x) and central differences
/// with step h_i = 1e-6 (1 + |x_i|). Relative to max(1, |g_i|).
double gradient_check_error(const Objective& objective,
                            std::span<const double> x);

/// Slack of the smoothness majorization at (x, y):
///   1/2 sum_i L_i (y_i - x_i)^2 - |f(y) - f(x) - g(x)^T (y - x)|.
/// Non-negative whenever the objective honours its Lipschitz vector.
double majorization_slack(const Objective& objective, std::span<const double> x,
                          std::span<const double> y);

/// Source of unbiased single-sample stochastic gradients.
///
/// Not thread-safe: an oracle owns its random stream. Parallel work uses one
/// oracle per worker, seeded through worker_seed().
class GradientOracle {
 public:
  virtual ~GradientOracle() = default;

  virtual std::size_t dim() const = 0;
  /// One stochastic gradient at x. Increments draw_count() by one.
  virtual Vector draw(std::span<const double> x) = 0;
  virtual std::uint64_t draw_count() const = 0;
};

/// Mean of `batch` independent draws at x (running-mean accumulation, so a
/// noiseless oracle returns the gradient bit-for-bit for any batch size).
Vector minibatch_draw(GradientOracle& oracle, std::span<const double> x,
                      std::uint64_t batch);

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct StepRecord {
  std::uint64_t k = 0;
  std::optional<Vector> x;
  double f = 0.0;
  double grad_l1 = 0.0;
  double grad_l2 = 0.0;
  std::uint64_t oracle_calls = 0;
  std::uint64_t bits_up = 0;
  std::uint64_t bits_down = 0;
};

/// Append-only per-iterate log. Record k describes iterate x_k together with
/// the oracle calls and communication spent to reach it.
class Trajectory {
 public:
  void append(StepRecord record);

  const std::vector<StepRecord>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  const StepRecord& operator[](std::size_t i) const { return steps_[i]; }
  const StepRecord& back() const { return steps_.back(); }

  friend bool operator==(const Trajectory&, const Trajectory&);

 private:
  std::vector<StepRecord> steps_;
};

bool operator==(const StepRecord& a, const StepRecord& b);

/// Record for iterate x with the analytic gradient norms.
StepRecord make_record(const Objective& objective, std::uint64_t k,
                       std::span<const double> x, bool keep_x);

}  // namespace signopt

#endif  // SIGNOPT_CORE_HPP_
