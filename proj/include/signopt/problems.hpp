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

#ifndef SIGNOPT_PROBLEMS_HPP_
#define SIGNOPT_PROBLEMS_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "signopt/core.hpp"

namespace signopt {

/// Separable quadratic f(x) = 1/2 sum_i a_i x_i^2 with a_i > 0.
/// L = a, f* = 0, and the smoothness majorization holds with equality.
class QuadraticProblem final : public Objective {
 public:
  explicit QuadraticProblem(Vector curvatures);

  std::size_t dim() const override { return curvatures_.size(); }
  double value(std::span<const double> x) const override;
  Vector gradient(std::span<const double> x) const override;
  const Vector& lipschitz() const override { return curvatures_; }
  double lower_bound() const override { return 0.0; }

  const Vector& curvatures() const { return curvatures_; }

 private:
  Vector curvatures_;
};

namespace noise {

struct None {};

struct GaussianPerCoord {
  Vector std;
};

/// Gaussian noise of one scale on a subset of coordinates, zero elsewhere.
struct SparseGaussian {
  double std = 0.0;
  std::vector<std::size_t> indices{0};
};

/// Uniform on [-h_i, h_i]; standard deviation h_i / sqrt(3).
struct UniformPerCoord {
  Vector halfwidth;
};

/// Two-point variable X with P[X = hi] = hi_prob, P[X = lo] = 1 - hi_prob,
/// acting on a single coordinate.
///
/// As additive noise it is recentred to zero mean, so a stochastic gradient
/// coordinate equals g_c + X - E[X]. At g_c = E[X] that is the raw variable.
struct SkewedTwoPoint {
  double hi = 50.0;
  double hi_prob = 0.1;
  double lo = -1.0;
  std::size_t coordinate = 0;

  double mean() const { return hi_prob * hi + (1.0 - hi_prob) * lo; }
  double stddev() const;
  /// One draw of X itself (not recentred).
  double sample_raw(Rng& rng) const;
};

}  // namespace noise

/// Per-coordinate independent additive gradient noise.
class NoiseModel {
 public:
  using Variant = std::variant<noise::None, noise::GaussianPerCoord,
                               noise::SparseGaussian, noise::UniformPerCoord,
                               noise::SkewedTwoPoint>;

  NoiseModel() = default;
  template <class T>
    requires std::is_constructible_v<Variant, T&&>
  NoiseModel(T&& v) : variant_(std::forward<T>(v)) {}  // NOLINT(google-explicit-constructor)

  const Variant& variant() const { return variant_; }
  std::string name() const;

  /// Throws Error when the model does not fit a d-dimensional problem.
  void validate(std::size_t d) const;

  /// Exact per-coordinate standard deviation of the added noise.
  Vector sigma(std::size_t d) const;

  /// Adds one noise sample to g in place, coordinates in ascending order.
  void perturb(std::span<double> g, Rng& rng) const;

  /// One zero-mean noise sample for coordinate i alone.
  double sample_coordinate(std::size_t i, Rng& rng) const;

 private:
  Variant variant_{noise::None{}};
};

/// gradient(x) plus one sample of `noise`.
Vector draw_noisy_gradient(const Objective& objective, const NoiseModel& noise,
                           std::span<const double> x, Rng& rng);

/// Objective + noise model + seeded random stream.
class StochasticOracle final : public GradientOracle {
 public:
  StochasticOracle(std::shared_ptr<const Objective> objective, NoiseModel noise,
                   std::uint64_t seed);

  std::size_t dim() const override { return objective_->dim(); }
  Vector draw(std::span<const double> x) override;
  std::uint64_t draw_count() const override { return draws_; }

  const Objective& objective() const { return *objective_; }
  const NoiseModel& noise() const { return noise_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::shared_ptr<const Objective> objective_;
  NoiseModel noise_;
  std::uint64_t seed_;
  Rng rng_;
  std::uint64_t draws_ = 0;
};

/// A synthetic problem with analytic L, sigma and f*.
struct Problem {
  std::string name;
  std::shared_ptr<const QuadraticProblem> objective;
  NoiseModel noise;
  /// Initial point drawn from the run seed (true) or fixed by `seed` (false).
  bool x0_per_seed = true;
  std::uint64_t seed = 0;
  double x0_scale = 1.0;

  std::size_t dim() const { return objective->dim(); }
  Vector sigma() const { return noise.sigma(dim()); }
  /// Spherical Gaussian start with standard deviation x0_scale.
  Vector initial_point(std::uint64_t run_seed) const;
  StochasticOracle make_oracle(std::uint64_t oracle_seed) const;
};

/// d = 100, f(x) = 1/2 ||x||^2, N(0, 100^2) noise on coordinate 0 only,
/// unit spherical Gaussian start drawn from the run seed.
Problem make_sparse_noise_problem();

struct QuadraticSpec {
  std::size_t dim = 10;
  double a_min = 0.5;
  double a_max = 2.0;
  NoiseModel noise;
  std::uint64_t seed = 0;
  bool x0_per_seed = false;
  double x0_scale = 1.0;
};

/// Quadratic with curvatures drawn uniformly from [a_min, a_max] using `seed`.
Problem make_quadratic_problem(const QuadraticSpec& spec);

}  // namespace signopt

#endif  // SIGNOPT_PROBLEMS_HPP_
