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

#include "signopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace signopt {

namespace {

// Stream tags keep the initial point and curvature draws independent of the
// oracle stream that uses the bare seed.
constexpr std::uint64_t kInitialPointStream = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kCurvatureStream = 0x8CB92BA72F3D8DD7ULL;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_index(std::size_t i, std::size_t d) {
  if (i >= d) {
    throw Error("noise coordinate " + std::to_string(i) +
                " out of range for dimension " + std::to_string(d));
  }
}

}  // namespace

QuadraticProblem::QuadraticProblem(Vector curvatures)
    : curvatures_(std::move(curvatures)) {
  if (curvatures_.empty()) throw Error("quadratic needs dimension >= 1");
  for (double a : curvatures_) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw Error("quadratic curvatures must be positive and finite");
    }
  }
}

double QuadraticProblem::value(std::span<const double> x) const {
  double f = 0.0;
  for (std::size_t i = 0; i < curvatures_.size(); ++i) {
    f += curvatures_[i] * x[i] * x[i];
  }
  return 0.5 * f;
}

Vector QuadraticProblem::gradient(std::span<const double> x) const {
  Vector g(curvatures_.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = curvatures_[i] * x[i];
  return g;
}

// ---------------------------------------------------------------------------

namespace noise {

double SkewedTwoPoint::stddev() const {
  const double mu = mean();
  const double second = hi_prob * hi * hi + (1.0 - hi_prob) * lo * lo;
  return std::sqrt(std::max(0.0, second - mu * mu));
}

double SkewedTwoPoint::sample_raw(Rng& rng) const {
  return rng.uniform() < hi_prob ? hi : lo;
}

}  // namespace noise

std::string NoiseModel::name() const {
  return std::visit(
      Overloaded{
          [](const noise::None&) { return std::string("none"); },
          [](const noise::GaussianPerCoord&) { return std::string("gaussian"); },
          [](const noise::SparseGaussian&) { return std::string("sparse_gaussian"); },
          [](const noise::UniformPerCoord&) { return std::string("uniform"); },
          [](const noise::SkewedTwoPoint&) { return std::string("skewed"); },
      },
      variant_);
}

void NoiseModel::validate(std::size_t d) const {
  auto check_len = [d](const Vector& v, const char* what) {
    if (v.size() != d) {
      throw Error(std::string(what) + " length " + std::to_string(v.size()) +
                  " does not match dimension " + std::to_string(d));
    }
    for (double e : v) {
      if (!(e >= 0.0) || !std::isfinite(e)) {
        throw Error(std::string(what) + " must be non-negative and finite");
      }
    }
  };
  std::visit(Overloaded{
                 [](const noise::None&) {},
                 [&](const noise::GaussianPerCoord& n) { check_len(n.std, "noise std"); },
                 [&](const noise::SparseGaussian& n) {
                   if (!(n.std >= 0.0)) throw Error("noise std must be non-negative");
                   for (std::size_t i : n.indices) require_index(i, d);
                 },
                 [&](const noise::UniformPerCoord& n) {
                   check_len(n.halfwidth, "noise halfwidth");
                 },
                 [&](const noise::SkewedTwoPoint& n) {
                   require_index(n.coordinate, d);
                   if (!(n.hi_prob >= 0.0 && n.hi_prob <= 1.0)) {
                     throw Error("skewed noise probability must lie in [0, 1]");
                   }
                 },
             },
             variant_);
}

Vector NoiseModel::sigma(std::size_t d) const {
  validate(d);
  Vector s(d, 0.0);
  std::visit(Overloaded{
                 [](const noise::None&) {},
                 [&](const noise::GaussianPerCoord& n) { s = n.std; },
                 [&](const noise::SparseGaussian& n) {
                   for (std::size_t i : n.indices) s[i] = n.std;
                 },
                 [&](const noise::UniformPerCoord& n) {
                   for (std::size_t i = 0; i < d; ++i) {
                     s[i] = n.halfwidth[i] / std::sqrt(3.0);
                   }
                 },
                 [&](const noise::SkewedTwoPoint& n) { s[n.coordinate] = n.stddev(); },
             },
             variant_);
  return s;
}

void NoiseModel::perturb(std::span<double> g, Rng& rng) const {
  validate(g.size());
  std::visit(Overloaded{
                 [](const noise::None&) {},
                 [&](const noise::GaussianPerCoord& n) {
                   for (std::size_t i = 0; i < g.size(); ++i) {
                     g[i] += n.std[i] * rng.normal();
                   }
                 },
                 [&](const noise::SparseGaussian& n) {
                   for (std::size_t i : n.indices) g[i] += n.std * rng.normal();
                 },
                 [&](const noise::UniformPerCoord& n) {
                   for (std::size_t i = 0; i < g.size(); ++i) {
                     g[i] += n.halfwidth[i] * (2.0 * rng.uniform() - 1.0);
                   }
                 },
                 [&](const noise::SkewedTwoPoint& n) {
                   g[n.coordinate] += n.sample_raw(rng) - n.mean();
                 },
             },
             variant_);
}

double NoiseModel::sample_coordinate(std::size_t i, Rng& rng) const {
  return std::visit(
      Overloaded{
          [](const noise::None&) { return 0.0; },
          [&](const noise::GaussianPerCoord& n) {
            require_index(i, n.std.size());
            return n.std[i] * rng.normal();
          },
          [&](const noise::SparseGaussian& n) {
            for (std::size_t j : n.indices) {
              if (j == i) return n.std * rng.normal();
            }
            return 0.0;
          },
          [&](const noise::UniformPerCoord& n) {
            require_index(i, n.halfwidth.size());
            return n.halfwidth[i] * (2.0 * rng.uniform() - 1.0);
          },
          [&](const noise::SkewedTwoPoint& n) {
            return i == n.coordinate ? n.sample_raw(rng) - n.mean() : 0.0;
          },
      },
      variant_);
}

Vector draw_noisy_gradient(const Objective& objective, const NoiseModel& noise,
                           std::span<const double> x, Rng& rng) {
  if (x.size() != objective.dim()) throw Error("dimension mismatch");
  Vector g = objective.gradient(x);
  noise.perturb(g, rng);
  return g;
}

// ---------------------------------------------------------------------------

StochasticOracle::StochasticOracle(std::shared_ptr<const Objective> objective,
                                   NoiseModel noise, std::uint64_t seed)
    : objective_(std::move(objective)),
      noise_(std::move(noise)),
      seed_(seed),
      rng_(seed) {
  if (!objective_) throw Error("oracle needs an objective");
  noise_.validate(objective_->dim());
}

Vector StochasticOracle::draw(std::span<const double> x) {
  ++draws_;
  return draw_noisy_gradient(*objective_, noise_, x, rng_);
}

Vector Problem::initial_point(std::uint64_t run_seed) const {
  Rng rng(splitmix64((x0_per_seed ? run_seed : seed) ^ kInitialPointStream));
  Vector x(dim());
  for (double& e : x) e = x0_scale * rng.normal();
  return x;
}

StochasticOracle Problem::make_oracle(std::uint64_t oracle_seed) const {
  return StochasticOracle(objective, noise, oracle_seed);
}

Problem make_sparse_noise_problem() {
  constexpr std::size_t kDim = 100;
  Problem p;
  p.name = "sparse_noise";
  p.objective = std::make_shared<QuadraticProblem>(Vector(kDim, 1.0));
  p.noise = noise::SparseGaussian{100.0, {0}};
  p.x0_per_seed = true;
  return p;
}

Problem make_quadratic_problem(const QuadraticSpec& spec) {
  if (spec.dim == 0) throw Error("problem.d must be >= 1");
  if (!(spec.a_min > 0.0) || !(spec.a_max >= spec.a_min)) {
    throw Error("curvature range must satisfy 0 < a_min <= a_max");
  }
  Rng rng(splitmix64(spec.seed ^ kCurvatureStream));
  Vector a(spec.dim);
  for (double& e : a) e = spec.a_min + (spec.a_max - spec.a_min) * rng.uniform();
  spec.noise.validate(spec.dim);

  Problem p;
  p.name = "quadratic";
  p.objective = std::make_shared<QuadraticProblem>(std::move(a));
  p.noise = spec.noise;
  p.seed = spec.seed;
  p.x0_per_seed = spec.x0_per_seed;
  p.x0_scale = spec.x0_scale;
  return p;
}

}  // namespace signopt
