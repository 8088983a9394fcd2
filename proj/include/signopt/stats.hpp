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

#ifndef SIGNOPT_STATS_HPP_
#define SIGNOPT_STATS_HPP_

#include <cstdint>
#include <optional>

#include "signopt/core.hpp"
#include "signopt/problems.hpp"

namespace signopt {

/// Single-pass vector mean and population variance (Welford).
class WelfordAccumulator {
 public:
  explicit WelfordAccumulator(std::size_t dim);

  void update(std::span<const double> sample);
  /// Pairwise combine (Chan et al.) of two independent streams.
  void merge(const WelfordAccumulator& other);

  struct Moments {
    Vector mean;
    Vector variance;
  };
  /// Mean and m2 / count. Throws on an empty accumulator.
  Moments finalize() const;

  std::uint64_t count() const { return count_; }
  std::size_t dim() const { return mean_.size(); }
  const Vector& mean() const { return mean_; }
  const Vector& m2() const { return m2_; }

 private:
  std::uint64_t count_ = 0;
  Vector mean_;
  Vector m2_;
};

/// phi(v) = ||v||_1^2 / (d ||v||_2^2), in [1/d, 1]. Throws for v = 0.
double density(std::span<const double> v);

/// S_i = |g_i| / sigma_i, +inf where sigma_i = 0.
Vector snr(std::span<const double> g, std::span<const double> sigma);

struct GradientStats {
  Vector mean;
  Vector sigma;
  double phi_g = 0.0;  // NaN when the mean is exactly zero
  std::optional<double> phi_sigma;  // empty when the noise is zero
};

/// Welford moments of `samples` single oracle draws at x.
GradientStats measure_gradient_stats(GradientOracle& oracle,
                                     std::span<const double> x,
                                     std::uint64_t samples);

struct RateEstimate {
  double rate = 0.0;
  double standard_error = 0.0;
};

/// Fraction of single draws g_value + noise_i whose sign (0 -> +) differs
/// from sign(g_value).
RateEstimate empirical_sign_error(const NoiseModel& noise, std::size_t coordinate,
                                  double g_value, std::uint64_t trials, Rng& rng);

struct Histogram {
  Vector bin_edges;
  std::vector<std::uint64_t> counts;
  double sample_mean = 0.0;
  /// |#below mean - #above mean| / samples.
  double symmetry = 0.0;

  std::uint64_t total() const;
};

/// Equal-width histogram of (draw - g_value) over [min, max] of the sample.
Histogram noise_histogram(const NoiseModel& noise, std::size_t coordinate,
                          double g_value, std::uint64_t trials, std::size_t bins,
                          Rng& rng);

}  // namespace signopt

#endif  // SIGNOPT_STATS_HPP_
