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

#include "signopt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace signopt {

WelfordAccumulator::WelfordAccumulator(std::size_t dim)
    : mean_(dim, 0.0), m2_(dim, 0.0) {
  if (dim == 0) throw Error("accumulator needs dimension >= 1");
}

void WelfordAccumulator::update(std::span<const double> sample) {
  if (sample.size() != mean_.size()) throw Error("sample dimension mismatch");
  ++count_;
  const double inv = 1.0 / static_cast<double>(count_);
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double delta = sample[i] - mean_[i];
    mean_[i] += delta * inv;
    m2_[i] += delta * (sample[i] - mean_[i]);
  }
}

void WelfordAccumulator::merge(const WelfordAccumulator& other) {
  if (other.dim() != dim()) throw Error("accumulator dimension mismatch");
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double delta = other.mean_[i] - mean_[i];
    mean_[i] += delta * (nb / n);
    m2_[i] += other.m2_[i] + delta * delta * (na * nb / n);
  }
  count_ += other.count_;
}

WelfordAccumulator::Moments WelfordAccumulator::finalize() const {
  if (count_ == 0) throw Error("finalize on empty accumulator");
  Moments m{mean_, Vector(m2_.size())};
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < m2_.size(); ++i) m.variance[i] = m2_[i] / n;
  return m;
}

// ---------------------------------------------------------------------------

double density(std::span<const double> v) {
  require_finite(v, "non-finite vector");
  // Scale by the largest magnitude so squares neither overflow nor underflow.
  const double scale = linf_norm(v);
  if (scale == 0.0) throw Error("density undefined for the zero vector");
  double l1 = 0.0;
  double sq = 0.0;
  for (double e : v) {
    const double u = e / scale;
    l1 += std::abs(u);
    sq += u * u;
  }
  return l1 * l1 / (static_cast<double>(v.size()) * sq);
}

Vector snr(std::span<const double> g, std::span<const double> sigma) {
  if (g.size() != sigma.size()) throw Error("snr dimension mismatch");
  Vector s(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (sigma[i] < 0.0) throw Error("sigma must be non-negative");
    s[i] = sigma[i] == 0.0 ? std::numeric_limits<double>::infinity()
                           : std::abs(g[i]) / sigma[i];
  }
  return s;
}

GradientStats measure_gradient_stats(GradientOracle& oracle,
                                     std::span<const double> x,
                                     std::uint64_t samples) {
  if (samples < 2) throw Error("gradient statistics need samples >= 2");
  WelfordAccumulator acc(oracle.dim());
  for (std::uint64_t s = 0; s < samples; ++s) acc.update(oracle.draw(x));
  auto moments = acc.finalize();

  GradientStats out;
  out.mean = std::move(moments.mean);
  out.sigma.resize(moments.variance.size());
  std::transform(moments.variance.begin(), moments.variance.end(),
                 out.sigma.begin(), [](double v) { return std::sqrt(v); });
  out.phi_g = linf_norm(out.mean) > 0.0 ? density(out.mean)
                                        : std::numeric_limits<double>::quiet_NaN();
  if (linf_norm(out.sigma) > 0.0) out.phi_sigma = density(out.sigma);
  return out;
}

RateEstimate empirical_sign_error(const NoiseModel& noise, std::size_t coordinate,
                                  double g_value, std::uint64_t trials, Rng& rng) {
  if (trials == 0) throw Error("sign error estimate needs trials >= 1");
  const bool truth = g_value >= 0.0;
  std::uint64_t wrong = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const double draw = g_value + noise.sample_coordinate(coordinate, rng);
    if ((draw >= 0.0) != truth) ++wrong;
  }
  RateEstimate r;
  const double n = static_cast<double>(trials);
  r.rate = static_cast<double>(wrong) / n;
  r.standard_error = std::sqrt(r.rate * (1.0 - r.rate) / n);
  return r;
}

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

Histogram noise_histogram(const NoiseModel& noise, std::size_t coordinate,
                          double g_value, std::uint64_t trials, std::size_t bins,
                          Rng& rng) {
  if (bins == 0 || trials < bins) throw Error("histogram needs trials >= bins >= 1");
  Vector centred(trials);
  for (double& e : centred) {
    e = (g_value + noise.sample_coordinate(coordinate, rng)) - g_value;
  }
  auto [lo_it, hi_it] = std::minmax_element(centred.begin(), centred.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }

  Histogram h;
  h.bin_edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) {
    h.bin_edges[b] = lo + width * static_cast<double>(b);
  }
  h.bin_edges.back() = hi;
  h.counts.assign(bins, 0);

  double sum = 0.0;
  for (double e : centred) {
    auto b = static_cast<std::size_t>((e - lo) / width);
    h.counts[std::min(b, bins - 1)]++;
    sum += e;
  }
  h.sample_mean = sum / static_cast<double>(trials);
  std::int64_t balance = 0;
  for (double e : centred) {
    if (e < h.sample_mean) --balance;
    else if (e > h.sample_mean) ++balance;
  }
  h.symmetry = static_cast<double>(std::llabs(balance)) / static_cast<double>(trials);
  return h;
}

}  // namespace signopt
