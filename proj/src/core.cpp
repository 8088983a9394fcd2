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

#include "signopt/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace signopt {

double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += std::abs(e);
  return s;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double e : v) s += e * e;
  return std::sqrt(s);
}

double linf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double e) { return std::isfinite(e); });
}

void require_finite(std::span<const double> v, const char* message) {
  if (!all_finite(v)) throw Error(message);
}

Vector sign_vec(std::span<const double> v) {
  require_finite(v, "non-finite gradient");
  Vector out(v.size());
  // -0.0 >= 0.0 is true, so signed zero maps to +1 as well.
  std::transform(v.begin(), v.end(), out.begin(),
                 [](double e) { return e >= 0.0 ? 1.0 : -1.0; });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state + kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t worker_seed(std::uint64_t base_seed, std::uint64_t worker_index) {
  return splitmix64(base_seed ^ ((worker_index + 1) * kGolden));
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  for (auto& word : s_) {
    word = splitmix64(state);
    state += kGolden;
  }
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (spare_) {
    const double z = *spare_;
    spare_.reset();
    return z;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  return u * scale;
}

// ---------------------------------------------------------------------------

double gradient_check_error(const Objective& objective,
                            std::span<const double> x) {
  const Vector g = objective.gradient(x);
  Vector probe(x.begin(), x.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(x[i]));
    probe[i] = x[i] + h;
    const double up = objective.value(probe);
    probe[i] = x[i] - h;
    const double down = objective.value(probe);
    probe[i] = x[i];
    const double fd = (up - down) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / std::max(1.0, std::abs(g[i])));
  }
  return worst;
}

double majorization_slack(const Objective& objective, std::span<const double> x,
                          std::span<const double> y) {
  const Vector g = objective.gradient(x);
  const Vector& lip = objective.lipschitz();
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double step = y[i] - x[i];
    linear += g[i] * step;
    quad += 0.5 * lip[i] * step * step;
  }
  const double gap = objective.value(y) - objective.value(x) - linear;
  return quad - std::abs(gap);
}

Vector minibatch_draw(GradientOracle& oracle, std::span<const double> x,
                      std::uint64_t batch) {
  if (batch == 0) throw Error("empty batch");
  Vector mean = oracle.draw(x);
  for (std::uint64_t j = 1; j < batch; ++j) {
    const Vector sample = oracle.draw(x);
    const double inv = 1.0 / static_cast<double>(j + 1);
    for (std::size_t i = 0; i < mean.size(); ++i) {
      mean[i] += (sample[i] - mean[i]) * inv;
    }
  }
  require_finite(mean, "non-finite gradient");
  return mean;
}

// ---------------------------------------------------------------------------

void Trajectory::append(StepRecord record) {
  if (!steps_.empty() && record.oracle_calls < steps_.back().oracle_calls) {
    throw Error("trajectory oracle call count went backwards");
  }
  steps_.push_back(std::move(record));
}

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool same_bits(const Vector& a, const Vector& b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(),
                    [](double u, double v) { return same_bits(u, v); });
}

}  // namespace

bool operator==(const StepRecord& a, const StepRecord& b) {
  if (a.x.has_value() != b.x.has_value()) return false;
  if (a.x && !same_bits(*a.x, *b.x)) return false;
  return a.k == b.k && same_bits(a.f, b.f) && same_bits(a.grad_l1, b.grad_l1) &&
         same_bits(a.grad_l2, b.grad_l2) && a.oracle_calls == b.oracle_calls &&
         a.bits_up == b.bits_up && a.bits_down == b.bits_down;
}

bool operator==(const Trajectory& a, const Trajectory& b) {
  return a.steps_ == b.steps_;
}

StepRecord make_record(const Objective& objective, std::uint64_t k,
                       std::span<const double> x, bool keep_x) {
  require_finite(x, "non-finite iterate");
  const Vector g = objective.gradient(x);
  StepRecord r;
  r.k = k;
  if (keep_x) r.x = Vector(x.begin(), x.end());
  r.f = objective.value(x);
  r.grad_l1 = l1_norm(g);
  r.grad_l2 = l2_norm(g);
  return r;
}

}  // namespace signopt
