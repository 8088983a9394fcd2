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

#include "signopt/theory.hpp"

#include <algorithm>
#include <cmath>

namespace signopt::theory {

double markov_sign_bound(double g, double sigma) {
  if (g == 0.0) return 1.0;
  return std::min(1.0, sigma / std::abs(g));
}

double cantelli_sign_bound(double snr) {
  if (snr < 0.0) throw Error("snr must be non-negative");
  return 1.0 / (1.0 + snr * snr);
}

double gauss_sign_bound(double snr) {
  if (snr < 0.0) throw Error("snr must be non-negative");
  if (snr > kSnrThreshold) return 2.0 / (9.0 * snr * snr);
  return 0.5 - snr / (2.0 * std::sqrt(3.0));
}

double vote_error_bound(std::uint64_t workers, double snr) {
  if (workers == 0) throw Error("vote needs at least one worker");
  if (snr < 0.0) throw Error("snr must be non-negative");
  if (snr == 0.0) return 1.0;
  return std::min(1.0, 1.0 / (std::sqrt(static_cast<double>(workers)) * snr));
}

void BoundInputs::validate() const {
  if (oracle_calls == 0) throw Error("bound needs N >= 1");
  if (f0 < f_star) throw Error("bound needs f0 >= f*");
  for (double l : lipschitz) {
    if (l < 0.0) throw Error("lipschitz entries must be non-negative");
  }
  for (double s : sigma) {
    if (s < 0.0) throw Error("sigma entries must be non-negative");
  }
}

namespace {

double large_batch_form(const BoundInputs& in, double sigma_l1) {
  in.validate();
  const double n = static_cast<double>(in.oracle_calls);
  const double inner =
      std::sqrt(l1_norm(in.lipschitz)) * (in.f0 - in.f_star + 0.5) + 2.0 * sigma_l1;
  return inner * inner / std::sqrt(n);
}

}  // namespace

double thm1_rhs(const BoundInputs& in) {
  return large_batch_form(in, l1_norm(in.sigma));
}

double thm2b_rhs(const BoundInputs& in) {
  const std::uint64_t m = in.workers.value_or(1);
  if (m == 0) throw Error("bound needs M >= 1");
  return large_batch_form(in, l1_norm(in.sigma) / std::sqrt(static_cast<double>(m)));
}

double smallbatch_rhs(const BoundInputs& in) {
  in.validate();
  const double n = static_cast<double>(in.oracle_calls);
  return std::sqrt(3.0 * l1_norm(in.lipschitz) / n) * (in.f0 - in.f_star + 0.5);
}

double mixed_norm(std::span<const double> g, std::span<const double> sigma) {
  if (g.size() != sigma.size()) throw Error("mixed norm dimension mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (sigma[i] < 0.0) throw Error("sigma entries must be non-negative");
    const bool high_snr = sigma[i] == 0.0 || std::abs(g[i]) / sigma[i] > kSnrThreshold;
    total += high_snr ? std::abs(g[i]) : g[i] * g[i] / sigma[i];
  }
  return total;
}

double sgd_rhs(double lipschitz_inf, double sigma_sq_total, double f0,
               double f_star, std::uint64_t oracle_calls) {
  if (oracle_calls == 0) throw Error("bound needs N >= 1");
  if (f0 < f_star) throw Error("bound needs f0 >= f*");
  return (2.0 * lipschitz_inf * (f0 - f_star) + sigma_sq_total) /
         std::sqrt(static_cast<double>(oracle_calls));
}

double signum_bound_shape(const BoundInputs& in) {
  in.validate();
  if (!in.beta || !in.delta0 || !in.f_warmup) {
    throw Error("signum bound needs beta, delta0 and f at warmup");
  }
  const double beta = *in.beta;
  const double delta0 = *in.delta0;
  if (!(beta >= 0.0 && beta < 1.0)) throw Error("momentum must be < 1");
  if (!(delta0 > 0.0)) throw Error("signum delta0 must be positive");
  const double n = static_cast<double>(in.oracle_calls);
  const double drift = delta0 * l1_norm(in.lipschitz) / (1.0 - beta);
  const double noise = l1_norm(in.sigma) * std::sqrt(1.0 - beta);
  const double inner =
      (*in.f_warmup - in.f_star) / delta0 + (1.0 + std::log(n)) * (drift + noise);
  return inner * inner / std::sqrt(n);
}

}  // namespace signopt::theory
