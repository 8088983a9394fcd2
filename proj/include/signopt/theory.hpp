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

#ifndef SIGNOPT_THEORY_HPP_
#define SIGNOPT_THEORY_HPP_

#include <cstdint>
#include <optional>

#include "signopt/core.hpp"

namespace signopt::theory {

/// SNR boundary between the two cases of the unimodal-symmetric sign bound.
inline constexpr double kSnrThreshold = 1.1547005383792515;  // 2 / sqrt(3)

// Single sign-bit failure probabilities.

/// min(1, sigma / |g|); 1 when g = 0, 0 when sigma = 0 and g != 0.
double markov_sign_bound(double g, double sigma);

/// One-sided Chebyshev: 1 / (1 + S^2).
double cantelli_sign_bound(double snr);

/// Gauss-inequality bound for unimodal symmetric noise:
/// 2 / (9 S^2) for S > 2/sqrt(3), otherwise 1/2 - S / (2 sqrt(3)).
double gauss_sign_bound(double snr);

/// Majority of M voters wrong: min(1, 1 / (sqrt(M) S)); 1 at S = 0.
double vote_error_bound(std::uint64_t workers, double snr);

// Convergence bounds. Each returns the right-hand side of the guarantee on
// the corresponding left-hand statistic.

struct BoundInputs {
  Vector lipschitz;
  Vector sigma;
  double f0 = 0.0;
  double f_star = 0.0;
  std::uint64_t oracle_calls = 1;  // N
  std::optional<std::uint64_t> workers;
  std::optional<double> beta;
  std::optional<double> delta0;
  std::optional<double> f_warmup;  // f at the end of the Signum warmup

  void validate() const;
};

/// Large-batch signSGD, bounds E[(1/K) sum_k ||g_k||_1]^2:
///   (1/sqrt(N)) [sqrt(||L||_1)(f0 - f* + 1/2) + 2 ||sigma||_1]^2
double thm1_rhs(const BoundInputs& in);

/// Majority vote with M workers under unimodal symmetric noise: thm1_rhs
/// with ||sigma||_1 replaced by ||sigma||_1 / sqrt(M). N counts per worker.
double thm2b_rhs(const BoundInputs& in);

/// Small-batch signSGD, bounds E[min_k mixed_norm(g_k, sigma)]:
///   sqrt(3 ||L||_1 / N) (f0 - f* + 1/2)
double smallbatch_rhs(const BoundInputs& in);

/// sum over high-SNR coordinates of |g_i| plus sum over the rest of
/// g_i^2 / sigma_i. High SNR means S_i > 2/sqrt(3); sigma_i = 0 counts as high.
double mixed_norm(std::span<const double> g, std::span<const double> sigma);

/// SGD (either batch mode), bounds E[(1/K) sum_k ||g_k||_2^2]:
///   (1/sqrt(N)) (2 L_inf (f0 - f*) + sigma_total^2)
double sgd_rhs(double lipschitz_inf, double sigma_sq_total, double f0,
               double f_star, std::uint64_t oracle_calls);

/// Signum bound without its hidden constant:
///   (1/sqrt(N)) [(fC - f*)/delta0 + (1 + ln N)(delta0 ||L||_1/(1 - beta)
///                 + ||sigma||_1 sqrt(1 - beta))]^2
/// Requires beta, delta0 and f_warmup.
double signum_bound_shape(const BoundInputs& in);

}  // namespace signopt::theory

#endif  // SIGNOPT_THEORY_HPP_
