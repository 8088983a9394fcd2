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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "signopt/cli/commands.hpp"
#include "signopt/cli/config.hpp"
#include "signopt/core.hpp"
#include "signopt/optimizers.hpp"
#include "signopt/problems.hpp"
#include "signopt/stats.hpp"
#include "signopt/theory.hpp"
#include "signopt/votesim.hpp"

namespace {

using namespace signopt;
using namespace signopt::cli;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> check;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

ExperimentConfig quadratic_config() {
  return parse_config(
      "problem.name = quadratic\n"
      "problem.d = 10\n"
      "problem.a_min = 0.5\n"
      "problem.a_max = 2\n"
      "problem.noise = gaussian\n"
      "problem.sigma = 1\n"
      "run.seeds = 0-9\n");
}

Outcome warmup_constant() {
  const auto c = compute_warmup(0.9);
  return {c == 54, "C(0.9) = " + std::to_string(c)};
}

Outcome sparse_noise() {
  const auto r = reproduce_sparse_noise({});
  return {r.pass, fmt("final mean f: signSGD %.4g, SGD %.4g", r.signsgd_final, r.sgd_final)};
}

Outcome sign_error_grid() {
  const NoiseModel gauss = noise::GaussianPerCoord{{1.0}};
  Rng rng(worker_seed(3, 0));
  double worst = -1.0;
  bool pass = true;
  for (double s : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const auto est = empirical_sign_error(gauss, 0, s, 100000, rng);
    const double slack = theory::gauss_sign_bound(s) + 4.0 * est.standard_error - est.rate;
    worst = worst < 0.0 ? slack : std::min(worst, slack);
    pass = pass && slack >= 0.0;
  }
  return {pass, fmt("smallest slack %.4g", worst)};
}

Outcome vote_variance_reduction() {
  const NoiseModel gauss = noise::GaussianPerCoord{{1.0}};
  bool pass = true;
  double prev = 2.0;
  std::string detail = "error by M:";
  for (std::size_t m : {1u, 3u, 9u, 33u}) {
    const auto est = estimate_vote_error(gauss, 1.0, m, 100000, 4);
    const double bound = std::min(1.0, theory::vote_error_bound(m, 1.0));
    pass = pass && est.rate <= prev && est.rate <= bound + 4.0 * est.standard_error;
    prev = est.rate;
    detail += fmt(" %.4g", est.rate);
  }
  return {pass, detail};
}

Outcome vote_pathology() {
  const noise::SkewedTwoPoint skew;
  bool pass = true;
  double prev = -1.0, last = 0.0;
  std::string detail = "error by M:";
  for (std::size_t m : {1u, 3u, 9u, 33u}) {
    const auto est = estimate_vote_error(skew, skew.mean(), m, 100000, 5);
    pass = pass && est.rate >= prev;
    prev = last = est.rate;
    detail += fmt(" %.4g", est.rate);
  }
  return {pass && last >= 0.99, detail};
}

Outcome bound_report(ExperimentConfig config) {
  const auto r = evaluate_bound(config);
  return {r.pass, r.theorem + fmt(": LHS %.4g <= RHS %.4g (N = %.0f)", r.lhs, r.rhs,
                                   static_cast<double>(r.oracle_calls))};
}

Outcome large_batch_bound() {
  auto c = quadratic_config();
  c.optimizer = RunKind::signsgd;
  c.schedule = ScheduleKind::thm1;
  c.iterations = 100;
  return bound_report(c);
}

Outcome small_batch_bound() {
  auto c = quadratic_config();
  c.optimizer = RunKind::signsgd;
  c.schedule = ScheduleKind::small_batch;
  c.iterations = 10000;
  return bound_report(c);
}

Outcome majority_bound() {
  auto c = quadratic_config();
  c.optimizer = RunKind::majority;
  c.workers = 9;
  c.schedule = ScheduleKind::thm1;
  c.iterations = 100;
  return bound_report(c);
}

Outcome codec_and_ledger() {
  Rng rng(6);
  for (int t = 0; t < 10000; ++t) {
    Vector s(1 + rng.next_u64() % 300);
    for (double& v : s) v = (rng.next_u64() & 1u) ? 1.0 : -1.0;
    if (unpack_signs(pack_signs(s)) != s) return {false, "round-trip mismatch"};
  }
  for (int t = 0; t < 20; ++t) {
    const std::size_t m = 1 + rng.next_u64() % 40;
    const std::size_t d = 1 + rng.next_u64() % 500;
    const auto r = commcost(m, d, 3);
    if (!r.pass) {
      return {false, fmt("ledger %.0f bits/iter vs 2Md at M=%.0f", r.measured_per_iter,
                         static_cast<double>(m))};
    }
  }
  return {true, "10000 round-trips exact, 20 ledgers equal 2Md"};
}

Outcome welford_equivalence() {
  Rng rng(7);
  const std::size_t d = 100, n = 10000;
  std::vector<Vector> data(n, Vector(d));
  for (auto& row : data) {
    for (double& v : row) v = 10.0 + 3.0 * rng.normal();
  }
  WelfordAccumulator all(d), a(d), b(d);
  for (std::size_t r = 0; r < n; ++r) {
    all.update(data[r]);
    (r % 3 == 0 ? a : b).update(data[r]);
  }
  a.merge(b);
  const auto one = all.finalize();
  const auto two = a.finalize();
  double worst = 0.0;
  auto rel = [](double x, double y) { return std::abs(x - y) / std::abs(y); };
  for (std::size_t i = 0; i < d; ++i) {
    double mean = 0.0, var = 0.0;
    for (const auto& row : data) mean += row[i];
    mean /= static_cast<double>(n);
    for (const auto& row : data) var += (row[i] - mean) * (row[i] - mean);
    var /= static_cast<double>(n);
    worst = std::max({worst, rel(one.mean[i], mean), rel(one.variance[i], var),
                      rel(two.mean[i], one.mean[i]), rel(two.variance[i], one.variance[i])});
  }
  return {worst <= 1e-10, fmt("max relative error %.3g", worst)};
}

Outcome density_identities() {
  for (std::size_t d : {1u, 10u, 1000u}) {
    Vector hot(d, 0.0);
    hot[0] = 1.0;
    if (density(Vector(d, 1.0)) != 1.0 || density(hot) != 1.0 / static_cast<double>(d)) {
      return {false, "identity failed at d = " + std::to_string(d)};
    }
  }
  Rng rng(8);
  for (int t = 0; t < 10000; ++t) {
    const std::size_t d = 1 + rng.next_u64() % 200;
    Vector v(d);
    for (double& x : v) x = rng.normal() * std::exp(rng.normal());
    const double phi = density(v);
    if (phi < 1.0 / static_cast<double>(d) - 1e-15 || phi > 1.0 + 1e-15) {
      return {false, "random vector outside [1/d, 1]"};
    }
  }
  return {true, "exact identities, 10000 random vectors within [1/d, 1]"};
}

/// Wraps an oracle and scales every draw by a positive constant.
class ScaledOracle final : public GradientOracle {
 public:
  ScaledOracle(GradientOracle& inner, double scale) : inner_(inner), scale_(scale) {}
  std::size_t dim() const override { return inner_.dim(); }
  Vector draw(std::span<const double> x) override {
    Vector g = inner_.draw(x);
    for (double& v : g) v *= scale_;
    return g;
  }
  std::uint64_t draw_count() const override { return inner_.draw_count(); }

 private:
  GradientOracle& inner_;
  double scale_;
};

bool same_path(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].x != b[k].x || a[k].oracle_calls != b[k].oracle_calls) return false;
  }
  return true;
}

Outcome equivalences() {
  const Problem p = build_problem(quadratic_config());
  const auto sched = Schedule::constant(0.01, 2);
  RunOptions snap;
  snap.snapshots = true;
  const std::uint64_t K = 200;

  auto o1 = p.make_oracle(1);
  const auto reference = run(OptimizerKind::signsgd, *p.objective, o1, sched, K,
                             p.initial_point(1), snap);

  auto o2 = p.make_oracle(1);
  RunOptions zero = snap;
  zero.beta = 0.0;
  const bool signum_ok = run(OptimizerKind::signum, *p.objective, o2, sched, K,
                             p.initial_point(1), zero) == reference;

  auto workers = make_worker_oracles(p, 1, 1);
  GradientOracle* ptr = &workers[0];
  auto o3 = p.make_oracle(worker_seed(1, 0));
  const auto solo = run(OptimizerKind::signsgd, *p.objective, o3, sched, K,
                        p.initial_point(1), snap);
  const bool vote_ok =
      same_path(run_distributed(*p.objective, std::span<GradientOracle* const>(&ptr, 1),
                                sched, K, p.initial_point(1), AggregationMode::majority,
                                snap),
                solo);

  bool scale_ok = true;
  for (auto kind : {OptimizerKind::signsgd, OptimizerKind::signum}) {
    auto plain = p.make_oracle(2);
    auto inner = p.make_oracle(2);
    ScaledOracle scaled(inner, 7.5);
    scale_ok = scale_ok && run(kind, *p.objective, plain, sched, K, p.initial_point(2),
                               snap) == run(kind, *p.objective, scaled, sched, K,
                                            p.initial_point(2), snap);
  }
  return {signum_ok && vote_ok && scale_ok,
          std::string("signum(0)=signSGD ") + (signum_ok ? "yes" : "no") +
              ", vote(M=1)=signSGD " + (vote_ok ? "yes" : "no") + ", scaling " +
              (scale_ok ? "yes" : "no")};
}

Outcome signum_shape() {
  std::string detail;
  bool pass = true;
  for (std::uint64_t K : {141u, 283u}) {
    auto c = quadratic_config();
    c.optimizer = RunKind::signum;
    c.schedule = ScheduleKind::signum;
    c.beta = 0.9;
    c.delta0 = 0.1;
    c.iterations = K;
    const auto r = evaluate_bound(c);
    pass = pass && r.pass;
    if (!detail.empty()) detail += ", ";
    detail += fmt("N=%.0f ratio %.4g", static_cast<double>(r.oracle_calls), r.lhs);
  }
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "warmup constant", 0.001, warmup_constant},
      {2, "sparse-noise reproduction", 30, sparse_noise},
      {3, "unimodal sign-error bound", 10, sign_error_grid},
      {4, "vote variance reduction", 30, vote_variance_reduction},
      {5, "vote pathology", 10, vote_pathology},
      {6, "large-batch signSGD bound", 60, large_batch_bound},
      {7, "small-batch signSGD bound", 60, small_batch_bound},
      {8, "majority-vote bound", 120, majority_bound},
      {9, "codec and ledger", 5, codec_and_ledger},
      {10, "Welford equivalence", 60, welford_equivalence},
      {11, "density identities", 60, density_identities},
      {12, "equivalence properties", 5, equivalences},
      {13, "Signum shape", 120, signum_shape},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::printf("%s  [%2d] %-28s %s; %.3fs (limit %gs)%s\n", pass ? "PASS" : "FAIL", c.id,
                c.name, out.detail.c_str(), secs, c.limit_seconds,
                in_time ? "" : " TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
