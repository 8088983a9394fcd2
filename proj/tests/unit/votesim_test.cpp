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

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "signopt/optimizers.hpp"
#include "signopt/votesim.hpp"
#include "test_support.hpp"

using namespace signopt;

namespace {

std::vector<GradientOracle*> pointers(std::vector<StochasticOracle>& oracles) {
  std::vector<GradientOracle*> out;
  for (auto& o : oracles) out.push_back(&o);
  return out;
}

Vector random_signs(Rng& rng, std::size_t d) {
  Vector s(d);
  for (double& v : s) v = (rng.next_u64() & 1u) ? 1.0 : -1.0;
  return s;
}

bool same_iterates(const Trajectory& a, const Trajectory& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].x != b[k].x || a[k].f != b[k].f || a[k].grad_l1 != b[k].grad_l1 ||
        a[k].oracle_calls != b[k].oracle_calls) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("sign codec layout") {
  const SignMessage m = pack_signs(Vector{1.0, -1.0, 1.0});
  CHECK(m.dim == 3);
  CHECK(m.payload == std::vector<std::uint8_t>{0x05});
  CHECK(pack_signs(Vector(8, 1.0)).payload == std::vector<std::uint8_t>{0xFF});
  CHECK(pack_signs(Vector(9, -1.0)).payload == std::vector<std::uint8_t>{0x00, 0x00});
  CHECK_THROWS_AS(pack_signs(Vector{1.0, 0.5}), Error);
  CHECK(pack_signs(Vector{}).payload.empty());
}

TEST_CASE("sign codec round-trips") {
  Rng rng(31);
  for (int i = 0; i < 10000; ++i) {
    const Vector s = random_signs(rng, 1 + rng.next_u64() % 70);
    const SignMessage m = pack_signs(s);
    REQUIRE(unpack_signs(m) == s);
    REQUIRE(deserialize(serialize(m)) == m);
  }
}

TEST_CASE("wire format") {
  const auto bytes = serialize(pack_signs(Vector{1.0, -1.0, 1.0}));
  CHECK(bytes == std::vector<std::uint8_t>{3, 0, 0, 0, 0x05});
  CHECK_THROWS_AS(deserialize(std::vector<std::uint8_t>{3, 0, 0}), Error);
  CHECK_THROWS_AS(deserialize(std::vector<std::uint8_t>{3, 0, 0, 0}), Error);
  CHECK_THROWS_AS(deserialize(std::vector<std::uint8_t>{3, 0, 0, 0, 0xFF}), Error);
}

TEST_CASE("majority aggregation") {
  const auto p = pack_signs(Vector{1.0});
  const auto n = pack_signs(Vector{-1.0});
  CHECK(aggregate_majority(std::vector{p, p, n}) == p);
  CHECK(aggregate_majority(std::vector{n, n, p}) == n);
  CHECK(aggregate_majority(std::vector{p, n}) == p);
  const auto single = pack_signs(Vector{1.0, -1.0, -1.0, 1.0});
  CHECK(aggregate_majority(std::vector{single}) == single);
  CHECK(tally_votes(std::vector{p, p, n}) == std::vector<std::int32_t>{1});
  CHECK_THROWS_AS(aggregate_majority(std::vector{p, single}), Error);
  CHECK_THROWS_AS(aggregate_majority(std::vector<SignMessage>{}), Error);
}

TEST_CASE("aggregation ignores worker order") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    std::vector<SignMessage> msgs;
    for (int m = 0; m < 7; ++m) msgs.push_back(pack_signs(random_signs(rng, 13)));
    const auto ref = aggregate_majority(msgs);
    std::reverse(msgs.begin(), msgs.end());
    std::swap(msgs[1], msgs[4]);
    REQUIRE(aggregate_majority(msgs) == ref);
  }
}

TEST_CASE("communication formulas") {
  CHECK(comm_bits_per_iter(CommScheme::sign_majority, 2, 10) == 40.0);
  CHECK(comm_bits_per_iter(CommScheme::sgd, 2, 10) == 1280.0);
  CHECK(comm_bits_per_iter(CommScheme::qsgd, 2, 10) ==
        doctest::Approx(86.43856189774723).epsilon(1e-14));
  CHECK(comm_bits_per_iter(CommScheme::terngrad, 2, 10) ==
        comm_bits_per_iter(CommScheme::qsgd, 2, 10));
  CHECK(to_string(CommScheme::sign_majority) == "SignMajority");
  CHECK(downlink_bits(AggregationMode::majority, 9, 10) == 10);
  CHECK(downlink_bits(AggregationMode::sum_of_signs, 1, 10) == 20);   // 3 levels
  CHECK(downlink_bits(AggregationMode::sum_of_signs, 2, 10) == 30);   // 5 levels
  CHECK(downlink_bits(AggregationMode::sum_of_signs, 4, 10) == 40);   // 9 levels
  CHECK(downlink_bits(AggregationMode::sum_of_signs, 3, 10) == 30);   // 7 levels
}

TEST_CASE("vote_round") {
  const Problem p = testing::gaussian_quadratic(5, 1.0, 2);
  const Vector x0 = p.initial_point(0);

  SUBCASE("single voter equals one signSGD step in either mode") {
    for (auto mode : {AggregationMode::majority, AggregationMode::sum_of_signs}) {
      auto workers = make_worker_oracles(p, 1, 4);
      auto ptrs = pointers(workers);
      Vector x = x0;
      const auto round = vote_round(x, ptrs, {0.1, 3}, mode);
      auto solo = p.make_oracle(worker_seed(4, 0));
      SignSgdState s{x0};
      signsgd_step(s, solo, {0.1, 3});
      CHECK(x == s.x);
      CHECK(round.bits_up == 5);
    }
  }
  SUBCASE("noiseless workers agree with sign(g)") {
    QuadraticSpec spec;
    spec.dim = 5;
    const Problem quiet = make_quadratic_problem(spec);
    auto workers = make_worker_oracles(quiet, 6, 1);
    auto ptrs = pointers(workers);
    Vector x = x0;
    const auto round = vote_round(x, ptrs, {0.1, 1}, AggregationMode::majority);
    const Vector g = quiet.objective->gradient(x0);
    for (const auto& m : round.up_messages) CHECK(m == round.decision);
    CHECK(unpack_signs(round.decision) == sign_vec(g));
    CHECK(round.bits_up == 30);
    CHECK(round.bits_down == 5);
  }
}

TEST_CASE("nine voters beat one at unit SNR") {
  const NoiseModel gauss = noise::GaussianPerCoord{{1.0}};
  const auto one = estimate_vote_error(gauss, 1.0, 1, 20000, 3);
  const auto nine = estimate_vote_error(gauss, 1.0, 9, 20000, 3);
  CHECK(nine.rate < one.rate);
  CHECK(one.rate == doctest::Approx(0.1587).epsilon(0.05));
}

TEST_CASE("run_distributed") {
  const Problem p = testing::gaussian_quadratic(7, 1.0, 9);
  const auto sched = Schedule::constant(0.05, 2);
  RunOptions opts;
  opts.snapshots = true;

  SUBCASE("one worker reproduces signSGD with the derived seed") {
    auto workers = make_worker_oracles(p, 1, 12);
    auto ptrs = pointers(workers);
    const auto dist = run_distributed(*p.objective, ptrs, sched, 30, p.initial_point(0),
                                      AggregationMode::majority, opts);
    auto solo = p.make_oracle(worker_seed(12, 0));
    const auto single = run(OptimizerKind::signsgd, *p.objective, solo, sched, 30,
                            p.initial_point(0), opts);
    CHECK(same_iterates(dist, single));
  }
  SUBCASE("zero noise makes the worker count irrelevant") {
    QuadraticSpec spec;
    spec.dim = 7;
    const Problem quiet = make_quadratic_problem(spec);
    auto w1 = make_worker_oracles(quiet, 1, 0);
    auto w5 = make_worker_oracles(quiet, 5, 0);
    auto p1 = pointers(w1);
    auto p5 = pointers(w5);
    const auto a = run_distributed(*quiet.objective, p1, sched, 25, quiet.initial_point(0),
                                   AggregationMode::majority, opts);
    const auto b = run_distributed(*quiet.objective, p5, sched, 25, quiet.initial_point(0),
                                   AggregationMode::majority, opts);
    CHECK(same_iterates(a, b));
  }
  SUBCASE("ledger arithmetic") {
    const std::size_t M = 4, d = 7;
    const std::uint64_t K = 11;
    auto workers = make_worker_oracles(p, M, 3);
    auto ptrs = pointers(workers);
    CommLedger ledger;
    const auto traj = run_distributed(*p.objective, ptrs, sched, K, p.initial_point(0),
                                      AggregationMode::majority, {}, &ledger);
    CHECK(traj.size() == K + 1);
    CHECK(traj.back().bits_up + traj.back().bits_down == (M + 1) * d * K);
    CHECK(ledger.bits_total_delivered() == 2 * M * d * K);
    CHECK(traj.back().oracle_calls == 2 * K);
    CHECK(run_distributed(*p.objective, ptrs, sched, 0, p.initial_point(0),
                          AggregationMode::majority)
              .empty());
  }
}

TEST_CASE("vote error stays under the bound across SNRs and worker counts") {
  const NoiseModel gauss = noise::GaussianPerCoord{{1.0}};
  for (double s : {0.5, 1.0, 2.0, 4.0}) {
    double prev = 1.0;
    for (std::size_t m : {1u, 3u, 9u, 33u}) {
      const auto est = estimate_vote_error(gauss, s, m, 20000, 17);
      const double slack = 4.0 * est.standard_error;
      REQUIRE(est.rate <= std::min(1.0, 1.0 / (std::sqrt(double(m)) * s)) + slack);
      REQUIRE(est.rate <= prev + slack);
      prev = est.rate;
    }
  }
}
