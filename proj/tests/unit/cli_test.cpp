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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "signopt/cli/commands.hpp"
#include "signopt/cli/config.hpp"
#include "signopt/theory.hpp"

using namespace signopt;
using namespace signopt::cli;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("signopt_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::vector<double>> read_numeric_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

const char* kQuadratic = R"(
# small quadratic
problem.name = quadratic
problem.d = 6
problem.noise = gaussian
problem.sigma = 1
optimizer.kind = signsgd
schedule.kind = constant
schedule.delta = 0.02
run.K = 40
run.seeds = 1-4
)";

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(kQuadratic);
  CHECK(c.problem_name == "quadratic");
  CHECK(c.dim == 6u);
  CHECK(c.iterations == 40);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3, 4});
  CHECK(c.optimizer == RunKind::signsgd);
  CHECK(parse_seed_list("1,2,5-7") == std::vector<std::uint64_t>{1, 2, 5, 6, 7});
}

TEST_CASE("config errors name the offending key") {
  auto key_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of("problem.bogus = 3\n") == "problem.bogus");
  CHECK(key_of("run.K = 5\nrun.K = 6\n") == "run.K");
  CHECK(key_of("run.K = -1\n") == "run.K");
  CHECK(key_of("problem.name = mnist\n") == "problem.name");
  CHECK(key_of("signum.beta = 1.0\n") == "signum.beta");
  CHECK(key_of("distributed.M = 4\n") == "distributed.M");
  CHECK(key_of("run.seeds = 5-2\n") == "run.seeds");
  CHECK(key_of("optimizer.kind = sgd\nschedule.kind = signum\n") == "schedule.kind");
  CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/signopt.cfg"), ConfigError);
}

TEST_CASE("run writes deterministic per-seed and aggregate CSVs") {
  const auto config = parse_config(kQuadratic);
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  std::ostringstream log;
  CHECK(cmd_run(config, a, 1, log) == kExitOk);
  CHECK(cmd_run(config, b, 3, log) == kExitOk);
  for (const char* name : {"seed_1.csv", "seed_4.csv", "aggregate.csv"}) {
    REQUIRE(fs::exists(a / name));
    CHECK(slurp(a / name) == slurp(b / name));
  }
  CHECK(slurp(a / "seed_1.csv").rfind("k,f,grad_l1,grad_l2,oracle_calls_cum,bits_up,bits_down\n", 0) == 0);

  // Aggregate recomputed from the per-seed files.
  const auto agg = read_numeric_csv(a / "aggregate.csv");
  std::vector<std::vector<std::vector<double>>> per_seed;
  for (auto s : config.seeds) {
    per_seed.push_back(read_numeric_csv(a / ("seed_" + std::to_string(s) + ".csv")));
  }
  REQUIRE(agg.size() == 41);
  for (std::size_t k = 0; k < agg.size(); ++k) {
    double fm = 0.0, gm = 0.0;
    for (const auto& t : per_seed) {
      fm += t[k][1];
      gm += t[k][2];
    }
    fm /= per_seed.size();
    gm /= per_seed.size();
    double fv = 0.0, gv = 0.0;
    for (const auto& t : per_seed) {
      fv += (t[k][1] - fm) * (t[k][1] - fm);
      gv += (t[k][2] - gm) * (t[k][2] - gm);
    }
    REQUIRE(std::abs(agg[k][1] - fm) <= 1e-12 * std::max(1.0, std::abs(fm)));
    REQUIRE(std::abs(agg[k][2] - std::sqrt(fv / per_seed.size())) <= 1e-12);
    REQUIRE(std::abs(agg[k][3] - gm) <= 1e-12 * std::max(1.0, std::abs(gm)));
    REQUIRE(std::abs(agg[k][4] - std::sqrt(gv / per_seed.size())) <= 1e-12);
  }
}

TEST_CASE("zero iterations give header-only CSVs") {
  auto config = parse_config(kQuadratic);
  config.iterations = 0;
  config.seeds = {7};
  const fs::path dir = scratch("k0");
  std::ostringstream log;
  CHECK(cmd_run(config, dir, 1, log) == kExitOk);
  CHECK(slurp(dir / "seed_7.csv") ==
        "k,f,grad_l1,grad_l2,oracle_calls_cum,bits_up,bits_down\n");
  CHECK(slurp(dir / "aggregate.csv") == "k,f_mean,f_std,g1_mean,g1_std\n");
}

TEST_CASE("snapshots can feed the stats command") {
  auto config = parse_config(kQuadratic);
  config.seeds = {2};
  config.iterations = 5;
  config.snapshots = true;
  const fs::path dir = scratch("snap");
  std::ostringstream log;
  REQUIRE(cmd_run(config, dir, 1, log) == kExitOk);
  const auto points = read_points_csv(dir / "seed_2_x.csv");
  CHECK(points.size() == 6);
  CHECK(points[0].size() == 6);
  CHECK(cmd_stats(config, points, 50, dir, log) == kExitOk);
  CHECK(read_numeric_csv(dir / "stats.csv").size() == 6);
}

TEST_CASE("stats command edge cases") {
  SUBCASE("zero noise gives zero sigma columns") {
    auto config = parse_config("problem.name = quadratic\nproblem.noise = none\n");
    const auto rows = gradient_stats(config, {Vector(10, 1.0)}, 20);
    REQUIRE(rows.size() == 1);
    for (double s : rows[0].stats.sigma) CHECK(s == 0.0);
    CHECK_FALSE(rows[0].stats.phi_sigma.has_value());
  }
  SUBCASE("flat gradient point has unit density") {
    auto config = parse_config(
        "problem.name = quadratic\nproblem.noise = none\nproblem.a_min = 1\n"
        "problem.a_max = 1\n");
    const auto rows = gradient_stats(config, {Vector(10, 1.0)}, 20);
    CHECK(rows[0].stats.phi_g == doctest::Approx(1.0));
  }
  SUBCASE("toy problem noise density is about 1/d") {
    const ExperimentConfig config;
    const auto rows = gradient_stats(config, {Vector(100, 1.0)}, 20000);
    CHECK(*rows[0].stats.phi_sigma == doctest::Approx(0.01).epsilon(0.1));
  }
}

TEST_CASE("bounds on a noiseless quadratic pass with margin") {
  auto config = parse_config(
      "problem.name = quadratic\nproblem.noise = none\noptimizer.kind = signsgd\n"
      "schedule.kind = thm1\nrun.K = 100\nrun.seeds = 0-2\n");
  const auto r = evaluate_bound(config);
  CHECK(r.pass);
  CHECK(r.margin() > 0.0);
  CHECK(r.oracle_calls == 10000);

  const Problem p = build_problem(config);
  theory::BoundInputs in;
  in.lipschitz = p.objective->lipschitz();
  in.sigma = Vector(10, 0.0);
  in.f0 = p.objective->value(p.initial_point(0));
  in.oracle_calls = 10000;
  CHECK(r.rhs == doctest::Approx(theory::thm1_rhs(in)));

  config.optimizer = RunKind::sgd;
  CHECK_THROWS_AS(evaluate_bound(config), ConfigError);
}

TEST_CASE("commcost") {
  const auto r = commcost(2, 10, 1);
  REQUIRE(r.rows.size() == 4);
  CHECK(r.rows[3].scheme == "SignMajority");
  CHECK(r.rows[3].bits_per_iter == 40.0);
  CHECK(r.rows[0].bits_per_iter == 32.0 * r.rows[3].bits_per_iter);
  CHECK(r.measured_per_iter == 40.0);
  CHECK(r.pass);
  std::ostringstream log;
  CHECK(cmd_commcost(3, 7, 5, std::nullopt, log) == kExitOk);
  CHECK(log.str().find("PASS") != std::string::npos);
}

TEST_CASE("votesim command") {
  VoteSimOptions opts;
  opts.rounds = 2000;
  opts.workers = {1, 9};
  opts.dump = scratch("dump");
  const fs::path out = scratch("vote");
  std::ostringstream log;
  CHECK(cmd_votesim(opts, out, log) == kExitOk);
  CHECK(fs::exists(out / "votesim.csv"));
  CHECK(fs::exists(*opts.dump / "up_8.bin"));
  const std::string decision = slurp(*opts.dump / "decision.bin");
  CHECK(decision.size() == 4 + 2);
}
