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

#include "signopt/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "signopt/optimizers.hpp"
#include "signopt/theory.hpp"
#include "signopt/votesim.hpp"

namespace signopt::cli {

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Trajectory run_seed(const ExperimentConfig& config, const Problem& problem,
                    std::uint64_t seed) {
  const Schedule schedule = build_schedule(config, problem);
  const RunOptions options = build_run_options(config);
  Vector x0 = problem.initial_point(seed);

  if (config.optimizer == RunKind::majority) {
    auto oracles = make_worker_oracles(problem, config.workers, seed);
    std::vector<GradientOracle*> workers;
    for (auto& o : oracles) workers.push_back(&o);
    return run_distributed(*problem.objective, workers, schedule, config.iterations,
                           std::move(x0), config.mode, options);
  }
  StochasticOracle oracle = problem.make_oracle(seed);
  const OptimizerKind kind = config.optimizer == RunKind::signum ? OptimizerKind::signum
                             : config.optimizer == RunKind::sgd  ? OptimizerKind::sgd
                                                                 : OptimizerKind::signsgd;
  return run(kind, *problem.objective, oracle, schedule, config.iterations,
             std::move(x0), options);
}

std::vector<Trajectory> run_experiment(const ExperimentConfig& config, unsigned threads) {
  const Problem problem = build_problem(config);
  (void)build_schedule(config, problem);
  std::vector<Trajectory> runs(config.seeds.size());
  parallel_for(runs.size(), threads, [&](std::size_t i) {
    runs[i] = run_seed(config, problem, config.seeds[i]);
  });
  return runs;
}

std::vector<AggregateRow> aggregate(const std::vector<Trajectory>& runs) {
  std::vector<AggregateRow> rows;
  if (runs.empty()) return rows;
  const std::size_t len = runs.front().size();
  for (const auto& t : runs) {
    if (t.size() != len) throw Error("cannot aggregate trajectories of different lengths");
  }
  const double n = static_cast<double>(runs.size());
  rows.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    double f_sum = 0.0, g_sum = 0.0;
    for (const auto& t : runs) {
      f_sum += t[k].f;
      g_sum += t[k].grad_l1;
    }
    const double f_mean = f_sum / n;
    const double g_mean = g_sum / n;
    double f_var = 0.0, g_var = 0.0;
    for (const auto& t : runs) {
      f_var += (t[k].f - f_mean) * (t[k].f - f_mean);
      g_var += (t[k].grad_l1 - g_mean) * (t[k].grad_l1 - g_mean);
    }
    rows[k] = {runs.front()[k].k, f_mean, std::sqrt(f_var / n), g_mean,
               std::sqrt(g_var / n)};
  }
  return rows;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "k,f,grad_l1,grad_l2,oracle_calls_cum,bits_up,bits_down\n";
  for (const auto& r : traj.steps()) {
    out << r.k << ',' << format_double(r.f) << ',' << format_double(r.grad_l1) << ','
        << format_double(r.grad_l2) << ',' << r.oracle_calls << ',' << r.bits_up << ','
        << r.bits_down << '\n';
  }
}

void write_snapshot_csv(std::ostream& out, const Trajectory& traj) {
  if (traj.empty() || !traj[0].x) return;
  const std::size_t d = traj[0].x->size();
  for (std::size_t i = 0; i < d; ++i) out << (i ? "," : "") << "x_" << i;
  out << '\n';
  for (const auto& r : traj.steps()) {
    for (std::size_t i = 0; i < d; ++i) out << (i ? "," : "") << format_double((*r.x)[i]);
    out << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "k,f_mean,f_std,g1_mean,g1_std\n";
  for (const auto& r : rows) {
    out << r.k << ',' << format_double(r.f_mean) << ',' << format_double(r.f_std) << ','
        << format_double(r.g1_mean) << ',' << format_double(r.g1_std) << '\n';
  }
}

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

int cmd_run(const ExperimentConfig& config, const fs::path& out_dir, unsigned threads,
            std::ostream& log) {
  const auto runs = run_experiment(config, threads);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string stem = "seed_" + std::to_string(config.seeds[i]);
    auto out = open_output(out_dir / (stem + ".csv"));
    write_trajectory_csv(out, runs[i]);
    if (config.snapshots) {
      auto snap = open_output(out_dir / (stem + "_x.csv"));
      write_snapshot_csv(snap, runs[i]);
    }
  }
  const auto rows = aggregate(runs);
  auto agg = open_output(out_dir / "aggregate.csv");
  write_aggregate_csv(agg, rows);

  log << "run: " << to_string(config.optimizer) << " on " << config.problem_name
      << ", K=" << config.iterations << ", seeds=" << config.seeds.size() << '\n';
  if (!rows.empty()) {
    log << "  initial f mean " << format_double(rows.front().f_mean) << ", final f mean "
        << format_double(rows.back().f_mean) << " (std "
        << format_double(rows.back().f_std) << ")\n";
  }
  log << "  wrote " << (out_dir / "aggregate.csv").string() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------

SparseNoiseReport reproduce_sparse_noise(const SparseNoiseOptions& options,
                                         unsigned threads) {
  ExperimentConfig base;
  base.problem_name = "sparse_noise";
  base.schedule = ScheduleKind::constant;
  base.batch = 1;
  base.iterations = options.steps;
  base.seeds = options.seeds;
  if (base.seeds.empty()) {
    base.seeds.clear();
    for (std::uint64_t s = 0; s < 50; ++s) base.seeds.push_back(s);
  }

  ExperimentConfig sign_cfg = base;
  sign_cfg.optimizer = RunKind::signsgd;
  sign_cfg.delta = options.signsgd_delta;
  ExperimentConfig sgd_cfg = base;
  sgd_cfg.optimizer = RunKind::sgd;
  sgd_cfg.delta = options.sgd_delta;

  SparseNoiseReport report;
  report.signsgd = aggregate(run_experiment(sign_cfg, threads));
  report.sgd = aggregate(run_experiment(sgd_cfg, threads));
  if (!report.signsgd.empty()) {
    report.signsgd_final = report.signsgd.back().f_mean;
    report.sgd_final = report.sgd.back().f_mean;
    report.pass = report.signsgd_final < report.sgd_final;
  }
  return report;
}

int cmd_reproduce_sparse_noise(const SparseNoiseOptions& options, const fs::path& out_dir,
                               unsigned threads, std::ostream& log) {
  const auto report = reproduce_sparse_noise(options, threads);
  fs::create_directories(out_dir);
  auto out = open_output(out_dir / "sparse_noise.csv");
  out << "k,signsgd_f_mean,signsgd_f_std,signsgd_f_lo,signsgd_f_hi,"
         "sgd_f_mean,sgd_f_std,sgd_f_lo,sgd_f_hi\n";
  for (std::size_t k = 0; k < report.signsgd.size(); ++k) {
    const auto& a = report.signsgd[k];
    const auto& b = report.sgd[k];
    out << a.k << ',' << format_double(a.f_mean) << ',' << format_double(a.f_std) << ','
        << format_double(a.f_mean - a.f_std) << ',' << format_double(a.f_mean + a.f_std)
        << ',' << format_double(b.f_mean) << ',' << format_double(b.f_std) << ','
        << format_double(b.f_mean - b.f_std) << ',' << format_double(b.f_mean + b.f_std)
        << '\n';
  }
  log << "sparse-noise toy problem (d=100, noise std 100 on coordinate 0)\n"
      << "  signSGD lr " << options.signsgd_delta << ": final mean f "
      << format_double(report.signsgd_final) << '\n'
      << "  SGD     lr " << options.sgd_delta << ": final mean f "
      << format_double(report.sgd_final) << '\n'
      << "  verdict: " << (report.pass ? "PASS" : "FAIL")
      << " (signSGD ends below SGD)\n";
  return report.pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

namespace {

double max_initial_f(const std::vector<Trajectory>& runs) {
  double f0 = -std::numeric_limits<double>::infinity();
  for (const auto& t : runs) f0 = std::max(f0, t[0].f);
  return f0;
}

/// Seed mean of (1/(K - first)) sum_{k=first}^{K-1} value(record k).
template <class Fn>
double seed_mean_of_step_mean(const std::vector<Trajectory>& runs, std::uint64_t first,
                              std::uint64_t iterations, Fn value) {
  double total = 0.0;
  for (const auto& t : runs) {
    double s = 0.0;
    for (std::uint64_t k = first; k < iterations; ++k) s += value(t[k]);
    total += s / static_cast<double>(iterations - first);
  }
  return total / static_cast<double>(runs.size());
}

}  // namespace

BoundReport evaluate_bound(const ExperimentConfig& config, unsigned threads) {
  if (config.iterations == 0) throw ConfigError("run.K", "bounds need K >= 1");
  const Problem problem = build_problem(config);
  const Schedule schedule = build_schedule(config, problem);
  const RunKind kind = config.optimizer;
  const ScheduleKind sched = config.schedule;

  const bool thm1 = kind == RunKind::signsgd && sched == ScheduleKind::thm1;
  const bool thm2 = kind == RunKind::majority && sched == ScheduleKind::thm1 &&
                    config.mode == AggregationMode::majority;
  const bool small = kind == RunKind::signsgd && sched == ScheduleKind::small_batch;
  const bool sgd = kind == RunKind::sgd &&
                   (sched == ScheduleKind::sgd_large || sched == ScheduleKind::sgd_small);
  const bool signum = kind == RunKind::signum && sched == ScheduleKind::signum;
  if (!(thm1 || thm2 || small || sgd || signum)) {
    throw ConfigError("schedule.kind", "no convergence bound for optimizer '" +
                                           std::string(to_string(kind)) + "' with schedule '" +
                                           std::string(to_string(sched)) + "'");
  }

  ExperimentConfig cfg = config;
  cfg.snapshots = small;
  const auto runs = run_experiment(cfg, threads);

  theory::BoundInputs in;
  in.lipschitz = problem.objective->lipschitz();
  in.sigma = problem.sigma();
  in.f0 = max_initial_f(runs);
  in.f_star = problem.objective->lower_bound();
  in.oracle_calls = schedule.total_batch(config.iterations);

  BoundReport r;
  r.oracle_calls = in.oracle_calls;
  const std::uint64_t K = config.iterations;
  if (thm1 || thm2) {
    const double m = seed_mean_of_step_mean(runs, 0, K,
                                            [](const StepRecord& s) { return s.grad_l1; });
    r.lhs = m * m;
    if (thm1) {
      r.theorem = "signsgd_large_batch";
      r.rhs = theory::thm1_rhs(in);
    } else {
      r.theorem = "majority_vote";
      in.workers = config.workers;
      r.rhs = theory::thm2b_rhs(in);
    }
  } else if (small) {
    r.theorem = "signsgd_small_batch";
    double total = 0.0;
    for (const auto& t : runs) {
      double best = std::numeric_limits<double>::infinity();
      for (std::uint64_t k = 0; k < K; ++k) {
        const Vector g = problem.objective->gradient(*t[k].x);
        best = std::min(best, theory::mixed_norm(g, in.sigma));
      }
      total += best;
    }
    r.lhs = total / static_cast<double>(runs.size());
    r.rhs = theory::smallbatch_rhs(in);
  } else if (sgd) {
    r.theorem = sched == ScheduleKind::sgd_large ? "sgd_large_batch" : "sgd_small_batch";
    r.lhs = seed_mean_of_step_mean(
        runs, 0, K, [](const StepRecord& s) { return s.grad_l2 * s.grad_l2; });
    const double sigma_sq = l2_norm(in.sigma) * l2_norm(in.sigma);
    r.rhs = theory::sgd_rhs(linf_norm(in.lipschitz), sigma_sq, in.f0, in.f_star,
                            in.oracle_calls);
  } else {
    r.theorem = "signum_shape";
    const std::uint64_t warmup = config.warmup.value_or(compute_warmup(config.beta));
    if (warmup >= K) throw ConfigError("run.K", "must exceed the Signum warmup");
    const double m = seed_mean_of_step_mean(runs, warmup, K,
                                            [](const StepRecord& s) { return s.grad_l1; });
    double f_c = 0.0;
    for (const auto& t : runs) f_c += t[warmup].f;
    in.f_warmup = f_c / static_cast<double>(runs.size());
    in.beta = config.beta;
    in.delta0 = config.delta0;
    r.lhs = m * m / theory::signum_bound_shape(in);
    r.rhs = 10.0;
  }
  r.pass = r.lhs <= r.rhs;
  return r;
}

int cmd_bounds(const ExperimentConfig& config, unsigned threads, std::ostream& log) {
  const auto r = evaluate_bound(config, threads);
  log << "bound " << r.theorem << " (N = " << r.oracle_calls << ")\n"
      << "  LHS    " << format_double(r.lhs) << '\n'
      << "  RHS    " << format_double(r.rhs) << '\n'
      << "  margin " << format_double(r.margin()) << '\n'
      << "  " << (r.pass ? "PASS" : "FAIL") << '\n';
  return r.pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

CommCostReport commcost(std::size_t workers, std::size_t dim, std::uint64_t iterations) {
  if (workers == 0 || dim == 0 || iterations == 0) {
    throw Error("commcost needs positive workers, dim and iterations");
  }
  CommCostReport report;
  for (auto scheme : {CommScheme::sgd, CommScheme::qsgd, CommScheme::terngrad,
                      CommScheme::sign_majority}) {
    const double per_iter = comm_bits_per_iter(scheme, workers, dim);
    report.rows.push_back({std::string(to_string(scheme)), per_iter,
                           per_iter * static_cast<double>(iterations)});
  }

  QuadraticSpec spec;
  spec.dim = dim;
  spec.noise = noise::GaussianPerCoord{Vector(dim, 1.0)};
  const Problem problem = make_quadratic_problem(spec);
  auto oracles = make_worker_oracles(problem, workers, 0);
  std::vector<GradientOracle*> ptrs;
  for (auto& o : oracles) ptrs.push_back(&o);
  CommLedger ledger;
  run_distributed(*problem.objective, ptrs, Schedule::constant(0.01, 1), iterations,
                  problem.initial_point(0), AggregationMode::majority, {}, &ledger);

  report.measured_up = ledger.bits_up();
  report.measured_down = ledger.bits_down();
  report.measured_down_delivered = ledger.bits_down_delivered();
  report.measured_per_iter = static_cast<double>(ledger.bits_total_delivered()) /
                             static_cast<double>(ledger.rounds());
  report.pass = report.measured_per_iter ==
                comm_bits_per_iter(CommScheme::sign_majority, workers, dim);
  return report;
}

int cmd_commcost(std::size_t workers, std::size_t dim, std::uint64_t iterations,
                 const std::optional<fs::path>& out_dir, std::ostream& log) {
  const auto report = commcost(workers, dim, iterations);
  std::ostringstream table;
  table << "scheme,bits_per_iter,bits_per_run\n";
  for (const auto& row : report.rows) {
    table << row.scheme << ',' << format_double(row.bits_per_iter) << ','
          << format_double(row.bits_per_run) << '\n';
  }
  table << "SignMajority(measured)," << format_double(report.measured_per_iter) << ','
        << format_double(report.measured_per_iter * static_cast<double>(iterations))
        << '\n';
  log << "communication cost, M=" << workers << " d=" << dim << " K=" << iterations << '\n'
      << table.str() << "measured uplink " << report.measured_up << " bits, downlink "
      << report.measured_down << " bits broadcast / " << report.measured_down_delivered
      << " bits delivered\n"
      << (report.pass ? "PASS" : "FAIL") << ": measured payload per iteration "
      << (report.pass ? "equals" : "differs from") << " 2Md\n";
  if (out_dir) {
    fs::create_directories(*out_dir);
    auto out = open_output(*out_dir / "commcost.csv");
    out << table.str();
  }
  return report.pass ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

std::vector<StatsRow> gradient_stats(const ExperimentConfig& config,
                                     const std::vector<Vector>& points,
                                     std::uint64_t samples) {
  const Problem problem = build_problem(config);
  const double phi_l = density(problem.objective->lipschitz());
  std::vector<StatsRow> rows;
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (points[p].size() != problem.dim()) {
      throw Error("point " + std::to_string(p) + " has dimension " +
                  std::to_string(points[p].size()) + ", expected " +
                  std::to_string(problem.dim()));
    }
    StochasticOracle oracle = problem.make_oracle(worker_seed(config.seeds.front(), p));
    rows.push_back({p, measure_gradient_stats(oracle, points[p], samples), phi_l});
  }
  return rows;
}

std::vector<Vector> read_points_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open points file " + path.string());
  std::vector<Vector> points;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    Vector row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw Error("non-numeric entry in points file " + path.string());
    }
    first = false;
    points.push_back(std::move(row));
  }
  return points;
}

int cmd_stats(const ExperimentConfig& config, const std::vector<Vector>& points,
              std::uint64_t samples, const fs::path& out_dir, std::ostream& log) {
  std::vector<Vector> xs = points;
  if (xs.empty()) {
    const Problem problem = build_problem(config);
    for (auto s : config.seeds) xs.push_back(problem.initial_point(s));
  }
  const auto rows = gradient_stats(config, xs, samples);
  fs::create_directories(out_dir);
  auto summary = open_output(out_dir / "stats.csv");
  auto coords = open_output(out_dir / "stats_coords.csv");
  summary << "point,phi_g,phi_sigma,phi_L,R1,R2\n";
  coords << "point,i,mean,std\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : rows) {
    const auto& s = row.stats;
    const double phi_sigma = s.phi_sigma.value_or(nan);
    const double r1 = std::sqrt(row.phi_lipschitz) / s.phi_g;
    const double r2 = phi_sigma / s.phi_g;
    summary << row.point << ',' << format_double(s.phi_g) << ',' << format_double(phi_sigma)
            << ',' << format_double(row.phi_lipschitz) << ',' << format_double(r1) << ','
            << format_double(r2) << '\n';
    for (std::size_t i = 0; i < s.mean.size(); ++i) {
      coords << row.point << ',' << i << ',' << format_double(s.mean[i]) << ','
             << format_double(s.sigma[i]) << '\n';
    }
    log << "point " << row.point << ": phi_g " << format_double(s.phi_g) << ", phi_sigma "
        << format_double(phi_sigma) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

std::vector<VoteSimRow> votesim(const VoteSimOptions& options) {
  NoiseModel noise;
  double g_value = 0.0;
  const bool gaussian = options.noise == "gaussian";
  if (gaussian) {
    if (!(options.snr >= 0.0)) throw Error("snr must be non-negative");
    noise = noise::GaussianPerCoord{Vector{1.0}};
    g_value = options.snr;
  } else if (options.noise == "skewed") {
    noise::SkewedTwoPoint skew;
    g_value = skew.mean();
    noise = skew;
  } else {
    throw Error("votesim noise must be gaussian or skewed");
  }

  std::vector<VoteSimRow> rows;
  for (std::size_t m : options.workers) {
    VoteSimRow row;
    row.workers = m;
    row.estimate = estimate_vote_error(noise, g_value, m, options.rounds, options.seed);
    row.bound = gaussian ? theory::vote_error_bound(m, options.snr)
                         : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  return rows;
}

int cmd_votesim(const VoteSimOptions& options, const fs::path& out_dir, std::ostream& log) {
  const auto rows = votesim(options);
  fs::create_directories(out_dir);
  auto out = open_output(out_dir / "votesim.csv");
  out << "M,error_rate,standard_error,bound\n";
  log << "majority vote decision error, noise " << options.noise << ", "
      << options.rounds << " rounds\n";
  for (const auto& r : rows) {
    out << r.workers << ',' << format_double(r.estimate.rate) << ','
        << format_double(r.estimate.standard_error) << ',' << format_double(r.bound) << '\n';
    log << "  M=" << r.workers << "  error " << format_double(r.estimate.rate) << " +/- "
        << format_double(r.estimate.standard_error) << "  bound "
        << format_double(r.bound) << '\n';
  }

  if (options.dump) {
    const std::size_t m = options.workers.empty()
                              ? 1
                              : *std::max_element(options.workers.begin(),
                                                  options.workers.end());
    QuadraticSpec spec;
    spec.dim = 16;
    spec.noise = noise::GaussianPerCoord{Vector(16, 1.0)};
    spec.seed = options.seed;
    const Problem problem = make_quadratic_problem(spec);
    auto oracles = make_worker_oracles(problem, m, options.seed);
    std::vector<GradientOracle*> ptrs;
    for (auto& o : oracles) ptrs.push_back(&o);
    Vector x = problem.initial_point(options.seed);
    const VoteRound round = vote_round(x, ptrs, {0.01, 1}, AggregationMode::majority);
    fs::create_directories(*options.dump);
    auto write = [](const fs::path& p, const SignMessage& msg) {
      const auto bytes = serialize(msg);
      auto f = open_output(p);
      f.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    };
    for (std::size_t i = 0; i < round.up_messages.size(); ++i) {
      write(*options.dump / ("up_" + std::to_string(i) + ".bin"), round.up_messages[i]);
    }
    write(*options.dump / "decision.bin", round.decision);
    log << "  dumped " << m << " uplink messages and the decision to "
        << options.dump->string() << '\n';
  }
  return kExitOk;
}

}  // namespace signopt::cli
