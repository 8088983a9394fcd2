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

#include "signopt/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace signopt::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t parse_u64(std::string_view text, const std::string& key) {
  text = trim(text);
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(key, "expected a non-negative integer, got '" +
                               std::string(text) + "'");
  }
  return value;
}

double parse_double(std::string_view text, const std::string& key) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() ||
      !std::isfinite(value)) {
    throw ConfigError(key, "expected a finite number, got '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(std::string_view text, const std::string& key) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(text) + "'");
}

template <class Fn>
auto parse_enum(std::string_view text, const std::string& key, Fn fn) {
  try {
    return fn(trim(text));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(key, e.what());
  }
}

RunKind parse_run_kind(std::string_view name) {
  for (auto kind : {RunKind::signsgd, RunKind::signum, RunKind::sgd, RunKind::majority}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error("unknown optimizer kind '" + std::string(name) + "'");
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, const std::string&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"problem.name",
       [](auto& c, auto v, auto& k) {
         c.problem_name = std::string(trim(v));
         if (c.problem_name != "sparse_noise" && c.problem_name != "quadratic") {
           throw ConfigError(k, "unknown problem '" + c.problem_name + "'");
         }
       }},
      {"problem.d", [](auto& c, auto v, auto& k) { c.dim = parse_u64(v, k); }},
      {"problem.a_min", [](auto& c, auto v, auto& k) { c.a_min = parse_double(v, k); }},
      {"problem.a_max", [](auto& c, auto v, auto& k) { c.a_max = parse_double(v, k); }},
      {"problem.noise",
       [](auto& c, auto v, auto& k) {
         static const std::set<std::string, std::less<>> known = {
             "none", "gaussian", "sparse_gaussian", "uniform", "skewed"};
         const auto name = trim(v);
         if (!known.contains(name)) {
           throw ConfigError(k, "unknown noise model '" + std::string(name) + "'");
         }
         c.noise_kind = std::string(name);
       }},
      {"problem.sigma", [](auto& c, auto v, auto& k) { c.noise_scale = parse_double(v, k); }},
      {"problem.noise_indices",
       [](auto& c, auto v, auto& k) {
         c.noise_indices.clear();
         for (auto s : parse_seed_list(v, k)) c.noise_indices.push_back(s);
       }},
      {"problem.seed", [](auto& c, auto v, auto& k) { c.problem_seed = parse_u64(v, k); }},
      {"problem.x0",
       [](auto& c, auto v, auto& k) {
         const auto mode = trim(v);
         if (mode == "per_seed") c.x0_per_seed = true;
         else if (mode == "fixed") c.x0_per_seed = false;
         else throw ConfigError(k, "expected per_seed or fixed");
       }},
      {"problem.x0_scale", [](auto& c, auto v, auto& k) { c.x0_scale = parse_double(v, k); }},
      {"optimizer.kind",
       [](auto& c, auto v, auto& k) { c.optimizer = parse_enum(v, k, parse_run_kind); }},
      {"schedule.kind",
       [](auto& c, auto v, auto& k) {
         c.schedule = parse_enum(v, k, parse_schedule_kind);
       }},
      {"schedule.delta", [](auto& c, auto v, auto& k) { c.delta = parse_double(v, k); }},
      {"schedule.batch", [](auto& c, auto v, auto& k) { c.batch = parse_u64(v, k); }},
      {"run.K", [](auto& c, auto v, auto& k) { c.iterations = parse_u64(v, k); }},
      {"run.seeds", [](auto& c, auto v, auto& k) { c.seeds = parse_seed_list(v, k); }},
      {"run.snapshots", [](auto& c, auto v, auto& k) { c.snapshots = parse_bool(v, k); }},
      {"run.out", [](auto& c, auto v, auto&) { c.out_dir = std::string(trim(v)); }},
      {"distributed.M", [](auto& c, auto v, auto& k) { c.workers = parse_u64(v, k); }},
      {"distributed.mode",
       [](auto& c, auto v, auto& k) { c.mode = parse_enum(v, k, parse_aggregation_mode); }},
      {"signum.beta", [](auto& c, auto v, auto& k) { c.beta = parse_double(v, k); }},
      {"signum.delta0", [](auto& c, auto v, auto& k) { c.delta0 = parse_double(v, k); }},
      {"signum.warmup", [](auto& c, auto v, auto& k) { c.warmup = parse_u64(v, k); }},
  };
  return table;
}

void validate(const ExperimentConfig& c) {
  if (c.seeds.empty()) throw ConfigError("run.seeds", "at least one seed is required");
  if (c.dim && *c.dim == 0) throw ConfigError("problem.d", "must be >= 1");
  if (c.workers == 0) throw ConfigError("distributed.M", "must be >= 1");
  if (c.workers != 1 && c.optimizer != RunKind::majority) {
    throw ConfigError("distributed.M", "only meaningful with optimizer.kind = majority");
  }
  if (c.batch == 0) throw ConfigError("schedule.batch", "must be >= 1");
  if (c.delta < 0.0) throw ConfigError("schedule.delta", "must be non-negative");
  if (!(c.beta >= 0.0 && c.beta < 1.0)) {
    throw ConfigError("signum.beta", "momentum must lie in [0, 1)");
  }
  if (!(c.delta0 > 0.0)) throw ConfigError("signum.delta0", "must be positive");
  if (c.noise_scale && *c.noise_scale < 0.0) {
    throw ConfigError("problem.sigma", "must be non-negative");
  }
  if (c.schedule == ScheduleKind::signum && c.optimizer != RunKind::signum) {
    throw ConfigError("schedule.kind", "signum schedule requires optimizer.kind = signum");
  }
}

}  // namespace

std::string_view to_string(RunKind kind) {
  switch (kind) {
    case RunKind::signsgd: return "signsgd";
    case RunKind::signum: return "signum";
    case RunKind::sgd: return "sgd";
    case RunKind::majority: return "majority";
  }
  return "unknown";
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text, const std::string& key) {
  std::vector<std::uint64_t> out;
  std::string_view rest = trim(text);
  if (rest.empty()) throw ConfigError(key, "empty list");
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) {
      out.push_back(parse_u64(item, key));
      continue;
    }
    const std::uint64_t lo = parse_u64(item.substr(0, dash), key);
    const std::uint64_t hi = parse_u64(item.substr(dash + 1), key);
    if (hi < lo) throw ConfigError(key, "descending range '" + std::string(item) + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(view.substr(0, eq)));
    const std::string_view value = trim(view.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "repeated key");
    it->second(config, value, key);
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

Problem build_problem(const ExperimentConfig& c) {
  const bool sparse = c.problem_name == "sparse_noise";
  const std::size_t d = c.dim.value_or(sparse ? 100 : 10);
  const std::string kind = c.noise_kind.value_or(sparse ? "sparse_gaussian" : "gaussian");
  const double scale = c.noise_scale.value_or(sparse ? 100.0 : 1.0);

  NoiseModel noise;
  if (kind == "gaussian") noise = noise::GaussianPerCoord{Vector(d, scale)};
  else if (kind == "sparse_gaussian") noise = noise::SparseGaussian{scale, c.noise_indices};
  else if (kind == "uniform") noise = noise::UniformPerCoord{Vector(d, scale)};
  else if (kind == "skewed") noise = noise::SkewedTwoPoint{};

  try {
    if (sparse) {
      Problem p = make_sparse_noise_problem();
      if (d != p.dim()) p.objective = std::make_shared<QuadraticProblem>(Vector(d, 1.0));
      noise.validate(d);
      p.noise = noise;
      p.x0_per_seed = c.x0_per_seed.value_or(true);
      p.seed = c.problem_seed;
      p.x0_scale = c.x0_scale;
      return p;
    }
    QuadraticSpec spec;
    spec.dim = d;
    spec.a_min = c.a_min;
    spec.a_max = c.a_max;
    spec.noise = noise;
    spec.seed = c.problem_seed;
    spec.x0_per_seed = c.x0_per_seed.value_or(false);
    spec.x0_scale = c.x0_scale;
    return make_quadratic_problem(spec);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("problem", e.what());
  }
}

Schedule build_schedule(const ExperimentConfig& c, const Problem& problem) {
  const Vector& lip = problem.objective->lipschitz();
  try {
    switch (c.schedule) {
      case ScheduleKind::constant: return Schedule::constant(c.delta, c.batch);
      case ScheduleKind::thm1: return Schedule::thm1(c.iterations, lip);
      case ScheduleKind::small_batch: return Schedule::small_batch(c.iterations, lip);
      case ScheduleKind::signum: return Schedule::signum(c.delta0);
      case ScheduleKind::sgd_large:
        return Schedule::sgd(c.iterations, linf_norm(lip), SgdBatchMode::large);
      case ScheduleKind::sgd_small:
        return Schedule::sgd(c.iterations, linf_norm(lip), SgdBatchMode::small);
    }
  } catch (const Error& e) {
    throw ConfigError("schedule.kind", e.what());
  }
  throw ConfigError("schedule.kind", "unsupported schedule");
}

RunOptions build_run_options(const ExperimentConfig& c) {
  RunOptions o;
  o.snapshots = c.snapshots;
  o.beta = c.beta;
  o.warmup = c.warmup;
  return o;
}

}  // namespace signopt::cli
