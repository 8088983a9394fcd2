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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "signopt/cli/commands.hpp"
#include "signopt/cli/config.hpp"
#include "signopt/core.hpp"
#include "signopt/optimizers.hpp"
#include "signopt/stats.hpp"
#include "signopt/theory.hpp"
#include "signopt/votesim.hpp"

namespace py = pybind11;
using namespace signopt;

namespace {

py::bytes to_bytes(const SignMessage& msg) {
  const auto wire = serialize(msg);
  return py::bytes(reinterpret_cast<const char*>(wire.data()), wire.size());
}

SignMessage from_bytes(const py::bytes& data) {
  const std::string raw = data;
  return deserialize(std::vector<std::uint8_t>(raw.begin(), raw.end()));
}

CommScheme parse_scheme(const std::string& name) {
  for (auto s : {CommScheme::sgd, CommScheme::qsgd, CommScheme::terngrad,
                 CommScheme::sign_majority}) {
    if (name == to_string(s)) return s;
  }
  throw Error("unknown scheme '" + name + "'");
}

py::dict trajectory_dict(const Trajectory& t) {
  std::vector<std::uint64_t> k, calls, up, down;
  std::vector<double> f, g1, g2;
  for (const auto& r : t.steps()) {
    k.push_back(r.k);
    f.push_back(r.f);
    g1.push_back(r.grad_l1);
    g2.push_back(r.grad_l2);
    calls.push_back(r.oracle_calls);
    up.push_back(r.bits_up);
    down.push_back(r.bits_down);
  }
  py::dict d;
  d["k"] = k;
  d["f"] = f;
  d["grad_l1"] = g1;
  d["grad_l2"] = g2;
  d["oracle_calls"] = calls;
  d["bits_up"] = up;
  d["bits_down"] = down;
  return d;
}

py::dict aggregate_dict(const std::vector<cli::AggregateRow>& rows) {
  std::vector<double> fm, fs, gm, gs;
  for (const auto& r : rows) {
    fm.push_back(r.f_mean);
    fs.push_back(r.f_std);
    gm.push_back(r.g1_mean);
    gs.push_back(r.g1_std);
  }
  py::dict d;
  d["f_mean"] = fm;
  d["f_std"] = fs;
  d["g1_mean"] = gm;
  d["g1_std"] = gs;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sign-based stochastic optimization: optimizers, vote simulation, bounds";

  py::register_exception<Error>(m, "SignoptError", PyExc_ValueError);
  py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("sign_vec", [](const Vector& v) { return sign_vec(v); });
  m.def("worker_seed", &worker_seed, py::arg("base_seed"), py::arg("worker_index"));
  m.def("compute_warmup", &compute_warmup, py::arg("beta"));
  m.def("density", [](const Vector& v) { return density(v); });
  m.def("snr", [](const Vector& g, const Vector& s) { return snr(g, s); });

  m.def(
      "schedule_thm1",
      [](std::uint64_t k, const Vector& l) {
        const auto s = schedule_thm1(k, l);
        return py::make_tuple(s.delta, s.batch);
      },
      py::arg("iterations"), py::arg("lipschitz"));
  m.def(
      "schedule_smallbatch",
      [](std::uint64_t k, const Vector& l) {
        const auto s = schedule_smallbatch(k, l);
        return py::make_tuple(s.delta, s.batch);
      },
      py::arg("iterations"), py::arg("lipschitz"));
  m.def(
      "schedule_signum",
      [](std::uint64_t k, double delta0) {
        const auto s = schedule_signum(k, delta0);
        return py::make_tuple(s.delta, s.batch);
      },
      py::arg("k"), py::arg("delta0"));

  m.def("pack_signs", [](const Vector& s) { return to_bytes(pack_signs(s)); },
        "Serialized sign message: u32 little-endian dim, then packed bits.");
  m.def("unpack_signs", [](const py::bytes& b) { return unpack_signs(from_bytes(b)); });
  m.def("aggregate_majority", [](const std::vector<py::bytes>& msgs) {
    std::vector<SignMessage> decoded;
    for (const auto& b : msgs) decoded.push_back(from_bytes(b));
    return to_bytes(aggregate_majority(decoded));
  });
  m.def(
      "comm_bits_per_iter",
      [](const std::string& scheme, std::size_t workers, std::size_t dim) {
        return comm_bits_per_iter(parse_scheme(scheme), workers, dim);
      },
      py::arg("scheme"), py::arg("workers"), py::arg("dim"));
  m.def(
      "estimate_vote_error",
      [](const std::string& noise, double g_value, std::size_t workers,
         std::uint64_t rounds, std::uint64_t seed) {
        NoiseModel model;
        if (noise == "gaussian") {
          model = noise::GaussianPerCoord{{1.0}};
        } else if (noise == "skewed") {
          model = noise::SkewedTwoPoint{};
        } else {
          throw Error("noise must be gaussian or skewed");
        }
        const auto e = estimate_vote_error(model, g_value, workers, rounds, seed);
        return py::make_tuple(e.rate, e.standard_error);
      },
      py::arg("noise"), py::arg("g_value"), py::arg("workers"), py::arg("rounds"),
      py::arg("seed") = 0);

  py::class_<WelfordAccumulator>(m, "WelfordAccumulator")
      .def(py::init<std::size_t>(), py::arg("dim"))
      .def("update", [](WelfordAccumulator& a, const Vector& v) { a.update(v); })
      .def("merge", &WelfordAccumulator::merge)
      .def("finalize",
           [](const WelfordAccumulator& a) {
             auto mo = a.finalize();
             return py::make_tuple(mo.mean, mo.variance);
           })
      .def_property_readonly("count", &WelfordAccumulator::count);

  auto th = m.def_submodule("theory", "Closed-form probability and convergence bounds");
  th.attr("SNR_THRESHOLD") = theory::kSnrThreshold;
  th.def("markov_sign_bound", &theory::markov_sign_bound);
  th.def("cantelli_sign_bound", &theory::cantelli_sign_bound);
  th.def("gauss_sign_bound", &theory::gauss_sign_bound);
  th.def("vote_error_bound", &theory::vote_error_bound);
  th.def("mixed_norm", [](const Vector& g, const Vector& s) { return theory::mixed_norm(g, s); });
  th.def("sgd_rhs", &theory::sgd_rhs);
  auto inputs = [](const Vector& l, const Vector& s, double f0, double f_star,
                   std::uint64_t n) {
    theory::BoundInputs in;
    in.lipschitz = l;
    in.sigma = s;
    in.f0 = f0;
    in.f_star = f_star;
    in.oracle_calls = n;
    return in;
  };
  th.def(
      "thm1_rhs",
      [inputs](const Vector& l, const Vector& s, double f0, double f_star,
               std::uint64_t n) { return theory::thm1_rhs(inputs(l, s, f0, f_star, n)); },
      py::arg("lipschitz"), py::arg("sigma"), py::arg("f0"), py::arg("f_star"),
      py::arg("oracle_calls"));
  th.def(
      "thm2b_rhs",
      [inputs](const Vector& l, const Vector& s, double f0, double f_star, std::uint64_t n,
               std::uint64_t workers) {
        auto in = inputs(l, s, f0, f_star, n);
        in.workers = workers;
        return theory::thm2b_rhs(in);
      },
      py::arg("lipschitz"), py::arg("sigma"), py::arg("f0"), py::arg("f_star"),
      py::arg("oracle_calls"), py::arg("workers"));
  th.def(
      "smallbatch_rhs",
      [inputs](const Vector& l, double f0, double f_star, std::uint64_t n) {
        return theory::smallbatch_rhs(inputs(l, Vector(l.size(), 0.0), f0, f_star, n));
      },
      py::arg("lipschitz"), py::arg("f0"), py::arg("f_star"), py::arg("oracle_calls"));

  m.def(
      "run_config",
      [](const std::string& text, unsigned threads) {
        py::list out;
        for (const auto& t : cli::run_experiment(cli::parse_config(text), threads)) {
          out.append(trajectory_dict(t));
        }
        return out;
      },
      py::arg("config_text"), py::arg("threads") = 1,
      "Runs every seed of a key = value experiment description.");
  m.def(
      "evaluate_bound",
      [](const std::string& text) {
        const auto r = cli::evaluate_bound(cli::parse_config(text));
        py::dict d;
        d["theorem"] = r.theorem;
        d["lhs"] = r.lhs;
        d["rhs"] = r.rhs;
        d["oracle_calls"] = r.oracle_calls;
        d["passed"] = r.pass;
        return d;
      },
      py::arg("config_text"));
  m.def(
      "commcost",
      [](std::size_t workers, std::size_t dim, std::uint64_t iterations) {
        const auto r = cli::commcost(workers, dim, iterations);
        py::dict table;
        for (const auto& row : r.rows) table[py::str(row.scheme)] = row.bits_per_iter;
        py::dict d;
        d["bits_per_iter"] = table;
        d["measured_per_iter"] = r.measured_per_iter;
        d["passed"] = r.pass;
        return d;
      },
      py::arg("workers"), py::arg("dim"), py::arg("iterations") = 1);
  m.def(
      "reproduce_sparse_noise",
      [](std::vector<std::uint64_t> seeds, std::uint64_t steps) {
        cli::SparseNoiseOptions opts;
        opts.seeds = std::move(seeds);
        opts.steps = steps;
        const auto r = cli::reproduce_sparse_noise(opts);
        py::dict d;
        d["signsgd"] = aggregate_dict(r.signsgd);
        d["sgd"] = aggregate_dict(r.sgd);
        d["signsgd_final"] = r.signsgd_final;
        d["sgd_final"] = r.sgd_final;
        d["passed"] = r.pass;
        return d;
      },
      py::arg("seeds") = std::vector<std::uint64_t>{}, py::arg("steps") = 1000);
}
