/*
 * Copyright 2026 The dpfed Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
// Python bindings: calibration, theory, federations, runs and sweeps.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "dpfed/algorithms.h"
#include "dpfed/config.h"
#include "dpfed/errors.h"
#include "dpfed/federation_io.h"
#include "dpfed/harness.h"
#include "dpfed/privacy.h"
#include "dpfed/problems.h"
#include "dpfed/theory.h"

namespace py = pybind11;

namespace {

dpfed::BoundInputs MakeBoundInputs(double mu, double ell, double eta,
                                   double p, double rounds, double psi0,
                                   double epsilon, double delta, double clip,
                                   double v) {
  dpfed::BoundInputs in;
  in.mu = mu;
  in.ell = ell;
  in.eta = eta;
  in.p = p;
  in.rounds = rounds;
  in.psi0 = psi0;
  in.budget = {epsilon, delta};
  in.clip = clip;
  in.v = v;
  return in;
}

py::dict RecordsToDict(const dpfed::RunResult& result) {
  py::list communicated, psi, loss, dist, max_norm, clips, sigma2, status;
  for (const dpfed::RoundRecord& r : result.records) {
    communicated.append(r.communicated);
    psi.append(r.psi);
    loss.append(r.global_loss);
    dist.append(r.dist_opt);
    max_norm.append(r.max_update_norm);
    clips.append(r.clip_count);
    sigma2.append(r.sigma2_used);
    status.append(dpfed::RoundStatusName(r.status));
  }
  py::dict d;
  d["communicated"] = communicated;
  d["psi"] = psi;
  d["global_loss"] = loss;
  d["dist_opt"] = dist;
  d["max_update_norm"] = max_norm;
  d["clip_count"] = clips;
  d["sigma2"] = sigma2;
  d["status"] = status;
  d["diverged"] = result.diverged;
  d["final_x"] = result.final_state.global_x;
  return d;
}

dpfed::ExperimentConfig LoadConfig(const std::string& path,
                                   std::optional<uint64_t> seed) {
  dpfed::ExperimentConfig config = dpfed::LoadExperimentConfig(path);
  if (seed) config.seeds = {*seed};
  return config;
}

}  // namespace

PYBIND11_MODULE(_dpfed, m) {
  m.doc() = "Differentially private federated optimization simulator";

  py::register_exception<dpfed::ConfigError>(m, "ConfigError",
                                             PyExc_ValueError);
  py::register_exception<dpfed::IoError>(m, "IoError", PyExc_OSError);
  py::register_exception<dpfed::Unsupported>(m, "Unsupported",
                                             PyExc_NotImplementedError);
  py::register_exception<dpfed::InternalError>(m, "InternalError",
                                               PyExc_RuntimeError);

  m.def(
      "calibrate_sigma2",
      [](double epsilon, double delta, double clip, double p, double rounds,
         double v) {
        return dpfed::CalibrateSigma2({epsilon, delta}, clip, p, rounds, v);
      },
      py::arg("epsilon"), py::arg("delta"), py::arg("clip"),
      py::arg("p") = 1.0, py::arg("rounds") = 1.0, py::arg("v") = 2.0);

  m.def(
      "utility_bound",
      [](double mu, double ell, double eta, double p, double rounds,
         double psi0, double epsilon, double delta, double clip, double v) {
        return dpfed::UtilityBound(MakeBoundInputs(
            mu, ell, eta, p, rounds, psi0, epsilon, delta, clip, v));
      },
      py::arg("mu"), py::arg("L"), py::arg("eta"), py::arg("p"),
      py::arg("rounds"), py::arg("psi0"), py::arg("epsilon"),
      py::arg("delta"), py::arg("clip"), py::arg("v") = 2.0);

  m.def(
      "optimal_params",
      [](double mu, double ell, double psi0, double epsilon, double delta,
         double clip, double v) {
        const dpfed::OptimalParams o = dpfed::ComputeOptimalParams(
            mu, ell, psi0, {epsilon, delta}, clip, v);
        py::dict d;
        d["eta_star"] = o.eta_star;
        d["p_star"] = o.p_star;
        d["t_star"] = o.t_star;
        d["clamped"] = o.clamped;
        d["expected_local_steps"] = o.expected_local_steps;
        d["expected_comm_rounds"] = o.expected_comm_rounds;
        return d;
      },
      py::arg("mu"), py::arg("L"), py::arg("psi0"), py::arg("epsilon"),
      py::arg("delta"), py::arg("clip"), py::arg("v") = 2.0);

  py::class_<dpfed::Federation>(m, "Federation")
      .def_property_readonly("num_clients", &dpfed::Federation::num_clients)
      .def_property_readonly("dimension", &dpfed::Federation::dimension)
      .def_property_readonly("mu", &dpfed::Federation::mu)
      .def_property_readonly("L", &dpfed::Federation::ell)
      .def_property_readonly("optimum", &dpfed::Federation::optimum)
      .def("global_loss", &dpfed::Federation::GlobalLoss, py::arg("x"))
      .def("save", [](const dpfed::Federation& f, const std::string& path) {
        dpfed::SaveFederation(f, path);
      });

  m.def(
      "generate_federation",
      [](int clients, int dimension, double condition_number, double zeta,
         uint64_t seed, double mu, double center_norm,
         const std::string& kind) {
        dpfed::HeterogeneitySpec spec;
        if (kind == "quadratic") {
          spec.kind = dpfed::ObjectiveKind::kQuadratic;
        } else if (kind == "logistic") {
          spec.kind = dpfed::ObjectiveKind::kLogistic;
        } else {
          throw dpfed::InvalidArgument("unknown kind '" + kind + "'");
        }
        spec.clients = clients;
        spec.dimension = dimension;
        spec.condition_number = condition_number;
        spec.zeta = zeta;
        spec.mu = mu;
        spec.center_norm = center_norm;
        dpfed::Federation f = dpfed::GenerateFederation(spec, seed);
        if (!f.has_optimum()) dpfed::SolveNumericOptimum(f);
        return f;
      },
      py::arg("clients") = 3, py::arg("dimension") = 5,
      py::arg("condition_number") = 10.0, py::arg("zeta") = 1.0,
      py::arg("seed") = 0, py::arg("mu") = 1.0, py::arg("center_norm") = 1.0,
      py::arg("kind") = "quadratic");

  m.def(
      "load_federation",
      [](const std::string& path) {
        dpfed::Federation f = dpfed::LoadFederation(path);
        if (!f.has_optimum()) dpfed::SolveNumericOptimum(f);
        return f;
      },
      py::arg("path"));

  m.def(
      "run",
      [](const dpfed::Federation& federation, const std::string& algorithm,
         double eta, int tau, int64_t rounds, double p, int64_t iterations,
         double epsilon, double delta, double clip, double v,
         std::optional<double> sigma2, uint64_t seed, int workers) {
        dpfed::MechanismParams mech;
        mech.clip_threshold = clip;
        mech.v = v;
        dpfed::AlgorithmConfig config;
        if (algorithm == "fedavg") {
          dpfed::FedAvgConfig c;
          c.eta = eta;
          c.tau = tau;
          c.rounds = rounds;
          c.mechanism = mech;
          c.budget = {epsilon, delta};
          config = c;
        } else if (algorithm == "scaffnew") {
          dpfed::ScaffNewConfig c;
          c.eta = eta;
          c.p = p;
          c.iterations = iterations;
          c.mechanism = mech;
          c.budget = {epsilon, delta};
          config = c;
        } else {
          throw dpfed::InvalidArgument("unknown algorithm '" + algorithm +
                                       "'");
        }
        if (sigma2) {
          std::visit([&](auto& c) { c.mechanism.sigma2 = *sigma2; }, config);
        } else {
          dpfed::CalibrateNoise(config);
        }
        dpfed::RunOptions options;
        options.workers = workers;
        dpfed::RunResult result;
        {
          py::gil_scoped_release release;
          result = dpfed::Run(federation, config, seed, options);
        }
        return RecordsToDict(result);
      },
      py::arg("federation"), py::arg("algorithm") = "fedavg",
      py::arg("eta") = 0.01, py::arg("tau") = 1, py::arg("rounds") = 1,
      py::arg("p") = 1.0, py::arg("iterations") = 1,
      py::arg("epsilon") = 1.0, py::arg("delta") = 1e-5,
      py::arg("clip") = 0.1, py::arg("v") = 2.0,
      py::arg("sigma2") = py::none(), py::arg("seed") = 0,
      py::arg("workers") = 1);

  m.def(
      "run_config",
      [](const std::string& path, std::optional<uint64_t> seed) {
        const dpfed::ExperimentConfig config = LoadConfig(path, seed);
        const dpfed::Federation federation =
            dpfed::BuildFederation(config.federation);
        std::ostringstream out;
        dpfed::RunExperiment(config, federation, out);
        return out.str();
      },
      py::arg("path"), py::arg("seed") = py::none(),
      "Runs every seed of a config file and returns the per-round CSV.");

  m.def(
      "sweep",
      [](const std::string& path, std::optional<std::string> mode) {
        const dpfed::ExperimentConfig config = LoadConfig(path, std::nullopt);
        if (!config.sweep) {
          throw dpfed::ConfigError("config has no [sweep] section");
        }
        dpfed::SweepSpec spec = *config.sweep;
        if (mode) spec.mode = dpfed::ParseSweepMode(*mode);
        spec.Validate();
        const dpfed::Federation federation =
            dpfed::BuildFederation(config.federation);
        dpfed::SweepResult result;
        {
          py::gil_scoped_release release;
          result = dpfed::RunSweep(config, federation, spec);
        }
        py::list mean, std, completed;
        for (size_t r = 0; r < result.epsilons.size(); ++r) {
          py::list mrow, srow, crow;
          for (size_t c = 0; c < result.values.size(); ++c) {
            mrow.append(result.cell(r, c).mean);
            srow.append(result.cell(r, c).std);
            crow.append(result.cell(r, c).completed);
          }
          mean.append(mrow);
          std.append(srow);
          completed.append(crow);
        }
        std::ostringstream csv;
        dpfed::WriteSweepCsv(csv, result);
        py::dict d;
        d["mode"] = dpfed::SweepModeName(result.mode);
        d["values"] = result.values;
        d["epsilons"] = result.epsilons;
        d["mean"] = mean;
        d["std"] = std;
        d["completed"] = completed;
        d["argmin"] = result.argmin;
        d["csv"] = csv.str();
        d["summary"] = dpfed::EmitSummary(result);
        return d;
      },
      py::arg("path"), py::arg("mode") = py::none());
}
