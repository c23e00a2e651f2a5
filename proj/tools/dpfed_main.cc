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

// Command-line front end: calibrate, optimal, run, sweep, gen.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dpfed/config.h"
#include "dpfed/errors.h"
#include "dpfed/federation_io.h"
#include "dpfed/harness.h"
#include "dpfed/privacy.h"
#include "dpfed/text_format.h"
#include "dpfed/theory.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAllDiverged = 3;

struct CalibrateArgs {
  double epsilon = 1.0;
  double delta = 1e-5;
  double clip = 0.1;
  double p = 1.0;
  double rounds = 1.0;
  double v = 2.0;
};

struct OptimalArgs {
  double mu = 1.0;
  double ell = 1.0;
  double psi0 = 1.0;
  double epsilon = 1.0;
  double delta = 1e-5;
  double clip = 0.1;
  double v = 2.0;
};

struct RunArgs {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out;
};

struct SweepArgs {
  std::string config;
  std::string mode;
  std::string out;
};

struct GenArgs {
  std::string spec;
  uint64_t seed = 0;
  std::string out;
};

int Calibrate(const CalibrateArgs& a) {
  dpfed::PrivacyBudget budget{a.epsilon, a.delta};
  std::cout << dpfed::FormatDouble(
                   dpfed::CalibrateSigma2(budget, a.clip, a.p, a.rounds, a.v))
            << '\n';
  return kExitOk;
}

int Optimal(const OptimalArgs& a) {
  dpfed::PrivacyBudget budget{a.epsilon, a.delta};
  const dpfed::OptimalParams o = dpfed::ComputeOptimalParams(
      a.mu, a.ell, a.psi0, budget, a.clip, a.v);
  std::cout << "eta_star " << dpfed::FormatDouble(o.eta_star) << '\n'
            << "p_star " << dpfed::FormatDouble(o.p_star) << '\n'
            << "t_star " << dpfed::FormatDouble(o.t_star) << '\n'
            << "t_star_int " << o.t_star_int << '\n'
            << "expected_local_steps "
            << dpfed::FormatDouble(o.expected_local_steps) << '\n'
            << "expected_comm_rounds "
            << dpfed::FormatDouble(o.expected_comm_rounds) << '\n';
  if (o.clamped) std::cout << "clamped 1\n";
  return kExitOk;
}

int RunCommand(const RunArgs& a) {
  dpfed::ExperimentConfig config = dpfed::LoadExperimentConfig(a.config);
  if (a.seed) config.seeds = {*a.seed};
  const dpfed::Federation federation =
      dpfed::BuildFederation(config.federation);
  if (a.out.empty()) {
    dpfed::RunExperiment(config, federation, std::cout);
  } else {
    dpfed::RunExperiment(config, federation, a.out);
  }
  return kExitOk;
}

int SweepCommand(const SweepArgs& a) {
  dpfed::ExperimentConfig config = dpfed::LoadExperimentConfig(a.config);
  if (!config.sweep) throw dpfed::ConfigError("config has no [sweep] section");
  dpfed::SweepSpec spec = *config.sweep;
  spec.mode = dpfed::ParseSweepMode(a.mode);
  try {
    spec.Validate();
  } catch (const dpfed::InvalidArgument& e) {
    throw dpfed::ConfigError(std::string("[sweep] ") + e.what());
  }
  const dpfed::Federation federation =
      dpfed::BuildFederation(config.federation);
  const dpfed::SweepResult result =
      dpfed::RunSweep(config, federation, spec);
  if (a.out.empty()) {
    dpfed::WriteSweepCsv(std::cout, result);
    std::cout << '\n';
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw dpfed::IoError("cannot write '" + a.out + "'");
    dpfed::WriteSweepCsv(out, result);
    if (!out.flush()) throw dpfed::IoError("write to '" + a.out + "' failed");
  }
  std::cout << dpfed::EmitSummary(result);
  if (result.AnyCellAllFailed()) {
    std::cerr << "error: every replication of some cell diverged\n";
    return kExitAllDiverged;
  }
  return kExitOk;
}

int Gen(const GenArgs& a) {
  const dpfed::HeterogeneitySpec spec = dpfed::LoadHeterogeneitySpec(a.spec);
  dpfed::SaveFederation(dpfed::GenerateFederation(spec, a.seed), a.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private federated optimization simulator"};
  app.require_subcommand(1);

  CalibrateArgs calibrate;
  auto* cal = app.add_subcommand("calibrate", "Print the noise variance");
  cal->add_option("--epsilon", calibrate.epsilon)->required();
  cal->add_option("--delta", calibrate.delta)->required();
  cal->add_option("--clip", calibrate.clip)->required();
  cal->add_option("--p", calibrate.p)->required();
  cal->add_option("--rounds", calibrate.rounds)->required();
  cal->add_option("--v", calibrate.v);

  OptimalArgs optimal;
  auto* opt = app.add_subcommand("optimal", "Print the optimal parameters");
  opt->add_option("--mu", optimal.mu)->required();
  opt->add_option("--L", optimal.ell)->required();
  opt->add_option("--psi0", optimal.psi0)->required();
  opt->add_option("--epsilon", optimal.epsilon)->required();
  opt->add_option("--delta", optimal.delta)->required();
  opt->add_option("--clip", optimal.clip)->required();
  opt->add_option("--v", optimal.v);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Write the per-round CSV");
  run_cmd->add_option("--config", run.config)->required();
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_option("--out", run.out);

  SweepArgs sweep;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Run a sweep and print its summary");
  sweep_cmd->add_option("--config", sweep.config)->required();
  sweep_cmd->add_option("--mode", sweep.mode)
      ->required()
      ->check(CLI::IsMember({"local-steps", "comm-rounds", "epsilon"}));
  sweep_cmd->add_option("--out", sweep.out);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a federation file");
  gen_cmd->add_option("--spec", gen.spec)->required();
  gen_cmd->add_option("--seed", gen.seed)->required();
  gen_cmd->add_option("--out", gen.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*cal) return Calibrate(calibrate);
    if (*opt) return Optimal(optimal);
    if (*run_cmd) return RunCommand(run);
    if (*sweep_cmd) return SweepCommand(sweep);
    if (*gen_cmd) return Gen(gen);
  } catch (const dpfed::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const dpfed::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
