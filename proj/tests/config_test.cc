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

#include "dpfed/config.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "dpfed/errors.h"
#include "dpfed/federation_io.h"
#include "dpfed/log.h"

namespace dpfed {
namespace {

const char kBase[] = R"(
[federation]
source = generate
kind = quadratic
clients = 3
dimension = 4
condition_number = 10
zeta = 1
seed = 5

[algorithm]
name = fedavg
eta = 0.01
tau = 5
rounds = 10
seeds = 0, 1, 2

[privacy]
epsilon = 1
delta = 1e-5
clip = 0.1
)";

ExperimentConfig Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseExperimentConfig(in);
}

TEST(ConfigTest, ParsesFedAvg) {
  const ExperimentConfig c = Parse(kBase);
  ASSERT_TRUE(c.federation.generate.has_value());
  EXPECT_EQ(c.federation.generate->dimension, 4);
  EXPECT_EQ(c.federation.seed, 5u);
  EXPECT_EQ(c.algorithm, Algorithm::kFedAvg);
  EXPECT_EQ(c.fedavg.tau, 5);
  EXPECT_EQ(c.fedavg.rounds, 10);
  EXPECT_EQ(c.fedavg.mechanism.clip_threshold, 0.1);
  EXPECT_EQ(c.fedavg.mechanism.v, 2.0);
  EXPECT_EQ(c.seeds, (std::vector<uint64_t>{0, 1, 2}));
  EXPECT_FALSE(c.sweep.has_value());
  EXPECT_FALSE(c.fedavg.batch_size.has_value());
}

TEST(ConfigTest, ParsesScaffNewWithAutoParameters) {
  const ExperimentConfig c = Parse(R"(
[federation]
dimension = 3
condition_number = 100
[algorithm]
name = scaffnew
eta = auto
p = auto
iterations = 40
[privacy]
epsilon = inf
clip = inf
; full-line comment
# another one
)");
  EXPECT_EQ(c.algorithm, Algorithm::kScaffNew);
  EXPECT_TRUE(c.eta_auto);
  EXPECT_TRUE(c.p_auto);
  EXPECT_TRUE(std::isinf(c.scaffnew.budget.epsilon));
  const Federation fed = BuildFederation(c.federation);
  const AlgorithmConfig resolved = ResolveAlgorithm(c, fed);
  const auto& s = std::get<ScaffNewConfig>(resolved);
  EXPECT_DOUBLE_EQ(s.eta, 1 / fed.ell());
  EXPECT_DOUBLE_EQ(s.p, std::sqrt(fed.mu() / fed.ell()));
  EXPECT_EQ(s.mechanism.sigma2, 0.0);
}

TEST(ConfigTest, ParsesSweep) {
  const ExperimentConfig c = Parse(std::string(kBase) + R"(
[sweep]
mode = local-steps
budget = 500
values = 1, 2, 5, 10, 25, 50, 100, 250, 500
epsilons = 0.3, 0.5, 1, 1.7
replications = 20
metric = dist
)");
  ASSERT_TRUE(c.sweep.has_value());
  EXPECT_EQ(c.sweep->mode, SweepMode::kLocalSteps);
  EXPECT_EQ(c.sweep->values.size(), 9u);
  EXPECT_EQ(c.sweep->epsilons.size(), 4u);
  EXPECT_EQ(c.sweep->metric, SweepMetric::kDist);
}

TEST(ConfigTest, ResolveCalibratesNoise) {
  const ExperimentConfig c = Parse(kBase);
  const Federation fed = BuildFederation(c.federation);
  const auto& f = std::get<FedAvgConfig>(ResolveAlgorithm(c, fed));
  EXPECT_EQ(f.mechanism.sigma2,
            CalibrateSigma2({1.0, 1e-5}, 0.1, 1.0, 10, 2.0));
}

TEST(ConfigTest, OverrideWarnsWithFiniteEpsilon) {
  std::string text = kBase;
  text += "sigma2 = 0\n";
  const ExperimentConfig c = Parse(text);
  ASSERT_TRUE(c.sigma2_override.has_value());
  std::vector<std::string> warnings;
  const WarningSink previous = SetWarningSink(
      [&](const std::string& m) { warnings.push_back(m); });
  const Federation fed = BuildFederation(c.federation);
  const auto& f = std::get<FedAvgConfig>(ResolveAlgorithm(c, fed));
  SetWarningSink(previous);
  EXPECT_EQ(f.mechanism.sigma2, 0.0);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(ConfigTest, RejectsUnknownKeysAndSections) {
  EXPECT_THROW(Parse(std::string(kBase) + "colour = red\n"), ConfigError);
  EXPECT_THROW(Parse(std::string(kBase) + "[extra]\nx = 1\n"), ConfigError);
  EXPECT_THROW(Parse("top = 1\n" + std::string(kBase)), ConfigError);
}

TEST(ConfigTest, RejectsMissingOrMalformedValues) {
  std::string text = kBase;
  EXPECT_THROW(Parse(text.substr(0, text.find("[privacy]"))), ConfigError);
  std::string bad = text;
  bad.replace(bad.find("tau = 5"), 7, "tau = five");
  EXPECT_THROW(Parse(bad), ConfigError);
  bad = text;
  bad.replace(bad.find("rounds = 10"), 11, "rounds = 0");
  EXPECT_THROW(Parse(bad), ConfigError);
  bad = text;
  bad.replace(bad.find("name = fedavg"), 13, "name = sgd");
  EXPECT_THROW(Parse(bad), ConfigError);
  bad = text;
  bad.replace(bad.find("epsilon = 1"), 11, "epsilon = -1");
  EXPECT_THROW(Parse(bad), ConfigError);
  EXPECT_THROW(Parse(text + "delta = 1e-6\n"), ConfigError);
}

TEST(ConfigTest, RejectsSweepWithNonDividingTau) {
  EXPECT_THROW(Parse(std::string(kBase) +
                     "[sweep]\nmode = local_steps\nbudget = 500\nvalues = 3\n"),
               ConfigError);
  EXPECT_THROW(Parse(std::string(kBase) +
                     "[sweep]\nmode = local_steps\nbudget = 500\n"
                     "values = 5, 2\n"),
               ConfigError);
}

TEST(ConfigTest, FederationFromFile) {
  const auto dir = std::filesystem::temp_directory_path() / "dpfed_cfg_test";
  std::filesystem::create_directories(dir);
  HeterogeneitySpec spec;
  const Federation fed = GenerateFederation(spec, 1);
  SaveFederation(fed, (dir / "fed.txt").string());
  std::string text = kBase;
  const auto begin = text.find("source = generate");
  const auto end = text.find("[algorithm]");
  text.replace(begin, end - begin, "source = file\npath = fed.txt\n\n");
  {
    std::ofstream out(dir / "exp.ini");
    out << text;
  }
  const ExperimentConfig c = LoadExperimentConfig((dir / "exp.ini").string());
  EXPECT_FALSE(c.federation.generate.has_value());
  const Federation back = BuildFederation(c.federation);
  EXPECT_EQ(back.optimum(), fed.optimum());

  text.replace(text.find("fed.txt"), 7, "missing.txt");
  std::istringstream in(text);
  EXPECT_THROW(ParseExperimentConfig(in, dir.string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(ConfigTest, HeterogeneitySpecFile) {
  const auto path =
      std::filesystem::temp_directory_path() / "dpfed_spec_test.ini";
  {
    std::ofstream out(path);
    out << "[federation]\nclients = 4\ndimension = 6\nzeta = 2\n";
  }
  const HeterogeneitySpec spec = LoadHeterogeneitySpec(path.string());
  EXPECT_EQ(spec.clients, 4);
  EXPECT_EQ(spec.dimension, 6);
  EXPECT_EQ(spec.zeta, 2.0);
  {
    std::ofstream out(path);
    out << "[federation]\nclients = 4\n[algorithm]\nname = fedavg\n";
  }
  EXPECT_THROW(LoadHeterogeneitySpec(path.string()), ConfigError);
  std::filesystem::remove(path);
  EXPECT_THROW(LoadHeterogeneitySpec(path.string()), ConfigError);
}

TEST(ConfigTest, SweepModeNames) {
  EXPECT_EQ(ParseSweepMode("comm-rounds"), SweepMode::kCommRounds);
  EXPECT_EQ(ParseSweepMode("comm_rounds"), SweepMode::kCommRounds);
  EXPECT_EQ(ParseSweepMode("epsilon"), SweepMode::kEpsilon);
  EXPECT_THROW(ParseSweepMode("x"), InvalidArgument);
}

}  // namespace
}  // namespace dpfed
