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

#ifndef DPFED_CONFIG_H_
#define DPFED_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dpfed/algorithms.h"
#include "dpfed/problems.h"

namespace dpfed {

enum class SweepMode { kLocalSteps, kCommRounds, kEpsilon };
enum class SweepMetric { kPsi, kLoss, kDist };

const char* SweepModeName(SweepMode mode);
const char* SweepMetricName(SweepMetric metric);
// Accepts both "local_steps" and "local-steps" spellings.
SweepMode ParseSweepMode(const std::string& text);

struct SweepSpec {
  SweepMode mode = SweepMode::kLocalSteps;
  // Total local gradient steps per client (R).
  int64_t budget = 500;
  // tau values (local_steps), round counts (comm_rounds) or epsilons
  // (epsilon mode). Strictly increasing.
  std::vector<double> values;
  // One table row per epsilon. Ignored in epsilon mode.
  std::vector<double> epsilons;
  int replications = 1;
  // Fixed tau for comm_rounds mode.
  int local_steps = 1;
  SweepMetric metric = SweepMetric::kPsi;

  // Throws InvalidArgument: empty or non-increasing values, tau not dividing
  // R, replications < 1, non-positive epsilons.
  void Validate() const;
};

struct FederationSource {
  // Generated when set, otherwise loaded from `path`.
  std::optional<HeterogeneitySpec> generate;
  uint64_t seed = 0;
  std::string path;
};

struct ExperimentConfig {
  FederationSource federation;
  Algorithm algorithm = Algorithm::kFedAvg;
  FedAvgConfig fedavg;
  ScaffNewConfig scaffnew;
  // "auto" step size 1/L and probability sqrt(mu/L), resolved once the
  // federation is known.
  bool eta_auto = false;
  bool p_auto = false;
  // Replaces the calibrated noise variance when set.
  std::optional<double> sigma2_override;
  std::vector<uint64_t> seeds = {0};
  int workers = 1;
  std::optional<SweepSpec> sweep;
  std::string output_path;
};

// INI-style text with sections [federation], [algorithm], [privacy],
// [sweep]. Unknown sections or keys, missing required keys, and malformed
// values throw ConfigError. Relative federation paths are resolved against
// `base_dir`.
ExperimentConfig ParseExperimentConfig(std::istream& in,
                                       const std::string& base_dir = "");
ExperimentConfig LoadExperimentConfig(const std::string& path);

// Only the [federation] section is read; other sections are rejected.
HeterogeneitySpec LoadHeterogeneitySpec(const std::string& path);

// Generates or loads the federation and attaches a numeric optimum when no
// closed form exists.
Federation BuildFederation(const FederationSource& source);

// The algorithm configuration with "auto" parameters resolved and sigma2
// calibrated (or overridden, with a warning when epsilon is finite).
AlgorithmConfig ResolveAlgorithm(const ExperimentConfig& config,
                                 const Federation& federation);

}  // namespace dpfed

#endif  // DPFED_CONFIG_H_
