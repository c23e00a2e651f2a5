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

#ifndef DPFED_ALGORITHMS_H_
#define DPFED_ALGORITHMS_H_

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "dpfed/privacy.h"
#include "dpfed/problems.h"

namespace dpfed {

enum class Algorithm { kFedAvg, kScaffNew };

const char* AlgorithmName(Algorithm algorithm);

// DP-FedAvg: tau local steps per round, clip + noise on the round's delta.
struct FedAvgConfig {
  double eta = 0.01;
  int tau = 1;
  int64_t rounds = 1;
  MechanismParams mechanism;
  PrivacyBudget budget;
  // Mini-batch size for the local steps; unset means exact gradients.
  std::optional<int> batch_size;

  void Validate() const;
};

// DP-ScaffNew: one local step per iteration, communication with
// probability p, control variates h_i correcting client drift.
struct ScaffNewConfig {
  double eta = 0.01;
  double p = 1.0;
  int64_t iterations = 1;
  MechanismParams mechanism;
  PrivacyBudget budget;
  // h_0^(i); empty means all zero. Must sum to zero.
  std::vector<Vector> initial_controls;

  void Validate(int num_clients, int dimension) const;
};

using AlgorithmConfig = std::variant<FedAvgConfig, ScaffNewConfig>;

Algorithm AlgorithmOf(const AlgorithmConfig& config);
// Expected number of communication rounds: T for FedAvg, p T for ScaffNew.
double ExpectedCommRounds(const AlgorithmConfig& config);
// Sets mechanism.sigma2 from the budget for this configuration's expected
// communication rounds.
void CalibrateNoise(AlgorithmConfig& config);

struct RunState {
  // Model of the last communication round.
  Vector global_x;
  std::vector<Vector> client_x;
  // Control variates; all zero (and unused) for FedAvg.
  std::vector<Vector> client_h;
  int64_t round = 0;
  int64_t comm_rounds = 0;
  uint64_t seed = 0;

  // x_0 for every client; zero when `x0` is unset.
  static RunState Initial(const Federation& federation, uint64_t seed,
                          const std::optional<Vector>& x0 = std::nullopt,
                          const std::vector<Vector>& controls = {});
};

enum class RoundStatus { kOk, kDiverged };

const char* RoundStatusName(RoundStatus status);

// Metrics of the state after one iteration. psi and dist_opt are NaN when the
// federation has no known optimum.
struct RoundRecord {
  int64_t round = 0;
  bool communicated = false;
  double psi = 0.0;
  double global_loss = 0.0;
  double dist_opt = 0.0;
  // max_i |update before clipping|; 0 on iterations without communication.
  double max_update_norm = 0.0;
  int clip_count = 0;
  double sigma2_used = 0.0;
  RoundStatus status = RoundStatus::kOk;
};

struct EngineOptions {
  // Worker threads for the per-client computations. Output is bitwise
  // identical for every value.
  int workers = 1;
};

// Iterates whose norm exceeds this are treated as divergence.
inline constexpr double kDivergenceNorm = 1e12;

// One DP-FedAvg round. Randomness comes from streams keyed by
// (state.seed, client, state.round).
RoundRecord FedAvgRound(RunState& state, const Federation& federation,
                        const FedAvgConfig& config,
                        const EngineOptions& options = {});

// One DP-ScaffNew iteration with the shared coin supplied by the caller.
RoundRecord ScaffNewStep(RunState& state, const Federation& federation,
                         const ScaffNewConfig& config, bool coin,
                         const EngineOptions& options = {});

// The coin of iteration `round`, drawn from the run's coin stream.
bool DrawCoin(uint64_t seed, int64_t round, double p);

struct RunOptions {
  int workers = 1;
  std::optional<Vector> x0;
};

struct RunResult {
  std::vector<RoundRecord> records;
  RunState final_state;
  bool diverged = false;
};

// Runs exactly T iterations (or stops at the first diverged one) with the
// mechanism's sigma2 as given. Deterministic in `seed`.
RunResult Run(const Federation& federation, const AlgorithmConfig& config,
              uint64_t seed, const RunOptions& options = {});

// psi for a FedAvg state: N |x - x*|^2 + (eta tau)^2 |h*|^2, i.e. the
// stacked potential with h = 0 and p read as 1/tau. A monitoring convention.
double FedAvgPotential(const Federation& federation, const Vector& global_x,
                       double eta, int tau);

// Attaches x* to a federation without a closed form by running noiseless
// DP-ScaffNew (p = 1, eta = 1/L, no clipping) until |grad f| <= tolerance.
// Throws InternalError when max_rounds is reached first.
void SolveNumericOptimum(Federation& federation, double tolerance = 1e-10,
                         int64_t max_rounds = 100000);

}  // namespace dpfed

#endif  // DPFED_ALGORITHMS_H_
