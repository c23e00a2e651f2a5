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

#ifndef DPFED_HARNESS_H_
#define DPFED_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dpfed/algorithms.h"
#include "dpfed/config.h"
#include "dpfed/problems.h"

namespace dpfed {

inline constexpr char kRunCsvHeader[] =
    "seed,algorithm,round,communicated,tau_or_p,eta,epsilon,delta,clip,"
    "sigma2,psi,global_loss,dist_opt,max_update_norm,clip_count,status";
inline constexpr char kSweepCsvHeader[] =
    "mode,cell_value,epsilon,replication,final_psi,final_loss,final_dist,"
    "comm_rounds_realized,status";

// One parsed line of a per-round CSV.
struct RunRow {
  uint64_t seed = 0;
  std::string algorithm;
  int64_t round = 0;
  bool communicated = false;
  double tau_or_p = 0.0;
  double eta = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double clip = 0.0;
  double sigma2 = 0.0;
  double psi = 0.0;
  double global_loss = 0.0;
  double dist_opt = 0.0;
  double max_update_norm = 0.0;
  int clip_count = 0;
  std::string status;
};

// Appends one row per record (no header).
void WriteRunRows(std::ostream& out, uint64_t seed,
                  const AlgorithmConfig& config, const RunResult& result);
// Throws IoError on a wrong header or malformed line.
std::vector<RunRow> ReadRunCsv(std::istream& in);

struct ExperimentSummary {
  int64_t rows = 0;
  int diverged_seeds = 0;
};

// Runs every seed of `config` on `federation` and writes the per-round CSV
// (header included). A diverged seed ends with a "diverged" row and the next
// seed starts.
ExperimentSummary RunExperiment(const ExperimentConfig& config,
                                const Federation& federation,
                                std::ostream& out);
// As above, to `path`. Throws IoError when the file cannot be written.
ExperimentSummary RunExperiment(const ExperimentConfig& config,
                                const Federation& federation,
                                const std::string& path);

// Final metrics of one replication of one cell.
struct SweepReplication {
  double cell_value = 0.0;
  double epsilon = 0.0;
  int replication = 0;
  double final_psi = 0.0;
  double final_loss = 0.0;
  double final_dist = 0.0;
  int64_t comm_rounds_realized = 0;
  RoundStatus status = RoundStatus::kOk;
};

struct SweepCell {
  double mean = 0.0;
  // Sample standard deviation; 0 with fewer than two completed runs.
  double std = 0.0;
  int completed = 0;
  int failed = 0;
};

struct SweepResult {
  SweepMode mode = SweepMode::kLocalSteps;
  SweepMetric metric = SweepMetric::kPsi;
  // Column values and row epsilons.
  std::vector<double> values;
  std::vector<double> epsilons;
  // Row-major, epsilons.size() x values.size().
  std::vector<SweepCell> cells;
  // Column of each row's smallest mean (smallest column on ties); -1 when no
  // replication of the row completed.
  std::vector<int> argmin;
  std::vector<SweepReplication> replications;

  const SweepCell& cell(size_t row, size_t col) const {
    return cells[row * values.size() + col];
  }
  // True when some cell had no completed replication.
  bool AnyCellAllFailed() const;
};

// The run configuration of one cell: the base algorithm with the swept
// parameter applied and sigma2 recalibrated for the cell's round count.
// `base` must already be resolved (see ResolveAlgorithm).
AlgorithmConfig SweepCellConfig(const AlgorithmConfig& base,
                                const SweepSpec& spec, double value,
                                double epsilon, bool recalibrate = true);

// Seed of one replication, a hash of the master seed and cell coordinates.
uint64_t SweepCellSeed(uint64_t master_seed, double value, double epsilon,
                       int replication);

// Runs the whole grid with config.seeds[0] as master seed. Cells and
// replications run on config.workers threads; results do not depend on the
// worker count.
SweepResult RunSweep(const ExperimentConfig& config,
                     const Federation& federation, const SweepSpec& spec);

// Fills cells and argmin from replications, values and epsilons.
void AggregateSweep(SweepResult& result);
// Recomputes argmin from cells.
void ComputeArgmin(SweepResult& result);

void WriteSweepCsv(std::ostream& out, const SweepResult& result);

// Rows = epsilons, columns = values, "mean ± std" cells; each row's argmin
// is marked with '*'.
std::string EmitSummary(const SweepResult& result);

}  // namespace dpfed

#endif  // DPFED_HARNESS_H_
