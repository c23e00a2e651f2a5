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

#include "dpfed/harness.h"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "dpfed/errors.h"
#include "dpfed/log.h"
#include "dpfed/parallel.h"
#include "dpfed/rng.h"
#include "dpfed/text_format.h"

namespace dpfed {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const MechanismParams& MechanismOf(const AlgorithmConfig& config) {
  return std::visit(
      [](const auto& c) -> const MechanismParams& { return c.mechanism; },
      config);
}

const PrivacyBudget& BudgetOf(const AlgorithmConfig& config) {
  return std::visit(
      [](const auto& c) -> const PrivacyBudget& { return c.budget; }, config);
}

double EtaOf(const AlgorithmConfig& config) {
  return std::visit([](const auto& c) { return c.eta; }, config);
}

double TauOrP(const AlgorithmConfig& config) {
  if (const auto* f = std::get_if<FedAvgConfig>(&config)) return f->tau;
  return std::get<ScaffNewConfig>(config).p;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream in(line);
  for (std::string field; std::getline(in, field, ',');) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string FormatCell(const SweepCell& cell) {
  if (cell.completed == 0) return "failed";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g ± %.2g", cell.mean, cell.std);
  std::string text = buf;
  if (cell.failed > 0) {
    text += " (" + std::to_string(cell.failed) + " failed)";
  }
  return text;
}

std::string FormatLabel(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", value);
  return buf;
}

const char* ColumnName(SweepMode mode) {
  switch (mode) {
    case SweepMode::kLocalSteps:
      return "local steps";
    case SweepMode::kCommRounds:
      return "rounds";
    case SweepMode::kEpsilon:
      return "local steps";
  }
  return "";
}

}  // namespace

void WriteRunRows(std::ostream& out, uint64_t seed,
                  const AlgorithmConfig& config, const RunResult& result) {
  const MechanismParams& mechanism = MechanismOf(config);
  const PrivacyBudget& budget = BudgetOf(config);
  const std::string prefix =
      std::to_string(seed) + "," + AlgorithmName(AlgorithmOf(config)) + ",";
  const std::string params =
      FormatDouble(TauOrP(config)) + "," + FormatDouble(EtaOf(config)) + "," +
      FormatDouble(budget.epsilon) + "," + FormatDouble(budget.delta) + "," +
      FormatDouble(mechanism.clip_threshold) + ",";
  for (const RoundRecord& r : result.records) {
    out << prefix << r.round << ',' << (r.communicated ? 1 : 0) << ','
        << params << FormatDouble(r.sigma2_used) << ','
        << FormatDouble(r.psi) << ',' << FormatDouble(r.global_loss) << ','
        << FormatDouble(r.dist_opt) << ',' << FormatDouble(r.max_update_norm)
        << ',' << r.clip_count << ',' << RoundStatusName(r.status) << '\n';
  }
}

std::vector<RunRow> ReadRunCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRunCsvHeader) {
    throw IoError("run CSV: unexpected header");
  }
  std::vector<RunRow> rows;
  int64_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto f = SplitCsv(line);
    if (f.size() != 16) {
      throw IoError("run CSV line " + std::to_string(line_number) +
                    ": expected 16 fields");
    }
    try {
      RunRow row;
      row.seed = static_cast<uint64_t>(ParseInteger(f[0]));
      row.algorithm = f[1];
      row.round = ParseInteger(f[2]);
      row.communicated = ParseInteger(f[3]) != 0;
      row.tau_or_p = ParseDouble(f[4]);
      row.eta = ParseDouble(f[5]);
      row.epsilon = ParseDouble(f[6]);
      row.delta = ParseDouble(f[7]);
      row.clip = ParseDouble(f[8]);
      row.sigma2 = ParseDouble(f[9]);
      row.psi = ParseDouble(f[10]);
      row.global_loss = ParseDouble(f[11]);
      row.dist_opt = ParseDouble(f[12]);
      row.max_update_norm = ParseDouble(f[13]);
      row.clip_count = static_cast<int>(ParseInteger(f[14]));
      row.status = f[15];
      rows.push_back(std::move(row));
    } catch (const InvalidArgument& e) {
      throw IoError("run CSV line " + std::to_string(line_number) + ": " +
                    e.what());
    }
  }
  return rows;
}

ExperimentSummary RunExperiment(const ExperimentConfig& config,
                                const Federation& federation,
                                std::ostream& out) {
  if (config.seeds.empty()) throw InvalidArgument("no seeds configured");
  const AlgorithmConfig resolved = ResolveAlgorithm(config, federation);
  ExperimentSummary summary;
  out << kRunCsvHeader << '\n';
  RunOptions options;
  options.workers = config.workers;
  for (uint64_t seed : config.seeds) {
    const RunResult result = Run(federation, resolved, seed, options);
    WriteRunRows(out, seed, resolved, result);
    summary.rows += static_cast<int64_t>(result.records.size());
    if (result.diverged) {
      ++summary.diverged_seeds;
      LogWarning("seed " + std::to_string(seed) + " diverged at round " +
                 std::to_string(result.records.back().round));
    }
  }
  return summary;
}

ExperimentSummary RunExperiment(const ExperimentConfig& config,
                                const Federation& federation,
                                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  const ExperimentSummary summary = RunExperiment(config, federation, out);
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
  return summary;
}

bool SweepResult::AnyCellAllFailed() const {
  for (const SweepCell& c : cells) {
    if (c.completed == 0) return true;
  }
  return false;
}

AlgorithmConfig SweepCellConfig(const AlgorithmConfig& base,
                                const SweepSpec& spec, double value,
                                double epsilon, bool recalibrate) {
  AlgorithmConfig config = base;
  std::visit([&](auto& c) { c.budget.epsilon = epsilon; }, config);
  if (auto* f = std::get_if<FedAvgConfig>(&config)) {
    if (spec.mode == SweepMode::kLocalSteps) {
      f->tau = static_cast<int>(value);
      f->rounds = spec.budget / f->tau;
    } else if (spec.mode == SweepMode::kCommRounds) {
      f->tau = spec.local_steps;
      f->rounds = static_cast<int64_t>(value);
    }
  } else {
    auto& s = std::get<ScaffNewConfig>(config);
    if (spec.mode == SweepMode::kLocalSteps) {
      s.p = 1.0 / value;
      s.iterations = spec.budget;
    } else if (spec.mode == SweepMode::kCommRounds) {
      s.p = 1.0 / spec.local_steps;
      s.iterations = static_cast<int64_t>(value) * spec.local_steps;
    }
  }
  if (recalibrate) CalibrateNoise(config);
  return config;
}

uint64_t SweepCellSeed(uint64_t master_seed, double value, double epsilon,
                       int replication) {
  return MixSeed(master_seed, std::bit_cast<uint64_t>(value),
                 std::bit_cast<uint64_t>(epsilon),
                 static_cast<uint64_t>(replication));
}

SweepResult RunSweep(const ExperimentConfig& config,
                     const Federation& federation, const SweepSpec& spec) {
  spec.Validate();
  if (config.seeds.empty()) throw InvalidArgument("no seeds configured");
  const AlgorithmConfig base = ResolveAlgorithm(config, federation);
  const bool recalibrate = !config.sigma2_override.has_value();

  SweepResult result;
  result.mode = spec.mode;
  result.metric = spec.metric;
  if (spec.mode == SweepMode::kEpsilon) {
    result.epsilons = spec.values;
    const double p_or_tau = TauOrP(base);
    result.values = {AlgorithmOf(base) == Algorithm::kFedAvg ? p_or_tau
                                                             : 1.0 / p_or_tau};
  } else {
    result.values = spec.values;
    result.epsilons = spec.epsilons;
    if (result.epsilons.empty()) {
      result.epsilons = {BudgetOf(base).epsilon};
    }
  }

  const size_t cols = result.values.size();
  const size_t reps = static_cast<size_t>(spec.replications);
  const size_t total = result.epsilons.size() * cols * reps;
  result.replications.resize(total);
  const uint64_t master = config.seeds.front();
  ParallelFor(static_cast<int64_t>(total), config.workers, [&](int64_t k) {
    const size_t rep = static_cast<size_t>(k) % reps;
    const size_t col = (static_cast<size_t>(k) / reps) % cols;
    const size_t row = static_cast<size_t>(k) / (reps * cols);
    const double epsilon = result.epsilons[row];
    const double value = spec.mode == SweepMode::kEpsilon
                             ? epsilon
                             : result.values[col];
    const AlgorithmConfig cell =
        SweepCellConfig(base, spec, value, epsilon, recalibrate);
    const uint64_t seed =
        SweepCellSeed(master, value, epsilon, static_cast<int>(rep));
    const RunResult run = Run(federation, cell, seed);

    SweepReplication& out = result.replications[k];
    out.cell_value = value;
    out.epsilon = epsilon;
    out.replication = static_cast<int>(rep);
    out.comm_rounds_realized = run.final_state.comm_rounds;
    if (run.diverged || run.records.empty()) {
      out.status = RoundStatus::kDiverged;
      out.final_psi = out.final_loss = out.final_dist = kNaN;
    } else {
      const RoundRecord& last = run.records.back();
      out.final_psi = last.psi;
      out.final_loss = last.global_loss;
      out.final_dist = last.dist_opt;
    }
  });
  AggregateSweep(result);
  return result;
}

void AggregateSweep(SweepResult& result) {
  const size_t cols = result.values.size();
  result.cells.assign(result.epsilons.size() * cols, SweepCell{});
  std::vector<double> sum(result.cells.size(), 0.0);
  std::vector<std::vector<double>> samples(result.cells.size());
  for (const SweepReplication& r : result.replications) {
    size_t row = 0;
    while (row < result.epsilons.size() && result.epsilons[row] != r.epsilon) {
      ++row;
    }
    size_t col = 0;
    if (result.mode != SweepMode::kEpsilon) {
      while (col < cols && result.values[col] != r.cell_value) ++col;
    }
    if (row == result.epsilons.size() || col == cols) {
      throw InvalidArgument("replication outside the sweep grid");
    }
    const size_t index = row * cols + col;
    if (r.status != RoundStatus::kOk) {
      ++result.cells[index].failed;
      continue;
    }
    double metric = r.final_psi;
    if (result.metric == SweepMetric::kLoss) metric = r.final_loss;
    if (result.metric == SweepMetric::kDist) metric = r.final_dist;
    samples[index].push_back(metric);
  }
  for (size_t i = 0; i < result.cells.size(); ++i) {
    SweepCell& cell = result.cells[i];
    const auto& xs = samples[i];
    cell.completed = static_cast<int>(xs.size());
    if (xs.empty()) {
      cell.mean = cell.std = kNaN;
      continue;
    }
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    cell.mean = mean;
    cell.std = xs.size() > 1 ? std::sqrt(ss / (xs.size() - 1.0)) : 0.0;
  }
  ComputeArgmin(result);
}

void ComputeArgmin(SweepResult& result) {
  const size_t cols = result.values.size();
  result.argmin.assign(result.epsilons.size(), -1);
  for (size_t row = 0; row < result.epsilons.size(); ++row) {
    int best = -1;
    for (size_t col = 0; col < cols; ++col) {
      const SweepCell& c = result.cell(row, col);
      if (c.completed == 0) continue;
      if (best < 0 || c.mean < result.cell(row, best).mean) {
        best = static_cast<int>(col);
      }
    }
    result.argmin[row] = best;
  }
}

void WriteSweepCsv(std::ostream& out, const SweepResult& result) {
  out << kSweepCsvHeader << '\n';
  for (const SweepReplication& r : result.replications) {
    out << SweepModeName(result.mode) << ',' << FormatDouble(r.cell_value)
        << ',' << FormatDouble(r.epsilon) << ',' << r.replication << ','
        << FormatDouble(r.final_psi) << ',' << FormatDouble(r.final_loss)
        << ',' << FormatDouble(r.final_dist) << ',' << r.comm_rounds_realized
        << ',' << RoundStatusName(r.status) << '\n';
  }
}

std::string EmitSummary(const SweepResult& result) {
  const size_t cols = result.values.size();
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header = {std::string("epsilon \\ ") +
                                     ColumnName(result.mode)};
  for (double v : result.values) header.push_back(FormatLabel(v));
  table.push_back(header);
  for (size_t row = 0; row < result.epsilons.size(); ++row) {
    std::vector<std::string> line = {FormatLabel(result.epsilons[row])};
    for (size_t col = 0; col < cols; ++col) {
      std::string text = FormatCell(result.cell(row, col));
      if (result.argmin.size() > row &&
          result.argmin[row] == static_cast<int>(col)) {
        text += " *";
      }
      line.push_back(text);
    }
    table.push_back(line);
  }
  // Pad by code points so the "±" sign counts as one column.
  auto width = [](const std::string& s) {
    size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
  };
  std::vector<size_t> widths(cols + 1, 0);
  for (const auto& line : table) {
    for (size_t i = 0; i < line.size(); ++i) {
      widths[i] = std::max(widths[i], width(line[i]));
    }
  }
  std::ostringstream out;
  out << "metric: final " << SweepMetricName(result.metric)
      << " (mean ± std, * marks the row minimum)\n";
  for (const auto& line : table) {
    for (size_t i = 0; i < line.size(); ++i) {
      if (i > 0) out << " | ";
      out << line[i];
      if (i + 1 < line.size()) {
        out << std::string(widths[i] - width(line[i]), ' ');
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace dpfed
