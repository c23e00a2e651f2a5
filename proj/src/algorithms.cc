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

#include "dpfed/algorithms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dpfed/errors.h"
#include "dpfed/parallel.h"
#include "dpfed/rng.h"
#include "dpfed/theory.h"

namespace dpfed {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// What one client hands to the server in a communication round.
struct ClientUpload {
  // x_t + clip(u) + noise. Averaging these equals x_t + mean(delta) and
  // avoids the subtract/add round trip when nothing is clipped.
  Vector proposal;
  double update_norm = 0.0;
  bool clipped = false;
  bool finite = true;
};

bool Healthy(const Vector& x) {
  return x.allFinite() && x.norm() <= kDivergenceNorm;
}

// target = the client's model after its local work; the transmitted delta is
// target - global_x.
ClientUpload Upload(const Vector& target, const Vector& global_x,
                    const MechanismParams& mechanism, uint64_t seed,
                    int client, int64_t round) {
  ClientUpload out;
  out.finite = Healthy(target);
  const ClipResult clipped = Clip(target - global_x, mechanism.clip_threshold);
  out.update_norm = clipped.input_norm;
  out.clipped = clipped.was_clipped;
  out.proposal = clipped.was_clipped ? Vector(global_x + clipped.value) : target;
  CounterStream noise_stream(seed, StreamPurpose::kNoise,
                             static_cast<uint32_t>(client),
                             static_cast<uint32_t>(round));
  out.proposal +=
      GaussianNoise(static_cast<int>(target.size()), mechanism.sigma2,
                    noise_stream);
  return out;
}

Vector Average(const std::vector<ClientUpload>& uploads) {
  Vector sum = uploads.front().proposal;
  for (size_t i = 1; i < uploads.size(); ++i) sum += uploads[i].proposal;
  return sum / static_cast<double>(uploads.size());
}

void FillMetrics(RoundRecord& record, const Federation& federation,
                 const Vector& global_x) {
  record.global_loss = federation.GlobalLoss(global_x);
  record.dist_opt = federation.has_optimum()
                        ? (global_x - federation.optimum()).norm()
                        : kNaN;
}

void SummarizeUploads(RoundRecord& record,
                      const std::vector<ClientUpload>& uploads) {
  for (const auto& u : uploads) {
    record.max_update_norm = std::max(record.max_update_norm, u.update_norm);
    record.clip_count += u.clipped ? 1 : 0;
  }
}

std::vector<int> SampleBatch(int population, int batch_size,
                             CounterStream& stream) {
  std::vector<int> indices(population);
  std::iota(indices.begin(), indices.end(), 0);
  const int k = std::min(batch_size, population);
  for (int j = 0; j < k; ++j) {
    const int span = population - j;
    const int pick =
        j + static_cast<int>(stream.NextU64() % static_cast<uint64_t>(span));
    std::swap(indices[j], indices[pick]);
  }
  indices.resize(k);
  return indices;
}

}  // namespace

const char* AlgorithmName(Algorithm algorithm) {
  return algorithm == Algorithm::kFedAvg ? "fedavg" : "scaffnew";
}

const char* RoundStatusName(RoundStatus status) {
  return status == RoundStatus::kOk ? "ok" : "diverged";
}

void FedAvgConfig::Validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("eta must be > 0");
  if (tau < 1) throw InvalidArgument("tau must be >= 1");
  if (rounds < 1) throw InvalidArgument("rounds must be >= 1");
  if (batch_size && *batch_size < 1) {
    throw InvalidArgument("batch_size must be >= 1");
  }
  mechanism.Validate();
  budget.Validate();
}

void ScaffNewConfig::Validate(int num_clients, int dimension) const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("eta must be > 0");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in (0, 1]");
  if (iterations < 1) throw InvalidArgument("iterations must be >= 1");
  mechanism.Validate();
  budget.Validate();
  if (initial_controls.empty()) return;
  if (static_cast<int>(initial_controls.size()) != num_clients) {
    throw InvalidArgument("initial_controls needs one vector per client");
  }
  Vector sum = Vector::Zero(dimension);
  double scale = 1.0;
  for (const auto& h : initial_controls) {
    if (h.size() != dimension) {
      throw InvalidArgument("initial control has wrong dimension");
    }
    sum += h;
    scale = std::max(scale, h.cwiseAbs().maxCoeff());
  }
  if (sum.cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidArgument("initial controls must sum to zero");
  }
}

Algorithm AlgorithmOf(const AlgorithmConfig& config) {
  return std::holds_alternative<FedAvgConfig>(config) ? Algorithm::kFedAvg
                                                      : Algorithm::kScaffNew;
}

double ExpectedCommRounds(const AlgorithmConfig& config) {
  if (const auto* fedavg = std::get_if<FedAvgConfig>(&config)) {
    return static_cast<double>(fedavg->rounds);
  }
  const auto& scaffnew = std::get<ScaffNewConfig>(config);
  return scaffnew.p * static_cast<double>(scaffnew.iterations);
}

void CalibrateNoise(AlgorithmConfig& config) {
  std::visit(
      [](auto& c) {
        using T = std::decay_t<decltype(c)>;
        double p = 1.0;
        double rounds = 0.0;
        if constexpr (std::is_same_v<T, FedAvgConfig>) {
          rounds = static_cast<double>(c.rounds);
        } else {
          p = c.p;
          rounds = static_cast<double>(c.iterations);
        }
        c.mechanism.sigma2 = CalibrateSigma2(c.budget, c.mechanism.clip_threshold,
                                             p, rounds, c.mechanism.v);
      },
      config);
}

RunState RunState::Initial(const Federation& federation, uint64_t seed,
                           const std::optional<Vector>& x0,
                           const std::vector<Vector>& controls) {
  const int d = federation.dimension();
  const int n = federation.num_clients();
  RunState state;
  state.global_x = x0 ? *x0 : Vector::Zero(d);
  if (state.global_x.size() != d) {
    throw InvalidArgument("x0 has wrong dimension");
  }
  state.client_x.assign(n, state.global_x);
  state.client_h = controls.empty() ? std::vector<Vector>(n, Vector::Zero(d))
                                    : controls;
  state.seed = seed;
  return state;
}

double FedAvgPotential(const Federation& federation, const Vector& global_x,
                       double eta, int tau) {
  const double n = federation.num_clients();
  double control = 0.0;
  for (const auto& h : federation.star_controls()) control += h.squaredNorm();
  const double scaled_step = eta * static_cast<double>(tau);
  return n * (global_x - federation.optimum()).squaredNorm() +
         scaled_step * scaled_step * control;
}

RoundRecord FedAvgRound(RunState& state, const Federation& federation,
                        const FedAvgConfig& config,
                        const EngineOptions& options) {
  const int n = federation.num_clients();
  std::vector<ClientUpload> uploads(n);
  ParallelFor(n, options.workers, [&](int64_t i) {
    const ClientObjective& client = federation.client(static_cast<int>(i));
    Vector local = state.global_x;
    if (config.batch_size && client.kind() == ObjectiveKind::kLogistic) {
      CounterStream batch_stream(state.seed, StreamPurpose::kBatch,
                                 static_cast<uint32_t>(i),
                                 static_cast<uint32_t>(state.round));
      for (int j = 0; j < config.tau; ++j) {
        const auto batch =
            SampleBatch(client.num_samples(), *config.batch_size, batch_stream);
        local -= config.eta * client.MinibatchGradient(local, batch);
      }
    } else {
      for (int j = 0; j < config.tau; ++j) {
        local -= config.eta * client.Gradient(local);
      }
    }
    uploads[i] = Upload(local, state.global_x, config.mechanism, state.seed,
                        static_cast<int>(i), state.round);
  });

  RoundRecord record;
  record.round = state.round;
  record.communicated = true;
  record.sigma2_used = config.mechanism.sigma2;
  SummarizeUploads(record, uploads);

  state.global_x = Average(uploads);
  for (auto& x : state.client_x) x = state.global_x;
  ++state.round;
  ++state.comm_rounds;

  const bool healthy =
      std::all_of(uploads.begin(), uploads.end(),
                  [](const ClientUpload& u) { return u.finite; }) &&
      Healthy(state.global_x);
  if (!healthy) {
    record.status = RoundStatus::kDiverged;
    record.psi = record.global_loss = record.dist_opt = kNaN;
    return record;
  }
  FillMetrics(record, federation, state.global_x);
  record.psi = federation.has_optimum()
                   ? FedAvgPotential(federation, state.global_x, config.eta,
                                     config.tau)
                   : kNaN;
  return record;
}

RoundRecord ScaffNewStep(RunState& state, const Federation& federation,
                         const ScaffNewConfig& config, bool coin,
                         const EngineOptions& options) {
  const int n = federation.num_clients();
  const double step_ratio = config.eta / config.p;
  std::vector<Vector> local(n);
  std::vector<ClientUpload> uploads(coin ? n : 0);
  ParallelFor(n, options.workers, [&](int64_t i) {
    const ClientObjective& client = federation.client(static_cast<int>(i));
    local[i] = state.client_x[i] -
               config.eta * (client.Gradient(state.client_x[i]) -
                             state.client_h[i]);
    if (coin) {
      const Vector target = local[i] - step_ratio * state.client_h[i];
      uploads[i] = Upload(target, state.global_x, config.mechanism, state.seed,
                          static_cast<int>(i), state.round);
    }
  });

  RoundRecord record;
  record.round = state.round;
  record.communicated = coin;
  record.sigma2_used = config.mechanism.sigma2;
  bool healthy = true;
  if (coin) {
    SummarizeUploads(record, uploads);
    state.global_x = Average(uploads);
    const double inverse_ratio = config.p / config.eta;
    for (int i = 0; i < n; ++i) {
      state.client_x[i] = state.global_x;
      state.client_h[i] += inverse_ratio * (state.global_x - local[i]);
      healthy = healthy && uploads[i].finite && Healthy(state.client_h[i]);
    }
    ++state.comm_rounds;
  } else {
    // x_{t+1} = x_hat, so the control update adds zero.
    for (int i = 0; i < n; ++i) {
      state.client_x[i] = std::move(local[i]);
      healthy = healthy && Healthy(state.client_x[i]);
    }
  }
  healthy = healthy && Healthy(state.global_x);
  ++state.round;

  if (!healthy) {
    record.status = RoundStatus::kDiverged;
    record.psi = record.global_loss = record.dist_opt = kNaN;
    return record;
  }
  FillMetrics(record, federation, state.global_x);
  record.psi = federation.has_optimum()
                   ? Lyapunov(state.client_x, state.client_h,
                              federation.optimum(), federation.star_controls(),
                              config.eta, config.p)
                   : kNaN;
  return record;
}

bool DrawCoin(uint64_t seed, int64_t round, double p) {
  if (p >= 1.0) return true;
  CounterStream stream(seed, StreamPurpose::kCoin, 0,
                       static_cast<uint32_t>(round));
  return stream.NextUniform() < p;
}

RunResult Run(const Federation& federation, const AlgorithmConfig& config,
              uint64_t seed, const RunOptions& options) {
  const EngineOptions engine{.workers = options.workers};
  RunResult result;
  if (const auto* fedavg = std::get_if<FedAvgConfig>(&config)) {
    fedavg->Validate();
    result.final_state = RunState::Initial(federation, seed, options.x0);
    result.records.reserve(fedavg->rounds);
    for (int64_t t = 0; t < fedavg->rounds; ++t) {
      result.records.push_back(
          FedAvgRound(result.final_state, federation, *fedavg, engine));
      if (result.records.back().status == RoundStatus::kDiverged) {
        result.diverged = true;
        break;
      }
    }
    return result;
  }
  const auto& scaffnew = std::get<ScaffNewConfig>(config);
  scaffnew.Validate(federation.num_clients(), federation.dimension());
  result.final_state = RunState::Initial(federation, seed, options.x0,
                                         scaffnew.initial_controls);
  result.records.reserve(scaffnew.iterations);
  for (int64_t t = 0; t < scaffnew.iterations; ++t) {
    const bool coin = DrawCoin(seed, t, scaffnew.p);
    result.records.push_back(
        ScaffNewStep(result.final_state, federation, scaffnew, coin, engine));
    if (result.records.back().status == RoundStatus::kDiverged) {
      result.diverged = true;
      break;
    }
  }
  return result;
}

void SolveNumericOptimum(Federation& federation, double tolerance,
                         int64_t max_rounds) {
  ScaffNewConfig config;
  config.eta = 1.0 / federation.ell();
  config.p = 1.0;
  config.iterations = max_rounds;
  config.mechanism.clip_threshold = std::numeric_limits<double>::infinity();
  config.mechanism.sigma2 = 0.0;
  RunState state = RunState::Initial(federation, 0);
  for (int64_t t = 0; t < max_rounds; ++t) {
    if (federation.GlobalGradient(state.global_x).norm() <= tolerance) {
      federation.SetOptimum(state.global_x);
      return;
    }
    const RoundRecord record =
        ScaffNewStep(state, federation, config, /*coin=*/true);
    if (record.status == RoundStatus::kDiverged) break;
  }
  if (federation.GlobalGradient(state.global_x).norm() <= tolerance) {
    federation.SetOptimum(state.global_x);
    return;
  }
  throw InternalError("numeric optimum did not reach |grad f| <= " +
                      std::to_string(tolerance) + " within " +
                      std::to_string(max_rounds) + " rounds");
}

}  // namespace dpfed
