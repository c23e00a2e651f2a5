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

#include "dpfed/theory.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpfed/errors.h"

namespace dpfed {
namespace {

double LogInverseDelta(const PrivacyBudget& budget) {
  return -std::log(budget.delta);
}

// Picks floor/ceil of a real stationary point (>= 1) by evaluating the bound.
int64_t BestNeighbor(BoundInputs inputs, double t_real) {
  const double lo = std::floor(t_real);
  const double hi = std::ceil(t_real);
  if (lo == hi) return static_cast<int64_t>(lo);
  inputs.rounds = lo;
  const double b_lo = UtilityBound(inputs);
  inputs.rounds = hi;
  const double b_hi = UtilityBound(inputs);
  return static_cast<int64_t>(b_hi < b_lo ? hi : lo);
}

}  // namespace

void BoundInputs::Validate() const {
  if (!(mu > 0.0 && mu <= ell)) throw InvalidArgument("need 0 < mu <= L");
  // Slack for eta = 1.0 / ell rounding up.
  if (!(eta > 0.0 && eta * ell <= 1.0 + 1e-12)) {
    throw InvalidArgument("need 0 < eta <= 1/L");
  }
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("need 0 < p <= 1");
  if (!(psi0 >= 0.0)) throw InvalidArgument("need psi0 >= 0");
  if (!(clip > 0.0)) throw InvalidArgument("need C > 0");
  if (!(v > 0.0)) throw InvalidArgument("need v > 0");
  budget.Validate();
}

double ContractionFactor(const BoundInputs& inputs) {
  return std::max(1.0 - inputs.mu * inputs.eta, 1.0 - inputs.p * inputs.p);
}

double NoiseTermSlope(const BoundInputs& inputs) {
  if (std::isinf(inputs.budget.epsilon)) return 0.0;
  const double theta = ContractionFactor(inputs);
  const double eps2 = inputs.budget.epsilon * inputs.budget.epsilon;
  return 2.0 * inputs.p * inputs.p / (1.0 - theta) * inputs.v * inputs.clip *
         inputs.clip * LogInverseDelta(inputs.budget) / eps2;
}

double UtilityBound(const BoundInputs& inputs) {
  inputs.Validate();
  const double theta = ContractionFactor(inputs);
  if (!(theta < 1.0)) throw InvalidArgument("theta >= 1: no contraction");
  return std::pow(theta, inputs.rounds) * inputs.psi0 +
         NoiseTermSlope(inputs) * inputs.rounds;
}

double Lyapunov(std::span<const Vector> client_x,
                std::span<const Vector> client_h, const Vector& x_star,
                std::span<const Vector> h_star, double eta, double p) {
  if (client_x.size() != client_h.size() || client_x.size() != h_star.size()) {
    throw InvalidArgument("lyapunov: client counts disagree");
  }
  double distance = 0.0;
  double control = 0.0;
  for (size_t i = 0; i < client_x.size(); ++i) {
    if (client_x[i].size() != x_star.size() ||
        client_h[i].size() != h_star[i].size() ||
        h_star[i].size() != x_star.size()) {
      throw InvalidArgument("lyapunov: dimension mismatch");
    }
    distance += (client_x[i] - x_star).squaredNorm();
    control += (client_h[i] - h_star[i]).squaredNorm();
  }
  const double ratio = eta / p;
  return distance + ratio * ratio * control;
}

OptimalParams ComputeOptimalParams(double mu, double ell, double psi0,
                                   const PrivacyBudget& budget, double clip,
                                   double v) {
  BoundInputs inputs{.mu = mu,
                     .ell = ell,
                     .eta = 1.0 / ell,
                     .p = std::sqrt(mu / ell),
                     .rounds = 1.0,
                     .psi0 = psi0,
                     .budget = budget,
                     .clip = clip,
                     .v = v};
  inputs.Validate();
  if (std::isinf(budget.epsilon)) {
    throw Unsupported("no finite optimal T without privacy noise");
  }
  OptimalParams out;
  out.eta_star = inputs.eta;
  out.p_star = inputs.p;
  out.expected_local_steps = 1.0 / out.p_star;
  if (mu == ell) {
    // theta = 0: the bound is 0 * psi0 + slope * T, increasing in T.
    out.t_star = 1.0;
    out.t_star_int = 1;
    out.clamped = true;
  } else {
    const double log_inv_rate = -std::log1p(-mu / ell);
    const double eps2 = budget.epsilon * budget.epsilon;
    const double argument = psi0 * eps2 * log_inv_rate /
                            (2.0 * v * clip * clip * LogInverseDelta(budget));
    const double t_real =
        argument > 1.0 ? std::log(argument) / log_inv_rate : 0.0;
    if (t_real < 1.0) {
      out.t_star = 1.0;
      out.t_star_int = 1;
      out.clamped = true;
    } else {
      out.t_star = t_real;
      out.t_star_int = BestNeighbor(inputs, t_real);
    }
  }
  out.expected_comm_rounds = out.p_star * out.t_star;
  return out;
}

int64_t GridArgminT(const BoundInputs& inputs, int64_t t_max) {
  if (t_max < 1) throw InvalidArgument("t_max must be >= 1");
  BoundInputs probe = inputs;
  probe.rounds = 1.0;
  int64_t best_t = 1;
  double best = UtilityBound(probe);
  for (int64_t t = 2; t <= t_max; ++t) {
    probe.rounds = static_cast<double>(t);
    const double value = UtilityBound(probe);
    if (value < best) {
      best = value;
      best_t = t;
    }
  }
  return best_t;
}

RoundsOptimum MinimizeOverRounds(const BoundInputs& inputs) {
  inputs.Validate();
  const double theta = ContractionFactor(inputs);
  const double slope = NoiseTermSlope(inputs);
  if (slope == 0.0) throw Unsupported("noiseless bound has no finite optimum");
  RoundsOptimum out;
  double t_real = 0.0;
  if (theta > 0.0 && inputs.psi0 > 0.0) {
    const double log_inv_rate = -std::log(theta);
    const double argument = inputs.psi0 * log_inv_rate / slope;
    if (argument > 1.0) t_real = std::log(argument) / log_inv_rate;
  }
  BoundInputs probe = inputs;
  if (t_real < 1.0) {
    out.t_real = 1.0;
    out.t_int = 1;
  } else {
    out.t_real = t_real;
    out.t_int = BestNeighbor(inputs, t_real);
  }
  probe.rounds = static_cast<double>(out.t_int);
  out.bound = UtilityBound(probe);
  return out;
}

BoundDerivatives ComputeBoundDerivatives(const BoundInputs& inputs) {
  inputs.Validate();
  if (inputs.mu == inputs.ell) {
    throw Unsupported("bound derivatives need mu < L");
  }
  const double theta = ContractionFactor(inputs);
  if (!(theta > 0.0 && theta < 1.0)) {
    throw Unsupported("bound derivatives need 0 < theta < 1");
  }
  const double log_rate = std::log(theta);
  const double decay = std::pow(theta, inputs.rounds) * inputs.psi0;
  return {decay * log_rate + NoiseTermSlope(inputs),
          decay * log_rate * log_rate};
}

}  // namespace dpfed
