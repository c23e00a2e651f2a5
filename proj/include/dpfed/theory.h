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

#ifndef DPFED_THEORY_H_
#define DPFED_THEORY_H_

#include <cstdint>
#include <span>

#include "dpfed/privacy.h"
#include "dpfed/problems.h"

namespace dpfed {

// Inputs of the utility bound
//
//   E[psi_T] <= theta^T psi_0 + 2 p^2 / (1 - theta) * v C^2 T ln(1/delta) / eps^2,
//   theta = max(1 - mu eta, 1 - p^2).
//
// `rounds` is real-valued so the bound can be differentiated in T.
struct BoundInputs {
  double mu = 1.0;
  double ell = 1.0;
  double eta = 1.0;
  double p = 1.0;
  double rounds = 1.0;
  double psi0 = 0.0;
  PrivacyBudget budget;
  double clip = 0.1;
  double v = 2.0;

  // Throws InvalidArgument unless 0 < mu <= ell, 0 < eta <= 1/ell,
  // 0 < p <= 1, psi0 >= 0, and the budget is valid.
  void Validate() const;
};

double ContractionFactor(const BoundInputs& inputs);

// The noise term divided by T: 2 p^2 / (1 - theta) * v C^2 ln(1/delta) / eps^2.
double NoiseTermSlope(const BoundInputs& inputs);

// Throws InvalidArgument when theta >= 1.
double UtilityBound(const BoundInputs& inputs);

// Stacked potential
//   sum_i |x_i - x*|^2 + (eta/p)^2 sum_i |h_i - h*_i|^2.
// Throws InvalidArgument on size mismatches.
double Lyapunov(std::span<const Vector> client_x,
                std::span<const Vector> client_h, const Vector& x_star,
                std::span<const Vector> h_star, double eta, double p);

struct OptimalParams {
  double eta_star = 0.0;
  double p_star = 0.0;
  // Stationary point of the bound, clamped to >= 1.
  double t_star = 1.0;
  // Whichever of floor(t_star), ceil(t_star) gives the smaller bound; the
  // smaller T on ties.
  int64_t t_star_int = 1;
  bool clamped = false;
  double expected_local_steps = 1.0;
  double expected_comm_rounds = 1.0;
};

// eta* = 1/L, p* = sqrt(mu/L), and
//   T* = ln(psi0 eps^2 ln(1/(1-mu/L)) / (2 v C^2 ln(1/delta))) / ln(1/(1-mu/L)).
// mu == L is the theta = 0 special case: the bound increases in T, so T* = 1.
// Throws Unsupported for epsilon = inf (no finite optimum).
OptimalParams ComputeOptimalParams(double mu, double ell, double psi0,
                                   const PrivacyBudget& budget, double clip,
                                   double v);

// Exhaustive argmin of UtilityBound over T = 1..t_max (`rounds` ignored).
// Ties go to the smallest T.
int64_t GridArgminT(const BoundInputs& inputs, int64_t t_max);

struct RoundsOptimum {
  double t_real = 1.0;
  int64_t t_int = 1;
  double bound = 0.0;
};

// Minimizer of the bound over T for arbitrary (eta, p), from the closed-form
// stationary point of theta^T psi0 + slope T. Throws Unsupported when the
// noise slope is zero.
RoundsOptimum MinimizeOverRounds(const BoundInputs& inputs);

struct BoundDerivatives {
  double first = 0.0;
  double second = 0.0;
};

// d/dT and d^2/dT^2 of UtilityBound at inputs.rounds:
//   theta^T psi0 ln(theta) + slope,  theta^T psi0 ln(theta)^2.
// Throws Unsupported when mu == L (or theta == 0).
BoundDerivatives ComputeBoundDerivatives(const BoundInputs& inputs);

}  // namespace dpfed

#endif  // DPFED_THEORY_H_
