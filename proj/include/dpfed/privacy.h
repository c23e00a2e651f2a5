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

#ifndef DPFED_PRIVACY_H_
#define DPFED_PRIVACY_H_

#include <optional>

#include "dpfed/problems.h"
#include "dpfed/rng.h"

namespace dpfed {

// (epsilon, delta) for the whole run. epsilon = +inf means "no privacy":
// calibration then returns zero noise.
struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;

  // Throws InvalidArgument unless epsilon > 0 and 0 < delta < 1.
  void Validate() const;
};

struct MechanismParams {
  // Clipping threshold C. +inf disables clipping.
  double clip_threshold = 0.1;
  // Accountant constant v in sigma^2 >= v C^2 pT ln(1/delta) / epsilon^2.
  double v = 2.0;
  // Accountant constant u in epsilon <= u pT. Unset disables the check.
  std::optional<double> u;
  // Noise variance per coordinate per client.
  double sigma2 = 0.0;

  void Validate() const;
};

struct ClipResult {
  Vector value;
  bool was_clipped = false;
  // |x| before clipping.
  double input_norm = 0.0;
};

// min(1, C / |x|) x. The scale is nudged down when rounding would leave
// |result| above C, so |result| <= C holds exactly and clipping a clipped
// vector returns it unchanged. Throws InvalidArgument unless C > 0.
ClipResult Clip(const Vector& x, double clip_threshold);

// sigma^2 = v C^2 p T ln(1/delta) / epsilon^2, i.e. the noise lower bound
// with equality, for an expected p*T communication rounds.
//
// Throws InvalidArgument for epsilon <= 0, delta outside (0, 1), C <= 0,
// p outside (0, 1], T < 1, v <= 0, or an infinite C with finite epsilon.
double CalibrateSigma2(const PrivacyBudget& budget, double clip_threshold,
                       double p, double rounds, double v);

enum class EpsilonRegime { kOk, kWarning };

// Warns (through LogWarning) when epsilon > u p T, the range where the
// calibration is no longer claimed to hold. Always kOk when u is unset.
EpsilonRegime CheckEpsilonRegime(const PrivacyBudget& budget,
                                 std::optional<double> u, double p,
                                 double rounds);

// d draws of N(0, sigma2). Always consumes ceil(d/2) blocks of `stream`,
// including when sigma2 == 0, so traces stay aligned across noise levels.
Vector GaussianNoise(int dimension, double sigma2, CounterStream& stream);

}  // namespace dpfed

#endif  // DPFED_PRIVACY_H_
