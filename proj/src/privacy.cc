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

#include "dpfed/privacy.h"

#include <cmath>
#include <limits>
#include <string>

#include "dpfed/errors.h"
#include "dpfed/log.h"

namespace dpfed {

void PrivacyBudget::Validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("delta must lie in (0, 1)");
  }
}

void MechanismParams::Validate() const {
  if (!(clip_threshold > 0.0)) throw InvalidArgument("clip must be > 0");
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("v must be > 0");
  if (u && !(*u > 0.0)) throw InvalidArgument("u must be > 0 when set");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) {
    throw InvalidArgument("sigma2 must be finite and >= 0");
  }
}

ClipResult Clip(const Vector& x, double clip_threshold) {
  if (!(clip_threshold > 0.0)) {
    throw InvalidArgument("clip threshold must be > 0");
  }
  ClipResult out;
  out.input_norm = x.norm();
  if (out.input_norm <= clip_threshold) {
    out.value = x;
    return out;
  }
  out.was_clipped = true;
  double scale = clip_threshold / out.input_norm;
  out.value = scale * x;
  while (out.value.norm() > clip_threshold) {
    scale = std::nextafter(scale, 0.0);
    out.value = scale * x;
  }
  return out;
}

double CalibrateSigma2(const PrivacyBudget& budget, double clip_threshold,
                       double p, double rounds, double v) {
  budget.Validate();
  if (!(clip_threshold > 0.0)) throw InvalidArgument("clip must be > 0");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("p must lie in (0, 1]");
  if (!(rounds >= 1.0)) throw InvalidArgument("rounds must be >= 1");
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("v must be > 0");
  if (std::isinf(budget.epsilon)) return 0.0;
  if (std::isinf(clip_threshold)) {
    throw InvalidArgument(
        "an infinite clip threshold needs infinite noise for finite epsilon");
  }
  const double log_inv_delta = -std::log(budget.delta);
  return v * clip_threshold * clip_threshold * p * rounds * log_inv_delta /
         (budget.epsilon * budget.epsilon);
}

EpsilonRegime CheckEpsilonRegime(const PrivacyBudget& budget,
                                 std::optional<double> u, double p,
                                 double rounds) {
  if (!u) return EpsilonRegime::kOk;
  if (budget.epsilon > *u * p * rounds) {
    LogWarning("epsilon = " + std::to_string(budget.epsilon) +
               " exceeds u*p*T = " + std::to_string(*u * p * rounds) +
               "; the noise calibration is outside its stated regime");
    return EpsilonRegime::kWarning;
  }
  return EpsilonRegime::kOk;
}

Vector GaussianNoise(int dimension, double sigma2, CounterStream& stream) {
  if (!(sigma2 >= 0.0)) throw InvalidArgument("sigma2 must be >= 0");
  Vector out(dimension);
  for (int i = 0; i < dimension; ++i) out(i) = stream.NextNormal();
  // Odd dimensions leave a cached normal; the stream is discarded after one
  // vector so the block count is what matters.
  if (sigma2 == 0.0) return Vector::Zero(dimension);
  return std::sqrt(sigma2) * out;
}

}  // namespace dpfed
