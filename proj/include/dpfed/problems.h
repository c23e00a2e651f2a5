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

#ifndef DPFED_PROBLEMS_H_
#define DPFED_PROBLEMS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dpfed {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ObjectiveKind { kQuadratic, kLogistic };

const char* ObjectiveKindName(ObjectiveKind kind);

// Strong-convexity and smoothness constants of one objective.
struct SmoothnessProfile {
  double mu = 0.0;
  double ell = 0.0;
};

// One client's loss f_i.
//
//   quadratic: f(x) = 0.5 (x - a)^T A (x - a),  a = A^{-1} b,
//              so grad f(x) = A x - b and min f = 0.
//   logistic:  f(x) = (1/n) sum_k [log(1 + e^{z_k x}) - y_k z_k x]
//                     + (lambda / 2) |x|^2.
//
// Instances are immutable after construction, so every method is safe to call
// concurrently.
class ClientObjective {
 public:
  // Throws InvalidArgument unless A is square, symmetric to 1e-12 relative
  // tolerance, and positive definite, and b matches A.
  static ClientObjective Quadratic(Matrix a, Vector b);
  // Throws InvalidArgument unless labels are in {0,1}, lambda > 0, and the
  // shapes agree.
  static ClientObjective Logistic(Matrix features, Vector labels,
                                  double ridge);

  ObjectiveKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  // Number of samples. Quadratic clients report 1.
  int num_samples() const;

  Vector Gradient(const Vector& x) const;
  // Average of per-sample gradients over `batch` (plus the ridge term for
  // logistic clients). Quadratic clients ignore the batch and return the
  // exact gradient.
  Vector MinibatchGradient(const Vector& x, std::span<const int> batch) const;
  double Loss(const Vector& x) const;
  SmoothnessProfile Constants() const { return constants_; }

  // Quadratic accessors. Calling these on a logistic client throws
  // Unsupported.
  const Matrix& hessian() const;
  const Vector& linear_term() const;
  // A^{-1} b.
  const Vector& client_optimum() const;

  // Logistic accessors.
  const Matrix& features() const;
  const Vector& labels() const;
  double ridge() const;

 private:
  ClientObjective() = default;
  void CheckDimension(const Vector& x) const;

  ObjectiveKind kind_ = ObjectiveKind::kQuadratic;
  int dimension_ = 0;
  SmoothnessProfile constants_;
  // quadratic
  Matrix a_;
  Vector b_;
  Vector optimum_;
  // logistic
  Matrix z_;
  Vector y_;
  double ridge_ = 0.0;
};

// The federated objective f = (1/N) sum_i f_i.
class Federation {
 public:
  // Computes the global (mu, L) as (min_i mu_i, max_i L_i) and, when every
  // client is quadratic, the closed-form optimum.
  explicit Federation(std::vector<ClientObjective> clients);

  int num_clients() const { return static_cast<int>(clients_.size()); }
  int dimension() const { return dimension_; }
  double mu() const { return mu_; }
  double ell() const { return ell_; }
  const std::vector<ClientObjective>& clients() const { return clients_; }
  const ClientObjective& client(int i) const { return clients_[i]; }

  bool has_optimum() const { return optimum_.has_value(); }
  // Throws Unsupported when no optimum is attached.
  const Vector& optimum() const;
  const std::vector<Vector>& star_controls() const;
  // Attaches x* and sets h*_i = grad f_i(x*). Used for numerically solved
  // (logistic) federations.
  void SetOptimum(const Vector& x_star);

  double GlobalLoss(const Vector& x) const;
  Vector GlobalGradient(const Vector& x) const;

 private:
  std::vector<ClientObjective> clients_;
  int dimension_ = 0;
  double mu_ = 0.0;
  double ell_ = 0.0;
  std::optional<Vector> optimum_;
  std::vector<Vector> star_controls_;
};

// x* and h* = (grad f_1(x*), ..., grad f_N(x*)).
struct OptimumPair {
  Vector x_star;
  std::vector<Vector> h_star;
};

// x* = (sum_i A_i)^{-1} (sum_i b_i). Throws Unsupported for a federation
// with any logistic client, InternalError if the sum is singular.
OptimumPair ClosedFormOptimum(std::span<const ClientObjective> clients);

struct HeterogeneitySpec {
  ObjectiveKind kind = ObjectiveKind::kQuadratic;
  int clients = 3;
  int dimension = 5;
  // kappa = L / mu.
  double condition_number = 10.0;
  // Radius of the client optima (quadratic) or client parameter vectors
  // (logistic) around the shared center.
  double zeta = 1.0;
  // Smallest eigenvalue of every quadratic client.
  double mu = 1.0;
  // Norm of the shared center.
  double center_norm = 1.0;
  int samples_per_client = 20;

  // Throws InvalidArgument on zeta < 0, kappa < 1, N < 1, d < 1, mu <= 0.
  void Validate() const;
};

// Deterministic in (spec, seed).
//
// Quadratic: A_i = Q_i^T diag(s) Q_i with a random orthogonal Q_i and a
// log-uniform spectrum s in [mu, kappa mu] whose endpoints are pinned, so the
// measured kappa equals the requested one up to rounding. Client optimum
// a_i = c + zeta u_i for a shared center c of norm center_norm and a random
// unit direction u_i; b_i = A_i a_i.
//
// Logistic: Gaussian features, labels drawn from a logistic model with
// client parameter c + zeta u_i, and a ridge chosen so that the federation's
// kappa is close to the requested value.
Federation GenerateFederation(const HeterogeneitySpec& spec, uint64_t seed);

}  // namespace dpfed

#endif  // DPFED_PROBLEMS_H_
