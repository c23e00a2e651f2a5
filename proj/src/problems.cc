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

#include "dpfed/problems.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpfed/errors.h"
#include "dpfed/rng.h"

namespace dpfed {
namespace {

constexpr double kSymmetryTolerance = 1e-12;

double Sigmoid(double s) {
  if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

// log(1 + e^s) without overflow.
double Softplus(double s) {
  return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

double LargestEigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric,
                                               Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw InternalError("symmetric eigensolve failed");
  }
  return solver.eigenvalues().maxCoeff();
}

Matrix RandomOrthogonal(int d, CounterStream& stream) {
  Matrix g(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) g(i, j) = stream.NextNormal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fix column signs so Q is Haar distributed.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

Vector RandomUnit(int d, CounterStream& stream) {
  Vector u(d);
  for (int i = 0; i < d; ++i) u(i) = stream.NextNormal();
  const double norm = u.norm();
  if (norm == 0.0) {
    u.setZero();
    u(0) = 1.0;
    return u;
  }
  return u / norm;
}

}  // namespace

const char* ObjectiveKindName(ObjectiveKind kind) {
  return kind == ObjectiveKind::kQuadratic ? "quadratic" : "logistic";
}

ClientObjective ClientObjective::Quadratic(Matrix a, Vector b) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw InvalidArgument("quadratic client: A must be square and non-empty");
  }
  if (b.size() != a.rows()) {
    throw InvalidArgument("quadratic client: b has dimension " +
                          std::to_string(b.size()) + ", expected " +
                          std::to_string(a.rows()));
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw InvalidArgument("quadratic client: non-finite entries");
  }
  const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance * scale) {
    throw InvalidArgument("quadratic client: A is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw InternalError("quadratic client: eigensolve failed");
  }
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) {
    throw InvalidArgument("quadratic client: A is not positive definite "
                          "(smallest eigenvalue " + std::to_string(lo) + ")");
  }
  ClientObjective c;
  c.kind_ = ObjectiveKind::kQuadratic;
  c.dimension_ = static_cast<int>(a.rows());
  c.constants_ = {lo, hi};
  c.optimum_ = a.llt().solve(b);
  c.a_ = std::move(a);
  c.b_ = std::move(b);
  return c;
}

ClientObjective ClientObjective::Logistic(Matrix features, Vector labels,
                                          double ridge) {
  if (features.rows() == 0 || features.cols() == 0) {
    throw InvalidArgument("logistic client: empty feature matrix");
  }
  if (labels.size() != features.rows()) {
    throw InvalidArgument("logistic client: label count does not match rows");
  }
  if (!(ridge > 0.0) || !std::isfinite(ridge)) {
    throw InvalidArgument("logistic client: ridge coefficient must be > 0");
  }
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) {
      throw InvalidArgument("logistic client: labels must be 0 or 1");
    }
  }
  if (!features.allFinite()) {
    throw InvalidArgument("logistic client: non-finite features");
  }
  ClientObjective c;
  c.kind_ = ObjectiveKind::kLogistic;
  c.dimension_ = static_cast<int>(features.cols());
  const double n = static_cast<double>(features.rows());
  const Matrix gram = features.transpose() * features;
  c.constants_ = {ridge, LargestEigenvalue(gram) / (4.0 * n) + ridge};
  c.z_ = std::move(features);
  c.y_ = std::move(labels);
  c.ridge_ = ridge;
  return c;
}

int ClientObjective::num_samples() const {
  return kind_ == ObjectiveKind::kLogistic ? static_cast<int>(z_.rows()) : 1;
}

void ClientObjective::CheckDimension(const Vector& x) const {
  if (x.size() != dimension_) {
    throw InvalidArgument("dimension mismatch: got " +
                          std::to_string(x.size()) + ", expected " +
                          std::to_string(dimension_));
  }
}

Vector ClientObjective::Gradient(const Vector& x) const {
  CheckDimension(x);
  if (kind_ == ObjectiveKind::kQuadratic) return a_ * x - b_;
  const Vector margins = z_ * x;
  const Vector residual =
      margins.unaryExpr([](double s) { return Sigmoid(s); }) - y_;
  return z_.transpose() * residual / static_cast<double>(z_.rows()) +
         ridge_ * x;
}

Vector ClientObjective::MinibatchGradient(const Vector& x,
                                          std::span<const int> batch) const {
  CheckDimension(x);
  if (batch.empty()) throw InvalidArgument("minibatch: empty batch");
  if (kind_ == ObjectiveKind::kQuadratic) return a_ * x - b_;
  Vector grad = Vector::Zero(dimension_);
  for (int k : batch) {
    if (k < 0 || k >= z_.rows()) {
      throw InvalidArgument("minibatch: sample index " + std::to_string(k) +
                            " out of range");
    }
    const double residual = Sigmoid(z_.row(k).dot(x)) - y_(k);
    grad += residual * z_.row(k).transpose();
  }
  grad /= static_cast<double>(batch.size());
  return grad + ridge_ * x;
}

double ClientObjective::Loss(const Vector& x) const {
  CheckDimension(x);
  if (kind_ == ObjectiveKind::kQuadratic) {
    const Vector diff = x - optimum_;
    return 0.5 * diff.dot(a_ * diff);
  }
  const Vector margins = z_ * x;
  double total = 0.0;
  for (Eigen::Index k = 0; k < margins.size(); ++k) {
    total += Softplus(margins(k)) - y_(k) * margins(k);
  }
  return total / static_cast<double>(z_.rows()) + 0.5 * ridge_ * x.squaredNorm();
}

const Matrix& ClientObjective::hessian() const {
  if (kind_ != ObjectiveKind::kQuadratic) throw Unsupported("not quadratic");
  return a_;
}
const Vector& ClientObjective::linear_term() const {
  if (kind_ != ObjectiveKind::kQuadratic) throw Unsupported("not quadratic");
  return b_;
}
const Vector& ClientObjective::client_optimum() const {
  if (kind_ != ObjectiveKind::kQuadratic) throw Unsupported("not quadratic");
  return optimum_;
}
const Matrix& ClientObjective::features() const {
  if (kind_ != ObjectiveKind::kLogistic) throw Unsupported("not logistic");
  return z_;
}
const Vector& ClientObjective::labels() const {
  if (kind_ != ObjectiveKind::kLogistic) throw Unsupported("not logistic");
  return y_;
}
double ClientObjective::ridge() const {
  if (kind_ != ObjectiveKind::kLogistic) throw Unsupported("not logistic");
  return ridge_;
}

Federation::Federation(std::vector<ClientObjective> clients)
    : clients_(std::move(clients)) {
  if (clients_.empty()) throw InvalidArgument("federation needs >= 1 client");
  dimension_ = clients_.front().dimension();
  mu_ = std::numeric_limits<double>::infinity();
  ell_ = 0.0;
  bool all_quadratic = true;
  for (const auto& c : clients_) {
    if (c.dimension() != dimension_) {
      throw InvalidArgument("federation: clients disagree on dimension");
    }
    mu_ = std::min(mu_, c.Constants().mu);
    ell_ = std::max(ell_, c.Constants().ell);
    all_quadratic = all_quadratic && c.kind() == ObjectiveKind::kQuadratic;
  }
  if (all_quadratic) {
    OptimumPair opt = ClosedFormOptimum(clients_);
    optimum_ = std::move(opt.x_star);
    star_controls_ = std::move(opt.h_star);
  }
}

const Vector& Federation::optimum() const {
  if (!optimum_) throw Unsupported("federation has no known optimum");
  return *optimum_;
}

const std::vector<Vector>& Federation::star_controls() const {
  if (!optimum_) throw Unsupported("federation has no known optimum");
  return star_controls_;
}

void Federation::SetOptimum(const Vector& x_star) {
  if (x_star.size() != dimension_) {
    throw InvalidArgument("optimum has wrong dimension");
  }
  optimum_ = x_star;
  star_controls_.clear();
  star_controls_.reserve(clients_.size());
  for (const auto& c : clients_) star_controls_.push_back(c.Gradient(x_star));
}

double Federation::GlobalLoss(const Vector& x) const {
  double total = 0.0;
  for (const auto& c : clients_) total += c.Loss(x);
  return total / num_clients();
}

Vector Federation::GlobalGradient(const Vector& x) const {
  Vector total = Vector::Zero(dimension_);
  for (const auto& c : clients_) total += c.Gradient(x);
  return total / num_clients();
}

OptimumPair ClosedFormOptimum(std::span<const ClientObjective> clients) {
  if (clients.empty()) throw InvalidArgument("no clients");
  const int d = clients.front().dimension();
  Matrix a_sum = Matrix::Zero(d, d);
  Vector b_sum = Vector::Zero(d);
  for (const auto& c : clients) {
    if (c.kind() != ObjectiveKind::kQuadratic) {
      throw Unsupported(
          "closed-form optimum needs quadratic clients; solve logistic "
          "federations numerically");
    }
    a_sum += c.hessian();
    b_sum += c.linear_term();
  }
  Eigen::LLT<Matrix> llt(a_sum);
  if (llt.info() != Eigen::Success) {
    throw InternalError("sum of client Hessians is singular");
  }
  OptimumPair out;
  out.x_star = llt.solve(b_sum);
  out.h_star.reserve(clients.size());
  for (const auto& c : clients) out.h_star.push_back(c.Gradient(out.x_star));
  return out;
}

void HeterogeneitySpec::Validate() const {
  if (!(zeta >= 0.0)) throw InvalidArgument("zeta must be >= 0");
  if (!(condition_number >= 1.0)) {
    throw InvalidArgument("condition_number must be >= 1");
  }
  if (clients < 1) throw InvalidArgument("clients must be >= 1");
  if (dimension < 1) throw InvalidArgument("dimension must be >= 1");
  if (!(mu > 0.0)) throw InvalidArgument("mu must be > 0");
  if (!(center_norm >= 0.0)) throw InvalidArgument("center_norm must be >= 0");
  if (kind == ObjectiveKind::kLogistic) {
    if (samples_per_client < 1) {
      throw InvalidArgument("samples_per_client must be >= 1");
    }
    if (!(condition_number > 1.0)) {
      throw InvalidArgument("logistic federations need condition_number > 1");
    }
  }
}

Federation GenerateFederation(const HeterogeneitySpec& spec, uint64_t seed) {
  spec.Validate();
  const int d = spec.dimension;
  // Client i draws from its own stream; the shared center uses client id N.
  CounterStream center_stream(seed, StreamPurpose::kGenerator,
                              static_cast<uint32_t>(spec.clients), 0);
  const Vector center = spec.center_norm * RandomUnit(d, center_stream);

  std::vector<ClientObjective> clients;
  clients.reserve(spec.clients);
  if (spec.kind == ObjectiveKind::kQuadratic) {
    const double lo = std::log(spec.mu);
    const double hi = std::log(spec.mu * spec.condition_number);
    for (int i = 0; i < spec.clients; ++i) {
      CounterStream stream(seed, StreamPurpose::kGenerator,
                           static_cast<uint32_t>(i), 0);
      const Matrix q = RandomOrthogonal(d, stream);
      Vector spectrum(d);
      for (int k = 0; k < d; ++k) {
        spectrum(k) = std::exp(lo + (hi - lo) * stream.NextUniform());
      }
      spectrum(0) = spec.mu;
      if (d > 1) spectrum(d - 1) = spec.mu * spec.condition_number;
      Matrix a = q * spectrum.asDiagonal() * q.transpose();
      a = 0.5 * (a + a.transpose()).eval();
      const Vector target = center + spec.zeta * RandomUnit(d, stream);
      Vector b = a * target;
      clients.push_back(ClientObjective::Quadratic(std::move(a), std::move(b)));
    }
    return Federation(std::move(clients));
  }

  const int n = spec.samples_per_client;
  std::vector<Matrix> features;
  std::vector<Vector> labels;
  double curvature = 0.0;
  for (int i = 0; i < spec.clients; ++i) {
    CounterStream stream(seed, StreamPurpose::kGenerator,
                         static_cast<uint32_t>(i), 0);
    Matrix z(n, d);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < d; ++c) z(r, c) = stream.NextNormal();
    }
    const Vector w = center + spec.zeta * RandomUnit(d, stream);
    Vector y(n);
    for (int r = 0; r < n; ++r) {
      y(r) = stream.NextUniform() < Sigmoid(z.row(r).dot(w)) ? 1.0 : 0.0;
    }
    curvature = std::max(curvature, LargestEigenvalue(z.transpose() * z) /
                                        (4.0 * static_cast<double>(n)));
    features.push_back(std::move(z));
    labels.push_back(std::move(y));
  }
  // L / mu = (curvature + ridge) / ridge.
  const double ridge = curvature / (spec.condition_number - 1.0);
  for (int i = 0; i < spec.clients; ++i) {
    clients.push_back(ClientObjective::Logistic(std::move(features[i]),
                                                std::move(labels[i]), ridge));
  }
  return Federation(std::move(clients));
}

}  // namespace dpfed
