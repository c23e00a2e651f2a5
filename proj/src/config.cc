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

#include "dpfed/config.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dpfed/errors.h"
#include "dpfed/federation_io.h"
#include "dpfed/log.h"
#include "dpfed/text_format.h"

namespace dpfed {
namespace {

using boost::property_tree::ptree;

const std::set<std::string> kFederationKeys = {
    "source", "path", "kind", "clients", "dimension", "condition_number",
    "zeta", "mu", "center_norm", "samples_per_client", "seed"};
const std::set<std::string> kAlgorithmKeys = {
    "name", "eta", "tau", "rounds", "p", "iterations", "batch_size", "seeds",
    "workers"};
const std::set<std::string> kPrivacyKeys = {"epsilon", "delta", "clip", "v",
                                            "u", "sigma2"};
const std::set<std::string> kSweepKeys = {"mode", "values", "budget",
                                          "epsilons", "replications",
                                          "local_steps", "metric"};

// Typed access to one section with the section name in every error.
class Section {
 public:
  Section(const ptree* tree, std::string name)
      : tree_(tree), name_(std::move(name)) {}

  bool present() const { return tree_ != nullptr; }

  std::optional<std::string> Raw(const std::string& key) const {
    if (!tree_) return std::nullopt;
    const auto child = tree_->get_child_optional(key);
    if (!child) return std::nullopt;
    return std::string(Trim(child->data()));
  }

  std::string Required(const std::string& key) const {
    auto raw = Raw(key);
    if (!raw) Fail(key, "missing required key");
    return *raw;
  }

  double Double(const std::string& key, double fallback) const {
    const auto raw = Raw(key);
    return raw ? ToDouble(key, *raw) : fallback;
  }

  double RequiredDouble(const std::string& key) const {
    return ToDouble(key, Required(key));
  }

  long long Integer(const std::string& key, long long fallback) const {
    const auto raw = Raw(key);
    return raw ? ToInteger(key, *raw) : fallback;
  }

  long long RequiredInteger(const std::string& key) const {
    return ToInteger(key, Required(key));
  }

  std::vector<double> DoubleList(const std::string& key) const {
    std::vector<double> out;
    const auto raw = Raw(key);
    if (!raw) return out;
    std::stringstream items(*raw);
    for (std::string item; std::getline(items, item, ',');) {
      out.push_back(ToDouble(key, item));
    }
    return out;
  }

  double ToDouble(const std::string& key, const std::string& text) const {
    try {
      return ParseDouble(text);
    } catch (const InvalidArgument& e) {
      Fail(key, e.what());
    }
  }

  long long ToInteger(const std::string& key, const std::string& text) const {
    try {
      return ParseInteger(text);
    } catch (const InvalidArgument& e) {
      Fail(key, e.what());
    }
  }

  [[noreturn]] void Fail(const std::string& key,
                         const std::string& message) const {
    throw ConfigError("[" + name_ + "] " + key + ": " + message);
  }

 private:
  const ptree* tree_;
  std::string name_;
};

void CheckKeys(const ptree& tree, const std::string& section,
               const std::set<std::string>& allowed) {
  for (const auto& [key, value] : tree) {
    if (!value.empty()) {
      throw ConfigError("[" + section + "] nested key '" + key + "'");
    }
    if (!allowed.count(key)) {
      throw ConfigError("[" + section + "] unknown key '" + key + "'");
    }
  }
}

ObjectiveKind ParseKind(const Section& s) {
  const std::string kind = s.Raw("kind").value_or("quadratic");
  if (kind == "quadratic") return ObjectiveKind::kQuadratic;
  if (kind == "logistic") return ObjectiveKind::kLogistic;
  s.Fail("kind", "expected quadratic or logistic, got '" + kind + "'");
}

HeterogeneitySpec ParseHeterogeneity(const Section& s) {
  HeterogeneitySpec spec;
  spec.kind = ParseKind(s);
  spec.clients = static_cast<int>(s.Integer("clients", spec.clients));
  spec.dimension = static_cast<int>(s.Integer("dimension", spec.dimension));
  spec.condition_number =
      s.Double("condition_number", spec.condition_number);
  spec.zeta = s.Double("zeta", spec.zeta);
  spec.mu = s.Double("mu", spec.mu);
  spec.center_norm = s.Double("center_norm", spec.center_norm);
  spec.samples_per_client = static_cast<int>(
      s.Integer("samples_per_client", spec.samples_per_client));
  try {
    spec.Validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[federation] ") + e.what());
  }
  return spec;
}

FederationSource ParseFederation(const Section& s,
                                 const std::string& base_dir) {
  FederationSource source;
  source.seed = static_cast<uint64_t>(s.Integer("seed", 0));
  const std::string kind = s.Raw("source").value_or("generate");
  if (kind == "generate") {
    source.generate = ParseHeterogeneity(s);
  } else if (kind == "file") {
    std::filesystem::path path = s.Required("path");
    if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
    if (!std::filesystem::exists(path)) {
      s.Fail("path", "file '" + path.string() + "' does not exist");
    }
    source.path = path.string();
  } else {
    s.Fail("source", "expected generate or file, got '" + kind + "'");
  }
  return source;
}

SweepSpec ParseSweep(const Section& s) {
  SweepSpec spec;
  try {
    spec.mode = ParseSweepMode(s.Raw("mode").value_or("local_steps"));
  } catch (const InvalidArgument& e) {
    s.Fail("mode", e.what());
  }
  spec.budget = s.Integer("budget", spec.budget);
  spec.values = s.DoubleList("values");
  spec.epsilons = s.DoubleList("epsilons");
  spec.replications =
      static_cast<int>(s.Integer("replications", spec.replications));
  spec.local_steps =
      static_cast<int>(s.Integer("local_steps", spec.local_steps));
  const std::string metric = s.Raw("metric").value_or("psi");
  if (metric == "psi") {
    spec.metric = SweepMetric::kPsi;
  } else if (metric == "loss") {
    spec.metric = SweepMetric::kLoss;
  } else if (metric == "dist") {
    spec.metric = SweepMetric::kDist;
  } else {
    s.Fail("metric", "expected psi, loss or dist");
  }
  try {
    spec.Validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[sweep] ") + e.what());
  }
  return spec;
}

}  // namespace

const char* SweepModeName(SweepMode mode) {
  switch (mode) {
    case SweepMode::kLocalSteps:
      return "local_steps";
    case SweepMode::kCommRounds:
      return "comm_rounds";
    case SweepMode::kEpsilon:
      return "epsilon";
  }
  return "unknown";
}

const char* SweepMetricName(SweepMetric metric) {
  switch (metric) {
    case SweepMetric::kPsi:
      return "psi";
    case SweepMetric::kLoss:
      return "loss";
    case SweepMetric::kDist:
      return "dist";
  }
  return "unknown";
}

SweepMode ParseSweepMode(const std::string& text) {
  if (text == "local_steps" || text == "local-steps") {
    return SweepMode::kLocalSteps;
  }
  if (text == "comm_rounds" || text == "comm-rounds") {
    return SweepMode::kCommRounds;
  }
  if (text == "epsilon") return SweepMode::kEpsilon;
  throw InvalidArgument("unknown sweep mode '" + text + "'");
}

void SweepSpec::Validate() const {
  if (values.empty()) throw InvalidArgument("sweep values must not be empty");
  for (size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) {
      throw InvalidArgument("sweep values must be strictly increasing");
    }
  }
  if (replications < 1) throw InvalidArgument("replications must be >= 1");
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw InvalidArgument("epsilons must be > 0");
  }
  switch (mode) {
    case SweepMode::kLocalSteps:
      if (budget < 1) throw InvalidArgument("budget must be >= 1");
      for (double tau : values) {
        if (tau < 1 || tau != std::floor(tau)) {
          throw InvalidArgument("local steps must be positive integers");
        }
        if (budget % static_cast<int64_t>(tau) != 0) {
          throw InvalidArgument("local steps " + FormatDouble(tau) +
                                " do not divide the budget " +
                                std::to_string(budget));
        }
      }
      break;
    case SweepMode::kCommRounds:
      if (local_steps < 1) throw InvalidArgument("local_steps must be >= 1");
      for (double rounds : values) {
        if (rounds < 1 || rounds != std::floor(rounds)) {
          throw InvalidArgument("round counts must be positive integers");
        }
      }
      break;
    case SweepMode::kEpsilon:
      for (double eps : values) {
        if (!(eps > 0.0)) throw InvalidArgument("epsilons must be > 0");
      }
      break;
  }
}

ExperimentConfig ParseExperimentConfig(std::istream& in,
                                       const std::string& base_dir) {
  ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  const ptree* federation = nullptr;
  const ptree* algorithm = nullptr;
  const ptree* privacy = nullptr;
  const ptree* sweep = nullptr;
  for (const auto& [name, child] : tree) {
    if (child.empty()) {
      throw ConfigError("key '" + name + "' outside of any section");
    }
    if (name == "federation") {
      CheckKeys(child, name, kFederationKeys);
      federation = &child;
    } else if (name == "algorithm") {
      CheckKeys(child, name, kAlgorithmKeys);
      algorithm = &child;
    } else if (name == "privacy") {
      CheckKeys(child, name, kPrivacyKeys);
      privacy = &child;
    } else if (name == "sweep") {
      CheckKeys(child, name, kSweepKeys);
      sweep = &child;
    } else {
      throw ConfigError("unknown section [" + name + "]");
    }
  }
  if (!federation) throw ConfigError("missing [federation] section");
  if (!algorithm) throw ConfigError("missing [algorithm] section");
  if (!privacy) throw ConfigError("missing [privacy] section");

  ExperimentConfig config;
  config.federation =
      ParseFederation(Section(federation, "federation"), base_dir);

  const Section priv(privacy, "privacy");
  MechanismParams mechanism;
  PrivacyBudget budget;
  budget.epsilon = priv.RequiredDouble("epsilon");
  budget.delta = priv.Double("delta", budget.delta);
  mechanism.clip_threshold = priv.Double("clip", mechanism.clip_threshold);
  mechanism.v = priv.Double("v", mechanism.v);
  if (priv.Raw("u")) mechanism.u = priv.RequiredDouble("u");
  if (priv.Raw("sigma2")) config.sigma2_override = priv.RequiredDouble("sigma2");
  try {
    budget.Validate();
    mechanism.Validate();
    if (config.sigma2_override && !(*config.sigma2_override >= 0.0)) {
      throw InvalidArgument("sigma2 must be >= 0");
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("[privacy] ") + e.what());
  }

  const Section alg(algorithm, "algorithm");
  const std::string name = alg.Required("name");
  const std::string eta_text = alg.Required("eta");
  config.eta_auto = eta_text == "auto";
  const double eta = config.eta_auto ? 1.0 : alg.ToDouble("eta", eta_text);
  if (name == "fedavg") {
    config.algorithm = Algorithm::kFedAvg;
    config.fedavg.eta = eta;
    config.fedavg.tau = static_cast<int>(alg.RequiredInteger("tau"));
    config.fedavg.rounds = alg.RequiredInteger("rounds");
    config.fedavg.mechanism = mechanism;
    config.fedavg.budget = budget;
    const std::string batch = alg.Raw("batch_size").value_or("full");
    if (batch != "full") {
      config.fedavg.batch_size = static_cast<int>(alg.ToInteger("batch_size", batch));
    }
    try {
      config.fedavg.Validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("[algorithm] ") + e.what());
    }
  } else if (name == "scaffnew") {
    config.algorithm = Algorithm::kScaffNew;
    config.scaffnew.eta = eta;
    const std::string p_text = alg.Required("p");
    config.p_auto = p_text == "auto";
    config.scaffnew.p = config.p_auto ? 1.0 : alg.ToDouble("p", p_text);
    config.scaffnew.iterations = alg.RequiredInteger("iterations");
    config.scaffnew.mechanism = mechanism;
    config.scaffnew.budget = budget;
    try {
      config.scaffnew.Validate(1, 1);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("[algorithm] ") + e.what());
    }
  } else {
    alg.Fail("name", "expected fedavg or scaffnew, got '" + name + "'");
  }
  if (alg.Raw("seeds")) {
    config.seeds.clear();
    for (double s : alg.DoubleList("seeds")) {
      if (s < 0 || s != std::floor(s)) alg.Fail("seeds", "seeds must be integers >= 0");
      config.seeds.push_back(static_cast<uint64_t>(s));
    }
    if (config.seeds.empty()) alg.Fail("seeds", "need at least one seed");
  }
  config.workers = static_cast<int>(alg.Integer("workers", 1));
  if (config.workers < 1) alg.Fail("workers", "must be >= 1");

  if (sweep) config.sweep = ParseSweep(Section(sweep, "sweep"));
  return config;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return ParseExperimentConfig(
      in, std::filesystem::path(path).parent_path().string());
}

HeterogeneitySpec LoadHeterogeneitySpec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec '" + path + "'");
  ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("spec syntax: ") + e.what());
  }
  const ptree* federation = nullptr;
  for (const auto& [name, child] : tree) {
    if (name != "federation" || child.empty()) {
      throw ConfigError("spec files hold only a [federation] section");
    }
    CheckKeys(child, name, kFederationKeys);
    federation = &child;
  }
  if (!federation) throw ConfigError("missing [federation] section");
  return ParseHeterogeneity(Section(federation, "federation"));
}

Federation BuildFederation(const FederationSource& source) {
  Federation federation =
      source.generate ? GenerateFederation(*source.generate, source.seed)
                      : LoadFederation(source.path);
  if (!federation.has_optimum()) SolveNumericOptimum(federation);
  return federation;
}

AlgorithmConfig ResolveAlgorithm(const ExperimentConfig& config,
                                 const Federation& federation) {
  AlgorithmConfig resolved;
  if (config.algorithm == Algorithm::kFedAvg) {
    FedAvgConfig c = config.fedavg;
    if (config.eta_auto) c.eta = 1.0 / federation.ell();
    resolved = c;
  } else {
    ScaffNewConfig c = config.scaffnew;
    if (config.eta_auto) c.eta = 1.0 / federation.ell();
    if (config.p_auto) c.p = std::sqrt(federation.mu() / federation.ell());
    resolved = c;
  }
  if (config.sigma2_override) {
    std::visit(
        [&](auto& c) {
          if (std::isfinite(c.budget.epsilon)) {
            LogWarning("sigma2 override " + FormatDouble(*config.sigma2_override) +
                       " replaces the calibrated noise; the (epsilon, delta) "
                       "guarantee no longer follows from the calibration");
          }
          c.mechanism.sigma2 = *config.sigma2_override;
        },
        resolved);
  } else {
    CalibrateNoise(resolved);
  }
  return resolved;
}

}  // namespace dpfed
