/*
 * Copyright 2026 The Driftwise Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "driftwise/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "driftwise/datastream.hpp"

namespace driftwise::learn {

namespace {

void check_arity(std::span<const double> x, std::size_t arity) {
  if (x.size() != arity) {
    throw SchemaError("model expects " + std::to_string(arity) +
                      " features, got " + std::to_string(x.size()));
  }
}

int binary_class(double y) {
  if (y == 0.0) return 0;
  if (y == 1.0) return 1;
  throw SchemaError("binary target must be 0 or 1");
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::shared_ptr<const Model> snapshot(const Model& model) {
  return std::shared_ptr<const Model>(model.clone());
}

// ------------------------------------------------------------ FrozenOracle

FrozenOracle::FrozenOracle(std::size_t arity, Fn fn, std::string name)
    : arity_(arity), fn_(std::move(fn)), name_(std::move(name)) {}

double FrozenOracle::predict(std::span<const double> x) const {
  check_arity(x, arity_);
  return fn_(x);
}

std::unique_ptr<Model> FrozenOracle::clone() const {
  return std::make_unique<FrozenOracle>(*this);
}

FrozenOracle agrawal_oracle(int concept_id) {
  // Validates the concept id up front.
  stream::agrawal_label(std::vector<double>(stream::agrawal::kArity, 0.0),
                        concept_id);
  return FrozenOracle(
      stream::agrawal::kArity,
      [concept_id](std::span<const double> x) {
        return stream::agrawal_label(x, concept_id);
      },
      "agrawal_oracle_" + std::to_string(concept_id));
}

FrozenOracle stagger_oracle(int concept_id) {
  stream::stagger_label(std::vector<double>(3, 0.0), concept_id);
  return FrozenOracle(
      3,
      [concept_id](std::span<const double> x) {
        return stream::stagger_label(x, concept_id);
      },
      "stagger_oracle_" + std::to_string(concept_id));
}

FrozenOracle constant_model(std::size_t arity, double value) {
  return FrozenOracle(
      arity, [value](std::span<const double>) { return value; }, "constant");
}

// --------------------------------------------------------- OnlineNaiveBayes

OnlineNaiveBayes::OnlineNaiveBayes(Schema schema, double laplace)
    : schema_(std::move(schema)), laplace_(laplace) {
  if (schema_.target_kind() != TargetKind::kBinary) {
    throw ConfigError("naive Bayes supports binary targets only");
  }
  if (!(laplace_ > 0.0)) throw ConfigError("laplace constant must be > 0");
  numeric_.resize(schema_.arity());
  categories_.resize(schema_.arity());
  for (std::size_t j = 0; j < schema_.arity(); ++j) {
    const auto& f = schema_.feature(j);
    if (f.is_categorical()) {
      categories_[j][0].assign(f.cardinality, 0.0);
      categories_[j][1].assign(f.cardinality, 0.0);
    }
  }
}

const RunningMoments& OnlineNaiveBayes::moments(std::size_t feature,
                                                int c) const {
  return numeric_.at(feature).at(static_cast<std::size_t>(c));
}

double OnlineNaiveBayes::predict(std::span<const double> x) const {
  check_arity(x, schema_.arity());
  const double total = class_counts_[0] + class_counts_[1];
  double log_joint[2];
  for (int c = 0; c < 2; ++c) {
    log_joint[c] =
        std::log((class_counts_[c] + laplace_) / (total + 2.0 * laplace_));
  }
  for (std::size_t j = 0; j < schema_.arity(); ++j) {
    const auto& f = schema_.feature(j);
    if (f.is_categorical()) {
      if (class_counts_[0] < 1.0 || class_counts_[1] < 1.0) continue;
      const auto v = static_cast<std::size_t>(x[j]);
      if (v >= f.cardinality) throw SchemaError("category out of range");
      for (int c = 0; c < 2; ++c) {
        const double p =
            (categories_[j][c][v] + laplace_) /
            (class_counts_[c] + laplace_ * static_cast<double>(f.cardinality));
        log_joint[c] += std::log(p);
      }
    } else {
      const auto& m = numeric_[j];
      if (m[0].count < 2.0 || m[1].count < 2.0) continue;
      for (int c = 0; c < 2; ++c) {
        const double var = std::max(m[c].variance(), kVarianceFloor);
        const double d = x[j] - m[c].mean;
        log_joint[c] +=
            -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * d * d / var;
      }
    }
  }
  // P(class 1) = 1 / (1 + exp(l0 - l1)).
  return sigmoid(log_joint[1] - log_joint[0]);
}

void OnlineNaiveBayes::learn_one(std::span<const double> x, double y) {
  schema_.validate(x);
  const int c = binary_class(y);
  class_counts_[c] += 1.0;
  for (std::size_t j = 0; j < schema_.arity(); ++j) {
    if (schema_.feature(j).is_categorical()) {
      categories_[j][c][static_cast<std::size_t>(x[j])] += 1.0;
    } else {
      numeric_[j][c].push(x[j]);
    }
  }
}

std::unique_ptr<Model> OnlineNaiveBayes::clone() const {
  return std::make_unique<OnlineNaiveBayes>(*this);
}

// ------------------------------------------------ OnlineLogisticRegression

OnlineLogisticRegression::OnlineLogisticRegression(Schema schema,
                                                   LogisticOptions options)
    : schema_(std::move(schema)), options_(options) {
  if (schema_.target_kind() != TargetKind::kBinary) {
    throw ConfigError("logistic regression supports binary targets only");
  }
  if (!(options_.learning_rate > 0.0) || options_.l2 < 0.0) {
    throw ConfigError("learning rate must be > 0 and l2 >= 0");
  }
  std::size_t width = 0;
  for (const auto& f : schema_.features()) {
    offsets_.push_back(width);
    width += f.is_categorical() ? f.cardinality : 1;
  }
  weights_.assign(width, 0.0);
}

std::vector<double> OnlineLogisticRegression::encode(
    std::span<const double> x) const {
  check_arity(x, schema_.arity());
  std::vector<double> z(weights_.size(), 0.0);
  for (std::size_t j = 0; j < schema_.arity(); ++j) {
    const auto& f = schema_.feature(j);
    if (f.is_categorical()) {
      const auto v = static_cast<std::size_t>(x[j]);
      if (v >= f.cardinality) throw SchemaError("category out of range");
      z[offsets_[j] + v] = 1.0;
    } else {
      const double span = f.max - f.min;
      z[offsets_[j]] = span > 0.0 ? (x[j] - f.min) / span : x[j] - f.min;
    }
  }
  return z;
}

double OnlineLogisticRegression::predict(std::span<const double> x) const {
  const auto z = encode(x);
  double s = bias_;
  for (std::size_t k = 0; k < z.size(); ++k) s += weights_[k] * z[k];
  return sigmoid(s);
}

double OnlineLogisticRegression::loss(std::span<const double> x, double y,
                                      std::span<const double> weights,
                                      double bias) const {
  const auto z = encode(x);
  double s = bias;
  double penalty = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    s += weights[k] * z[k];
    penalty += weights[k] * weights[k];
  }
  // log(1 + exp(s)) - y*s, computed stably.
  const double softplus = s > 0 ? s + std::log1p(std::exp(-s))
                                : std::log1p(std::exp(s));
  return softplus - y * s + 0.5 * options_.l2 * penalty;
}

std::vector<double> OnlineLogisticRegression::gradient(
    std::span<const double> x, double y) const {
  const auto z = encode(x);
  double s = bias_;
  for (std::size_t k = 0; k < z.size(); ++k) s += weights_[k] * z[k];
  const double residual = sigmoid(s) - y;
  std::vector<double> g(z.size() + 1);
  for (std::size_t k = 0; k < z.size(); ++k) {
    g[k] = residual * z[k] + options_.l2 * weights_[k];
  }
  g.back() = residual;
  return g;
}

void OnlineLogisticRegression::learn_one(std::span<const double> x,
                                         double y) {
  schema_.validate(x);
  binary_class(y);
  const auto g = gradient(x, y);
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    weights_[k] -= options_.learning_rate * g[k];
  }
  bias_ -= options_.learning_rate * g.back();
}

std::unique_ptr<Model> OnlineLogisticRegression::clone() const {
  return std::make_unique<OnlineLogisticRegression>(*this);
}

void OnlineLogisticRegression::set_parameters(std::vector<double> weights,
                                              double bias) {
  if (weights.size() != weights_.size()) {
    throw SchemaError("weight vector has wrong length");
  }
  weights_ = std::move(weights);
  bias_ = bias;
}

}  // namespace driftwise::learn
