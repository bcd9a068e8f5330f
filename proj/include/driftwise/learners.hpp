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

#ifndef DRIFTWISE_LEARNERS_HPP_
#define DRIFTWISE_LEARNERS_HPP_

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "driftwise/types.hpp"

namespace driftwise::learn {

// Uniform predict/learn contract every explained model implements. For
// binary targets predict() returns the class-1 probability; for regression
// the predicted value. predict() must not change observable state.
class Model {
 public:
  virtual ~Model() = default;

  virtual double predict(std::span<const double> x) const = 0;
  virtual void learn_one(std::span<const double> x, double y) = 0;
  virtual std::unique_ptr<Model> clone() const = 0;
  virtual std::string name() const = 0;
};

// Immutable deep copy; safe to share across threads.
std::shared_ptr<const Model> snapshot(const Model& model);

// A fixed function X -> Y. learn_one is a no-op.
class FrozenOracle final : public Model {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  FrozenOracle(std::size_t arity, Fn fn, std::string name = "oracle");

  double predict(std::span<const double> x) const override;
  void learn_one(std::span<const double>, double) override {}
  std::unique_ptr<Model> clone() const override;
  std::string name() const override { return name_; }

 private:
  std::size_t arity_;
  Fn fn_;
  std::string name_;
};

FrozenOracle agrawal_oracle(int concept_id);
FrozenOracle stagger_oracle(int concept_id);
FrozenOracle constant_model(std::size_t arity, double value);

// Running mean/variance (Welford).
struct RunningMoments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }
  // Unbiased sample variance; 0 with fewer than two observations.
  double variance() const { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
};

// Binary naive Bayes with Gaussian likelihoods for numeric features and
// Laplace-smoothed category counts for categorical ones.
//
// A feature's likelihood term is only used once every class has enough
// observations to define it (two for numerics, one for categoricals);
// before that the feature is skipped, so an untrained model predicts the
// 0.5 prior and a one-class history is dominated by the prior.
class OnlineNaiveBayes final : public Model {
 public:
  explicit OnlineNaiveBayes(Schema schema, double laplace = 1.0);

  double predict(std::span<const double> x) const override;
  void learn_one(std::span<const double> x, double y) override;
  std::unique_ptr<Model> clone() const override;
  std::string name() const override { return "naive_bayes"; }

  double class_count(int c) const { return class_counts_[c]; }
  const RunningMoments& moments(std::size_t feature, int c) const;

  static constexpr double kVarianceFloor = 1e-9;

 private:
  Schema schema_;
  double laplace_;
  double class_counts_[2] = {0.0, 0.0};
  // [feature][class]
  std::vector<std::array<RunningMoments, 2>> numeric_;
  std::vector<std::array<std::vector<double>, 2>> categories_;
};

struct LogisticOptions {
  double learning_rate = 0.05;
  double l2 = 0.0;
};

// Logistic regression trained with one SGD step per observation. Numerics
// are min-max scaled with the schema ranges; categoricals are one-hot.
class OnlineLogisticRegression final : public Model {
 public:
  explicit OnlineLogisticRegression(Schema schema, LogisticOptions options = {});

  double predict(std::span<const double> x) const override;
  void learn_one(std::span<const double> x, double y) override;
  std::unique_ptr<Model> clone() const override;
  std::string name() const override { return "logistic_regression"; }

  // Encoded design vector (without the bias term).
  std::vector<double> encode(std::span<const double> x) const;
  // Per-sample log-loss (plus L2 penalty) at the given parameters.
  double loss(std::span<const double> x, double y,
              std::span<const double> weights, double bias) const;
  // Analytic gradient of loss() at the current parameters; the last entry is
  // the bias derivative.
  std::vector<double> gradient(std::span<const double> x, double y) const;

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  void set_parameters(std::vector<double> weights, double bias);

 private:
  Schema schema_;
  LogisticOptions options_;
  std::vector<std::size_t> offsets_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

}  // namespace driftwise::learn

#endif  // DRIFTWISE_LEARNERS_HPP_
