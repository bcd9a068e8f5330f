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

// Permutation feature importance estimators: the per-event increment, the
// exponentially smoothed incremental estimator (iPFI) averaged over
// independent realizations, scaled batch PFI, its exact expectation (model
// reliance), interval PFI and the normalized comparison error.

#ifndef DRIFTWISE_IMPORTANCE_HPP_
#define DRIFTWISE_IMPORTANCE_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "driftwise/learners.hpp"
#include "driftwise/sampling.hpp"
#include "driftwise/types.hpp"

namespace driftwise::importance {

enum class LossKind { kAbsolute, kSquared };

// Distance between a prediction and the target. Absolute difference is the
// default; squared error is offered for regression-style comparisons.
struct Loss {
  LossKind kind = LossKind::kAbsolute;

  double operator()(double prediction, double target) const {
    const double d = prediction - target;
    return kind == LossKind::kAbsolute ? (d < 0 ? -d : d) : d * d;
  }
};

// ||h(x with the features in `subset` taken from `replacement`) - y||
//   - ||h(x) - y||.
// Exactly two predict calls. `scratch` is reused to avoid allocations.
double lambda_increment(const learn::Model& model, const Instance& x,
                        const Instance& replacement,
                        std::span<const std::size_t> subset, const Loss& loss,
                        std::vector<double>& scratch);

double lambda_increment(const learn::Model& model, const Instance& x,
                        const Instance& replacement, std::size_t feature,
                        const Loss& loss = {});

enum class SmoothingInit {
  // The first increment is assigned directly (weights sum to one).
  kAssign,
  // Start from zero and smooth from the first increment on; this is the
  // estimator whose bias is (1-alpha)^(t-t0+1) * phi.
  kZero,
};

// Per-feature exponential smoothing state.
class SmoothedImportance {
 public:
  SmoothedImportance(std::size_t features, double alpha,
                     SmoothingInit init = SmoothingInit::kAssign);

  void update(std::size_t feature, double increment);
  // Undefined (nullopt) until the feature received its first increment.
  std::optional<double> value(std::size_t feature) const;
  bool initialized(std::size_t feature) const { return initialized_.at(feature); }
  std::size_t size() const { return values_.size(); }
  double alpha() const { return alpha_; }

 private:
  double alpha_;
  SmoothingInit init_;
  std::vector<double> values_;
  std::vector<bool> initialized_;
};

struct IpfiOptions {
  double alpha = 0.001;
  sampling::SamplerKind sampler = sampling::SamplerKind::kGeometric;
  std::size_t reservoir_length = 100;
  std::size_t realizations = 10;
  std::uint64_t seed = 0;
  SmoothingInit init = SmoothingInit::kAssign;
  Loss loss;
};

// M independent iPFI realizations, each owning its sampler and smoothing
// state. The reported estimate is their arithmetic mean.
class IpfiEnsemble {
 public:
  IpfiEnsemble(std::size_t features, IpfiOptions options);

  const IpfiOptions& options() const { return options_; }
  std::size_t features() const { return features_; }
  std::size_t realizations() const { return realizations_.size(); }
  std::size_t warmup() const;
  bool ready() const;

  // Stores an observation without explaining it (warm-up phase).
  void observe(const Instance& instance);

  // Explains `instance` under `model`: per realization and feature, draw a
  // replacement, compute the increment and smooth it; then update every
  // sampler with `instance`. Costs 2 * features * realizations predictions.
  // Throws PreconditionError before warm-up.
  ImportanceVector step(const learn::Model& model, const Instance& instance);

  // step() once warm, observe() before; returns the estimate if defined.
  std::optional<ImportanceVector> explain_one(const learn::Model& model,
                                              const Instance& instance);

  std::optional<ImportanceVector> estimate() const;
  std::optional<ImportanceVector> realization_estimate(std::size_t m) const;

 private:
  struct Realization {
    sampling::Sampler sampler;
    SmoothedImportance state;
  };

  IpfiOptions options_;
  std::size_t features_;
  std::vector<Realization> realizations_;
  std::vector<std::size_t> subset_;
  std::vector<double> scratch_;
};

// (1/N) sum_n lambda(x_n, x_perm[n]) for one fixed permutation.
double permutation_pfi(const learn::Model& model,
                       std::span<const Instance> data,
                       std::span<const std::size_t> perm, std::size_t feature,
                       const Loss& loss = {});

// Uniform random permutation of 0..n-1 (Fisher-Yates).
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

// Scaled batch PFI: N/(N-1) times the mean of permutation_pfi over
// `permutations` uniform permutations. Throws ConfigError if N < 2.
double batch_pfi(const learn::Model& model, std::span<const Instance> data,
                 std::size_t feature, std::size_t permutations, Rng& rng,
                 const Loss& loss = {});

ImportanceVector batch_pfi_all(const learn::Model& model,
                               std::span<const Instance> data,
                               std::size_t permutations, Rng& rng,
                               const Loss& loss = {});

// Exact expectation of batch PFI over permutations (model reliance):
// e_switch - e_orig with the O(N^2) off-diagonal sum.
double expected_pfi(const learn::Model& model, std::span<const Instance> data,
                    std::size_t feature, const Loss& loss = {});

ImportanceVector expected_pfi_all(const learn::Model& model,
                                  std::span<const Instance> data,
                                  const Loss& loss = {});

struct TimedImportance {
  std::uint64_t t = 0;
  ImportanceVector values;
};

// Batch PFI over disjoint tumbling windows of `interval` observations,
// computed with the model as it is when a window closes.
class IntervalPfi {
 public:
  IntervalPfi(std::size_t interval, std::size_t permutations,
              std::uint64_t seed, Loss loss = {});

  // Buffers `instance`; when the window is full, returns batch PFI over it
  // stamped with the window's last timestamp and starts a new window.
  std::optional<TimedImportance> observe(const learn::Model& model,
                                         const Instance& instance);

  std::size_t interval() const { return interval_; }
  std::size_t pending() const { return buffer_.size(); }

 private:
  std::size_t interval_;
  std::size_t permutations_;
  Rng rng_;
  Loss loss_;
  std::vector<Instance> buffer_;
};

// Offline interval PFI: window k is evaluated with snapshots[k] (or the
// only snapshot when one is given). An incomplete trailing window is
// skipped with a warning on std::clog.
std::vector<TimedImportance> interval_pfi(
    std::span<const std::shared_ptr<const learn::Model>> snapshots,
    std::span<const Instance> stream, std::size_t interval,
    std::size_t permutations, std::uint64_t seed, const Loss& loss = {});

// Min-max scaling to [0, 1]; nullopt if the vector is constant.
std::optional<ImportanceVector> min_max_normalize(
    std::span<const double> values);

// Sum of absolute differences of the min-max normalized vectors. nullopt
// when either vector is constant (normalization undefined). Throws
// std::invalid_argument on length mismatch.
std::optional<double> normalized_error(std::span<const double> estimate,
                                       std::span<const double> reference);

}  // namespace driftwise::importance

#endif  // DRIFTWISE_IMPORTANCE_HPP_
