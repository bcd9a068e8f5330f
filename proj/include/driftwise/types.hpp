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

#ifndef DRIFTWISE_TYPES_HPP_
#define DRIFTWISE_TYPES_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace driftwise {

// Invalid parameters or configuration (bad concept id, alpha outside (0,1),
// incompatible swap pair, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An instance or feature vector does not match the schema it is used with.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An operation was called in a state where it is not defined yet, e.g.
// drawing from a sampler before its warm-up completed.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed input data (CSV parse failures).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

// Mixes a base seed with a stream id so that independent components
// (realizations, replications, drift draws) never share RNG state.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_id);

enum class FeatureKind { kNumeric, kCategorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  // Numeric range, informational for numerics (used by feature scaling).
  double min = 0.0;
  double max = 1.0;
  // Number of categories; categorical values are indices in [0, cardinality).
  std::size_t cardinality = 0;
  // Category labels in index order (may be empty for generated streams).
  std::vector<std::string> levels;

  bool is_categorical() const { return kind == FeatureKind::kCategorical; }
};

enum class TargetKind { kBinary, kRegression };

// Feature values are stored as doubles. Categorical features hold their
// 0-based symbol index, which doubles represent exactly.
using FeatureVector = std::vector<double>;

struct Instance {
  FeatureVector features;
  // Class index (0/1) for binary targets, real value for regression.
  double target = 0.0;
  std::uint64_t timestamp = 0;
};

class Schema {
 public:
  Schema() = default;
  Schema(std::vector<FeatureSpec> features, TargetKind target);

  std::size_t arity() const { return features_.size(); }
  const std::vector<FeatureSpec>& features() const { return features_; }
  const FeatureSpec& feature(std::size_t j) const { return features_.at(j); }
  TargetKind target_kind() const { return target_; }
  std::vector<std::string> names() const;

  // Index of the feature called `name`; throws SchemaError if unknown.
  std::size_t index_of(const std::string& name) const;

  // Throws SchemaError if `x` has the wrong arity, a non-finite numeric or
  // an out-of-range categorical index.
  void validate(std::span<const double> x) const;
  void validate(const Instance& instance) const;

 private:
  std::vector<FeatureSpec> features_;
  TargetKind target_ = TargetKind::kBinary;
};

// Per-feature importance values aligned with schema order.
using ImportanceVector = std::vector<double>;

}  // namespace driftwise

#endif  // DRIFTWISE_TYPES_HPP_
