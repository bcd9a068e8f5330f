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

#include "driftwise/types.hpp"

#include <cmath>
#include <set>

namespace driftwise {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_id) {
  // splitmix64 finaliser over the combined words.
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Schema::Schema(std::vector<FeatureSpec> features, TargetKind target)
    : features_(std::move(features)), target_(target) {
  if (features_.empty()) {
    throw SchemaError("schema needs at least one feature");
  }
  std::set<std::string> seen;
  for (const auto& f : features_) {
    if (!seen.insert(f.name).second) {
      throw SchemaError("duplicate feature name '" + f.name + "'");
    }
    if (f.is_categorical() && f.cardinality == 0) {
      throw SchemaError("categorical feature '" + f.name +
                        "' has zero cardinality");
    }
  }
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.name);
  return out;
}

std::size_t Schema::index_of(const std::string& name) const {
  for (std::size_t j = 0; j < features_.size(); ++j) {
    if (features_[j].name == name) return j;
  }
  throw SchemaError("unknown feature '" + name + "'");
}

void Schema::validate(std::span<const double> x) const {
  if (x.size() != features_.size()) {
    throw SchemaError("expected " + std::to_string(features_.size()) +
                      " features, got " + std::to_string(x.size()));
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& f = features_[j];
    if (!std::isfinite(x[j])) {
      throw SchemaError("feature '" + f.name + "' is not finite");
    }
    if (f.is_categorical()) {
      const double v = x[j];
      if (v < 0 || v != std::floor(v) ||
          v >= static_cast<double>(f.cardinality)) {
        throw SchemaError("feature '" + f.name + "' has invalid category " +
                          std::to_string(v));
      }
    }
  }
}

void Schema::validate(const Instance& instance) const {
  validate(instance.features);
  if (target_ == TargetKind::kBinary && instance.target != 0.0 &&
      instance.target != 1.0) {
    throw SchemaError("binary target must be 0 or 1");
  }
}

}  // namespace driftwise
