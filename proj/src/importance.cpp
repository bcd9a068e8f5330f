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

#include "driftwise/importance.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace driftwise::importance {

namespace {

void check_feature(std::size_t feature, std::size_t arity) {
  if (feature >= arity) {
    throw SchemaError("feature index " + std::to_string(feature) +
                      " out of range");
  }
}

void check_dataset(std::span<const Instance> data) {
  if (data.size() < 2) {
    throw ConfigError("PFI needs at least two observations");
  }
}

}  // namespace

double lambda_increment(const learn::Model& model, const Instance& x,
                        const Instance& replacement,
                        std::span<const std::size_t> subset, const Loss& loss,
                        std::vector<double>& scratch) {
  if (replacement.features.size() != x.features.size()) {
    throw SchemaError("replacement instance has a different arity");
  }
  scratch.assign(x.features.begin(), x.features.end());
  for (const auto j : subset) {
    check_feature(j, scratch.size());
    scratch[j] = replacement.features[j];
  }
  const double marginalized = loss(model.predict(scratch), x.target);
  const double original = loss(model.predict(x.features), x.target);
  return marginalized - original;
}

double lambda_increment(const learn::Model& model, const Instance& x,
                        const Instance& replacement, std::size_t feature,
                        const Loss& loss) {
  std::vector<double> scratch;
  const std::size_t subset[] = {feature};
  return lambda_increment(model, x, replacement, subset, loss, scratch);
}

// ------------------------------------------------------ SmoothedImportance

SmoothedImportance::SmoothedImportance(std::size_t features, double alpha,
                                       SmoothingInit init)
    : alpha_(alpha),
      init_(init),
      values_(features, 0.0),
      initialized_(features, false) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie strictly inside (0, 1)");
  }
}

void SmoothedImportance::update(std::size_t feature, double increment) {
  if (!initialized_.at(feature) && init_ == SmoothingInit::kAssign) {
    values_[feature] = increment;
  } else {
    values_[feature] = (1.0 - alpha_) * values_[feature] + alpha_ * increment;
  }
  initialized_[feature] = true;
}

std::optional<double> SmoothedImportance::value(std::size_t feature) const {
  if (!initialized_.at(feature)) return std::nullopt;
  return values_[feature];
}

// ------------------------------------------------------------ IpfiEnsemble

IpfiEnsemble::IpfiEnsemble(std::size_t features, IpfiOptions options)
    : options_(options), features_(features), subset_(1) {
  if (features_ == 0) throw ConfigError("need at least one feature");
  if (options_.realizations == 0) {
    throw ConfigError("need at least one realization");
  }
  realizations_.reserve(options_.realizations);
  for (std::size_t m = 0; m < options_.realizations; ++m) {
    realizations_.push_back(Realization{
        sampling::Sampler(options_.sampler, options_.reservoir_length,
                          derive_seed(options_.seed, m)),
        SmoothedImportance(features_, options_.alpha, options_.init)});
  }
}

std::size_t IpfiEnsemble::warmup() const {
  return realizations_.front().sampler.warmup();
}

bool IpfiEnsemble::ready() const {
  return std::all_of(realizations_.begin(), realizations_.end(),
                     [](const Realization& r) { return r.sampler.ready(); });
}

void IpfiEnsemble::observe(const Instance& instance) {
  for (auto& r : realizations_) r.sampler.update(instance);
}

ImportanceVector IpfiEnsemble::step(const learn::Model& model,
                                    const Instance& instance) {
  if (!ready()) {
    throw PreconditionError("iPFI step before the sampler warm-up of " +
                            std::to_string(warmup()) + " observations");
  }
  if (instance.features.size() != features_) {
    throw SchemaError("instance arity does not match the ensemble");
  }
  for (auto& r : realizations_) {
    for (std::size_t j = 0; j < features_; ++j) {
      const Instance& replacement = r.sampler.draw();
      subset_[0] = j;
      r.state.update(j, lambda_increment(model, instance, replacement, subset_,
                                         options_.loss, scratch_));
    }
    r.sampler.update(instance);
  }
  return *estimate();
}

std::optional<ImportanceVector> IpfiEnsemble::explain_one(
    const learn::Model& model, const Instance& instance) {
  if (!ready()) {
    observe(instance);
    return estimate();
  }
  return step(model, instance);
}

std::optional<ImportanceVector> IpfiEnsemble::realization_estimate(
    std::size_t m) const {
  const auto& state = realizations_.at(m).state;
  ImportanceVector out(features_);
  for (std::size_t j = 0; j < features_; ++j) {
    auto v = state.value(j);
    if (!v) return std::nullopt;
    out[j] = *v;
  }
  return out;
}

std::optional<ImportanceVector> IpfiEnsemble::estimate() const {
  ImportanceVector mean(features_, 0.0);
  for (std::size_t m = 0; m < realizations_.size(); ++m) {
    auto v = realization_estimate(m);
    if (!v) return std::nullopt;
    for (std::size_t j = 0; j < features_; ++j) mean[j] += (*v)[j];
  }
  for (auto& v : mean) v /= static_cast<double>(realizations_.size());
  return mean;
}

// --------------------------------------------------------------- batch PFI

double permutation_pfi(const learn::Model& model,
                       std::span<const Instance> data,
                       std::span<const std::size_t> perm, std::size_t feature,
                       const Loss& loss) {
  if (perm.size() != data.size()) {
    throw std::invalid_argument("permutation length differs from data");
  }
  if (data.empty()) return 0.0;
  check_feature(feature, data.front().features.size());
  std::vector<double> scratch;
  const std::size_t subset[] = {feature};
  double sum = 0.0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    sum += lambda_increment(model, data[n], data[perm[n]], subset, loss,
                            scratch);
  }
  return sum / static_cast<double>(data.size());
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    const auto k = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    std::swap(perm[i - 1], perm[k]);
  }
  return perm;
}

double batch_pfi(const learn::Model& model, std::span<const Instance> data,
                 std::size_t feature, std::size_t permutations, Rng& rng,
                 const Loss& loss) {
  check_dataset(data);
  if (permutations == 0) throw ConfigError("need at least one permutation");
  double total = 0.0;
  for (std::size_t m = 0; m < permutations; ++m) {
    const auto perm = random_permutation(data.size(), rng);
    total += permutation_pfi(model, data, perm, feature, loss);
  }
  const double n = static_cast<double>(data.size());
  return n / (n - 1.0) * total / static_cast<double>(permutations);
}

ImportanceVector batch_pfi_all(const learn::Model& model,
                               std::span<const Instance> data,
                               std::size_t permutations, Rng& rng,
                               const Loss& loss) {
  check_dataset(data);
  ImportanceVector out(data.front().features.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = batch_pfi(model, data, j, permutations, rng, loss);
  }
  return out;
}

double expected_pfi(const learn::Model& model, std::span<const Instance> data,
                    std::size_t feature, const Loss& loss) {
  check_dataset(data);
  check_feature(feature, data.front().features.size());
  const std::size_t n_obs = data.size();
  std::vector<double> scratch;
  double switched = 0.0;
  double original = 0.0;
  for (std::size_t n = 0; n < n_obs; ++n) {
    const Instance& x = data[n];
    original += loss(model.predict(x.features), x.target);
    scratch.assign(x.features.begin(), x.features.end());
    double row = 0.0;
    for (std::size_t m = 0; m < n_obs; ++m) {
      if (m == n) continue;
      scratch[feature] = data[m].features[feature];
      row += loss(model.predict(scratch), x.target);
    }
    switched += row;
  }
  const double n = static_cast<double>(n_obs);
  return switched / (n * (n - 1.0)) - original / n;
}

ImportanceVector expected_pfi_all(const learn::Model& model,
                                  std::span<const Instance> data,
                                  const Loss& loss) {
  check_dataset(data);
  ImportanceVector out(data.front().features.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = expected_pfi(model, data, j, loss);
  }
  return out;
}

// ------------------------------------------------------------ interval PFI

IntervalPfi::IntervalPfi(std::size_t interval, std::size_t permutations,
                         std::uint64_t seed, Loss loss)
    : interval_(interval),
      permutations_(permutations),
      rng_(seed),
      loss_(loss) {
  if (interval_ < 2) throw ConfigError("interval must be >= 2");
  if (permutations_ == 0) throw ConfigError("need at least one permutation");
  buffer_.reserve(interval_);
}

std::optional<TimedImportance> IntervalPfi::observe(const learn::Model& model,
                                                    const Instance& instance) {
  buffer_.push_back(instance);
  if (buffer_.size() < interval_) return std::nullopt;
  TimedImportance out{buffer_.back().timestamp,
                      batch_pfi_all(model, buffer_, permutations_, rng_, loss_)};
  buffer_.clear();
  return out;
}

std::vector<TimedImportance> interval_pfi(
    std::span<const std::shared_ptr<const learn::Model>> snapshots,
    std::span<const Instance> stream, std::size_t interval,
    std::size_t permutations, std::uint64_t seed, const Loss& loss) {
  if (interval < 2) throw ConfigError("interval must be >= 2");
  if (snapshots.empty()) throw ConfigError("need at least one model snapshot");
  const std::size_t windows = stream.size() / interval;
  if (snapshots.size() != 1 && snapshots.size() < windows) {
    throw ConfigError("need one model snapshot per interval");
  }
  if (stream.size() % interval != 0) {
    std::clog << "warning: interval PFI skips the last "
              << stream.size() % interval << " observations (interval "
              << interval << ")\n";
  }
  Rng rng(seed);
  std::vector<TimedImportance> out;
  out.reserve(windows);
  for (std::size_t k = 0; k < windows; ++k) {
    const auto window = stream.subspan(k * interval, interval);
    const auto& model = *snapshots[snapshots.size() == 1 ? 0 : k];
    out.push_back(TimedImportance{
        window.back().timestamp,
        batch_pfi_all(model, window, permutations, rng, loss)});
  }
  return out;
}

// ------------------------------------------------------------------ errors

std::optional<ImportanceVector> min_max_normalize(
    std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return std::nullopt;
  ImportanceVector out(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    out[j] = (values[j] - *lo) / range;
  }
  return out;
}

std::optional<double> normalized_error(std::span<const double> estimate,
                                       std::span<const double> reference) {
  if (estimate.size() != reference.size()) {
    throw std::invalid_argument("importance vectors differ in length");
  }
  const auto a = min_max_normalize(estimate);
  const auto b = min_max_normalize(reference);
  if (!a || !b) return std::nullopt;
  double error = 0.0;
  for (std::size_t j = 0; j < a->size(); ++j) {
    error += std::abs((*a)[j] - (*b)[j]);
  }
  return error;
}

}  // namespace driftwise::importance
