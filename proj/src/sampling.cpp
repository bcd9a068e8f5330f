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

#include "driftwise/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace driftwise::sampling {

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kUniformFull:
      return "uniform";
    case SamplerKind::kUniformReservoir:
      return "uniform_reservoir";
    case SamplerKind::kGeometric:
      return "geometric";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(const std::string& name) {
  if (name == "uniform") return SamplerKind::kUniformFull;
  if (name == "uniform_reservoir") return SamplerKind::kUniformReservoir;
  if (name == "geometric") return SamplerKind::kGeometric;
  throw ConfigError("unknown sampler '" + name + "'");
}

Sampler::Sampler(SamplerKind kind, std::size_t capacity, std::uint64_t seed)
    : kind_(kind), capacity_(capacity), rng_(seed) {
  if (kind_ != SamplerKind::kUniformFull && capacity_ == 0) {
    throw ConfigError("reservoir length must be >= 1");
  }
  if (kind_ != SamplerKind::kUniformFull) slots_.reserve(capacity_);
}

std::size_t Sampler::warmup() const {
  return kind_ == SamplerKind::kUniformFull ? 1 : capacity_;
}

std::size_t Sampler::uniform_slot(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

const Instance& Sampler::draw() {
  if (!ready()) {
    throw PreconditionError("sampler drawn before warm-up (" +
                            std::to_string(seen_) + " of " +
                            std::to_string(warmup()) + " observations)");
  }
  return slots_[uniform_slot(slots_.size())];
}

void Sampler::update(const Instance& instance) {
  ++seen_;
  if (kind_ == SamplerKind::kUniformFull || slots_.size() < capacity_) {
    slots_.push_back(instance);
    return;
  }
  if (kind_ == SamplerKind::kGeometric) {
    slots_[uniform_slot(capacity_)] = instance;
    return;
  }
  // Algorithm R: the seen_-th observation enters with probability L/seen_.
  const auto j = std::uniform_int_distribution<std::uint64_t>(0, seen_ - 1)(rng_);
  if (j < capacity_) slots_[j] = instance;
}

namespace {

void check_geometric(std::size_t L, std::size_t t0) {
  if (L == 0) throw std::invalid_argument("reservoir length must be >= 1");
  if (t0 != L) {
    throw std::invalid_argument(
        "geometric sampling requires t0 equal to the reservoir length");
  }
}

}  // namespace

double marginal_probability(SamplerKind kind, std::uint64_t s,
                            std::uint64_t r, std::size_t L, std::size_t t0) {
  if (r >= s) throw std::invalid_argument("need 0 <= r < s");
  if (kind != SamplerKind::kGeometric) {
    return 1.0 / static_cast<double>(s);
  }
  check_geometric(L, t0);
  if (s < t0) throw std::invalid_argument("need s >= t0");
  const double p = 1.0 / static_cast<double>(L);
  const double exponent =
      r >= t0 ? static_cast<double>(s - r - 1) : static_cast<double>(s - t0);
  return p * std::pow(1.0 - p, exponent);
}

double collision_probability(SamplerKind kind, std::uint64_t s, std::size_t L,
                             std::size_t t0) {
  if (kind != SamplerKind::kGeometric) {
    if (s == 0) throw std::invalid_argument("need s >= 1");
    return 1.0 / static_cast<double>(s);
  }
  check_geometric(L, t0);
  if (s < t0) throw std::invalid_argument("need s >= t0");
  const double p = 1.0 / static_cast<double>(L);
  const double tail = std::pow(1.0 - p, 2.0 * static_cast<double>(s - t0) + 1.0);
  return p / (2.0 - p) * (1.0 + tail);
}

}  // namespace driftwise::sampling
