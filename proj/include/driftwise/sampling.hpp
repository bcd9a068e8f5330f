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

// Incremental sampling strategies that pick a past observation to replace a
// feature's value with, plus the analytic laws of what they draw.

#ifndef DRIFTWISE_SAMPLING_HPP_
#define DRIFTWISE_SAMPLING_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driftwise/types.hpp"

namespace driftwise::sampling {

enum class SamplerKind {
  // Stores every observation; draws uniformly over all of them.
  kUniformFull,
  // Fixed-size uniform reservoir (Vitter's algorithm R).
  kUniformReservoir,
  // Fixed-size reservoir where every new observation replaces a uniformly
  // chosen slot, giving recency-weighted geometric draw probabilities.
  kGeometric,
};

std::string to_string(SamplerKind kind);
// Accepts "uniform" (full store), "uniform_reservoir" and "geometric".
SamplerKind parse_sampler_kind(const std::string& name);

class Sampler {
 public:
  // `capacity` is the reservoir length L; ignored for kUniformFull.
  Sampler(SamplerKind kind, std::size_t capacity, std::uint64_t seed);

  SamplerKind kind() const { return kind_; }
  std::size_t capacity() const { return capacity_; }
  // Number of observations needed before draw() is defined: L for the
  // reservoir variants, 1 for the full store.
  std::size_t warmup() const;
  bool ready() const { return seen_ >= warmup(); }
  std::uint64_t seen() const { return seen_; }

  // A stored past observation. Throws PreconditionError before warm-up.
  const Instance& draw();

  // Offers the newest observation to the store.
  void update(const Instance& instance);

  std::span<const Instance> contents() const { return slots_; }

 private:
  std::size_t uniform_slot(std::size_t n);

  SamplerKind kind_;
  std::size_t capacity_;
  Rng rng_;
  std::vector<Instance> slots_;
  std::uint64_t seen_ = 0;
};

// P(the sampler draws past observation r at time s), where s is the number
// of observations seen so far. Uniform kinds: 1/s. Geometric (t0 must equal
// L): p(1-p)^(s-r-1) for r >= t0 and p(1-p)^(s-t0) for r < t0, p = 1/L.
// Throws std::invalid_argument unless 0 <= r < s and s >= t0.
double marginal_probability(SamplerKind kind, std::uint64_t s,
                            std::uint64_t r, std::size_t L, std::size_t t0);

// Sum over r of marginal_probability^2, in closed form:
// 1/s (uniform) and p/(2-p) * (1 + (1-p)^(2(s-t0)+1)) (geometric).
double collision_probability(SamplerKind kind, std::uint64_t s, std::size_t L,
                             std::size_t t0);

}  // namespace driftwise::sampling

#endif  // DRIFTWISE_SAMPLING_HPP_
