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

// Instrumented model for cost and ordering tests.

#ifndef DRIFTWISE_TESTS_COUNTING_MODEL_HPP_
#define DRIFTWISE_TESTS_COUNTING_MODEL_HPP_

#include <functional>
#include <memory>
#include <string>

#include "driftwise/learners.hpp"

namespace driftwise::testing {

// Wraps a model and counts predict / learn_one calls. Counters are shared
// between clones so snapshots keep reporting into the same tally.
class CountingModel final : public learn::Model {
 public:
  struct Counts {
    std::uint64_t predicts = 0;
    std::uint64_t learns = 0;
  };

  explicit CountingModel(std::unique_ptr<learn::Model> inner)
      : inner_(std::move(inner)), counts_(std::make_shared<Counts>()) {}

  double predict(std::span<const double> x) const override {
    ++counts_->predicts;
    return inner_->predict(x);
  }
  void learn_one(std::span<const double> x, double y) override {
    ++counts_->learns;
    if (on_learn) on_learn();
    inner_->learn_one(x, y);
  }
  std::unique_ptr<learn::Model> clone() const override {
    auto copy = std::make_unique<CountingModel>(inner_->clone());
    copy->counts_ = counts_;
    return copy;
  }
  std::string name() const override { return "counting(" + inner_->name() + ")"; }

  const Counts& counts() const { return *counts_; }
  void reset() { *counts_ = {}; }

  // Optional hook run at the start of every learn_one.
  std::function<void()> on_learn;

 private:
  std::unique_ptr<learn::Model> inner_;
  std::shared_ptr<Counts> counts_;
};

}  // namespace driftwise::testing

#endif  // DRIFTWISE_TESTS_COUNTING_MODEL_HPP_
