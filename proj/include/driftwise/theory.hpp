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

// Closed-form quantities of the incremental estimator (static-model bias,
// smoothing window conversion, agrawal ground truth) and Monte-Carlo
// studies that check the bias and variance behaviour empirically.

#ifndef DRIFTWISE_THEORY_HPP_
#define DRIFTWISE_THEORY_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "driftwise/datastream.hpp"
#include "driftwise/importance.hpp"
#include "driftwise/learners.hpp"
#include "driftwise/sampling.hpp"

namespace driftwise::theory {

// (1 - alpha)^steps * phi, with steps = t - t0 + 1.
double static_bias(double alpha, std::uint64_t steps, double phi);

// alpha = 2 / (N + 1) and its inverse.
double window_to_alpha(double window);
double alpha_to_window(double alpha);

// Probability of class A for agrawal concept 1 (three rectangles of 5/39).
double agrawal_class_a_probability();

// Exact PFI of the concept-1 agrawal oracle under absolute loss: 40/117
// for age, 80/169 for salary, zero elsewhere. Only concept 1 is supported.
ImportanceVector agrawal_ground_truth(int concept_id = 1);

using StreamFactory =
    std::function<std::unique_ptr<stream::Stream>(std::uint64_t seed)>;
using ModelFactory = std::function<std::unique_ptr<learn::Model>()>;

struct BiasStudyConfig {
  double alpha = 0.01;
  std::size_t replications = 200;
  // Checkpoints in smoothing steps (t - t0 + 1).
  std::vector<std::uint64_t> checkpoints = {1, 50, 100, 460};
  sampling::SamplerKind sampler = sampling::SamplerKind::kUniformFull;
  std::size_t reservoir_length = 100;
  importance::SmoothingInit init = importance::SmoothingInit::kZero;
  std::uint64_t seed = 0;
  double z_threshold = 3.0;
};

struct BiasRow {
  std::uint64_t steps = 0;
  std::size_t feature = 0;
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
  // E[estimate] predicted for the configured initialization.
  double expected = 0.0;
  // phi - expected.
  double analytic_bias = 0.0;
  double z = 0.0;
  bool within = false;
};

struct BiasReport {
  BiasStudyConfig config;
  std::vector<BiasRow> rows;
  double max_abs_z = 0.0;
  bool passed = false;
};

// Runs `replications` independent single-realization estimators, each on
// its own stream, and compares the across-replication mean at every
// checkpoint with the analytic expectation: phi * (1 - (1-alpha)^steps)
// for zero initialization, phi for init-by-assignment.
BiasReport run_bias_study(const BiasStudyConfig& config,
                          const learn::Model& model,
                          const StreamFactory& make_stream,
                          const ImportanceVector& truth);

// Concept-1 agrawal oracle on iid agrawal streams with the closed-form truth.
BiasReport run_bias_study(const BiasStudyConfig& config);

// What the variance study replicates. kRealization: one run of the
// estimator, so the variance mixes data and sampler randomness. kExpected:
// the estimate averaged over the sampler, computed exactly from the marginal
// draw probabilities, so only the data varies. kExpected costs O(s) model
// calls per step for uniform samplers and about 20L for geometric ones.
enum class VarianceEstimand { kRealization, kExpected };

struct VarianceStudyConfig {
  sampling::SamplerKind sampler = sampling::SamplerKind::kUniformFull;
  // Must be strictly decreasing.
  std::vector<double> alphas = {0.05, 0.02, 0.01, 0.005};
  // Must be strictly increasing; only meaningful for reservoir samplers.
  std::vector<std::size_t> reservoir_lengths = {100};
  std::size_t replications = 100;
  // Run length T = horizon_factor / alpha explanation steps.
  double horizon_factor = 50.0;
  // Variance is averaged over this final fraction of the run.
  double tail_fraction = 0.1;
  importance::SmoothingInit init = importance::SmoothingInit::kAssign;
  VarianceEstimand estimand = VarianceEstimand::kRealization;
  // When set, every replication explains the same stream and only the
  // sampler seeds differ, so the variance is the one due to sampling alone.
  // By default each replication draws its own stream; replication r uses
  // the same stream at every grid point.
  bool shared_stream = false;
  std::uint64_t seed = 0;
  // Tolerance used for the Chebyshev bound variance / epsilon^2.
  double epsilon = 0.05;
};

struct VarianceRow {
  double alpha = 0.0;
  sampling::SamplerKind sampler = sampling::SamplerKind::kUniformFull;
  std::size_t reservoir_length = 0;
  std::uint64_t horizon = 0;
  ImportanceVector mean;
  ImportanceVector variance;
  // Sum of per-feature variances; the ordering statistic.
  double total_variance = 0.0;
  // Collision probability of the sampler at the end of the run.
  double collision_probability = 0.0;
  // P(|estimate - E| > epsilon) <= variance / epsilon^2, per total variance.
  double chebyshev_bound = 0.0;
};

struct VarianceReport {
  VarianceStudyConfig config;
  std::vector<VarianceRow> rows;
  // Variance strictly decreasing along the alpha grid (for every L).
  bool alpha_monotone = true;
  // Variance strictly decreasing as L grows (for every alpha).
  bool length_monotone = true;
};

// Across-replication variance of the long-run estimate for every
// (alpha, L) grid point. `make_model` is called once per replication; a
// learning model is trained prequentially (explain, then learn).
VarianceReport run_variance_study(const VarianceStudyConfig& config,
                                  const ModelFactory& make_model,
                                  const StreamFactory& make_stream);

// Concept-1 agrawal oracle on iid agrawal streams.
VarianceReport run_variance_study(const VarianceStudyConfig& config);

}  // namespace driftwise::theory

#endif  // DRIFTWISE_THEORY_HPP_
