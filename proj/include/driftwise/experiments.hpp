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

// Experiment runner behind the driftwise CLI: run configuration, the
// static approximation experiment (A), prequential drift experiments (B, C)
// and the theory studies, together with their CSV/JSON outputs.

#ifndef DRIFTWISE_EXPERIMENTS_HPP_
#define DRIFTWISE_EXPERIMENTS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "driftwise/datastream.hpp"
#include "driftwise/importance.hpp"
#include "driftwise/learners.hpp"
#include "driftwise/sampling.hpp"
#include "driftwise/theory.hpp"
#include <nlohmann/json.hpp>

namespace driftwise::experiment {

using Json = nlohmann::ordered_json;

enum class Experiment { kA, kB, kC, kTheoryBias, kTheoryVariance };

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

struct StreamConfig {
  // "agrawal", "stagger" or "csv".
  std::string generator = "agrawal";
  int concept_id = 1;
  std::string csv_path;
  std::string target_column;
};

struct DriftConfig {
  // "feature_swap" or "function_switch".
  std::string kind = "feature_swap";
  std::uint64_t position = 10000;
  // "sudden" or "gradual".
  std::string profile = "sudden";
  std::size_t width = 1;
  // Feature names or indices (as strings) to exchange.
  std::vector<std::pair<std::string, std::string>> pairs;
  int from_concept = 1;
  int to_concept = 2;
};

struct ModelConfig {
  // "oracle", "naive_bayes", "logistic_regression" or "constant".
  std::string kind = "naive_bayes";
  // Concept used by the oracle.
  int concept_id = 1;
  double learning_rate = 0.05;
  double l2 = 0.0;
  double laplace = 1.0;
  double constant = 0.5;
};

struct RunConfig {
  Experiment experiment = Experiment::kA;
  StreamConfig stream;
  std::optional<DriftConfig> drift;
  ModelConfig model;
  std::vector<sampling::SamplerKind> samplers = {
      sampling::SamplerKind::kUniformFull, sampling::SamplerKind::kGeometric};
  std::size_t reservoir_length = 100;
  double alpha = 0.001;
  std::size_t realizations = 10;
  std::size_t interval = 1000;
  std::size_t interval_permutations = 10;
  std::size_t batch_permutations = 10;
  std::size_t shuffles = 10;
  std::uint64_t stream_length = 20000;
  std::uint64_t seed = 0;
  std::string out = "out";
  // Rows are written to importance.csv every `report_every` steps.
  std::uint64_t report_every = 100;
  bool emit_realizations = false;
  std::size_t accuracy_window = 1000;
  theory::BiasStudyConfig bias;
  theory::VarianceStudyConfig variance;
};

// Reads every known key from a JSON object; unknown keys are rejected.
RunConfig config_from_json(const Json& json);
Json config_to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);

// Applies `key.path=value` to a JSON config (the CLI's --set). The value is
// parsed as JSON when possible and taken as a plain string otherwise.
void apply_override(Json& config, const std::string& assignment);

// Throws ConfigError when the configuration cannot run as given (alpha
// outside (0,1), zero realizations or stream length, missing CSV file, ...).
void validate(const RunConfig& config);

// Builds the configured stream, with drift applied when configured.
std::unique_ptr<stream::Stream> make_stream(const RunConfig& config);
std::unique_ptr<learn::Model> make_model(const RunConfig& config,
                                         const Schema& schema);
stream::DriftSpec resolve_drift(const DriftConfig& drift, const Schema& schema);

std::string estimator_name(sampling::SamplerKind kind);

struct ErrorSummary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  std::size_t count = 0;
  // Comparisons skipped because a vector was constant.
  std::size_t undefined = 0;
};

// Quartiles with linear interpolation between order statistics.
ErrorSummary summarize(std::vector<double> values, std::size_t undefined = 0);

// One row of importance.csv.
struct ImportanceRow {
  std::uint64_t t = 0;
  std::size_t feature = 0;
  std::string estimator;
  // Realization index, or -1 for an ensemble mean / interval value.
  long realization = -1;
  double value = 0.0;
};

struct ExperimentAResult {
  std::vector<std::string> feature_names;
  std::vector<sampling::SamplerKind> samplers;
  // [sampler][shuffle]
  std::vector<std::vector<double>> errors;
  std::vector<ErrorSummary> summaries;
  // Final iPFI vectors and batch PFI of the first shuffle.
  std::vector<ImportanceVector> final_ipfi;
  ImportanceVector batch;
  std::vector<ImportanceRow> rows;
};

ExperimentAResult run_experiment_a(const RunConfig& config);

enum class TraceEvent { kExplain, kLearn };
using Trace = std::function<void(TraceEvent, std::uint64_t t)>;

struct Reaction {
  sampling::SamplerKind sampler;
  std::string description;
  // Steps after the drift position until the reaction; nullopt if never.
  std::optional<std::uint64_t> steps;
};

struct TopFeatureChange {
  std::uint64_t t = 0;
  std::size_t feature = 0;
};

struct PrequentialResult {
  std::vector<std::string> feature_names;
  std::vector<sampling::SamplerKind> samplers;
  std::uint64_t steps = 0;
  std::optional<std::uint64_t> drift_position;
  // [sampler][t]; entries before warm-up are empty vectors.
  std::vector<std::vector<ImportanceVector>> ipfi;
  std::vector<importance::TimedImportance> interval;
  // (t, accuracy over the trailing window) sampled every window.
  std::vector<std::pair<std::uint64_t, double>> rolling_accuracy;
  // Per sampler: normalized error against interval PFI at every boundary.
  std::vector<std::vector<std::optional<double>>> interval_errors;
  std::vector<ErrorSummary> error_whole;
  std::vector<ErrorSummary> error_pre_drift;
  std::vector<ErrorSummary> error_post_drift;
  std::vector<Reaction> reactions;
  // Per sampler: rank-1 feature changes after warm-up.
  std::vector<std::vector<TopFeatureChange>> top_changes;
  std::vector<ImportanceRow> rows;
};

// Prequential loop shared by experiments B and C: every observation is
// first explained by each iPFI ensemble and offered to interval PFI, then
// learned. Drift is optional here; B and C require it.
PrequentialResult run_prequential(const RunConfig& config,
                                  const Trace& trace = {});

PrequentialResult run_experiment_b(const RunConfig& config);
PrequentialResult run_experiment_c(const RunConfig& config);

// Longest run (in steps) during which the rank-1 feature differed from the
// one at `from`, counted over [from, end).
std::uint64_t longest_top_deviation(const std::vector<ImportanceVector>& series,
                                    std::uint64_t from);

// Writes importance.csv (and summary.json / study.csv as appropriate) into
// config.out and returns the summary document.
Json run_and_write(const RunConfig& config);

void write_importance_csv(const std::string& path,
                          const std::vector<std::string>& feature_names,
                          const std::vector<ImportanceRow>& rows);

Json summary_json(const RunConfig& config, const ExperimentAResult& result);
Json summary_json(const RunConfig& config, const PrequentialResult& result);
Json summary_json(const theory::BiasReport& report,
                  const std::vector<std::string>& feature_names);
Json summary_json(const theory::VarianceReport& report,
                  const std::vector<std::string>& feature_names);

void write_study_csv(const std::string& path,
                     const std::vector<std::string>& feature_names,
                     const theory::BiasReport& report);
void write_study_csv(const std::string& path,
                     const std::vector<std::string>& feature_names,
                     const theory::VarianceReport& report);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// The theory-oracle suite behind `driftwise verify`.
std::vector<CheckResult> run_verification(std::uint64_t seed = 7);

// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace driftwise::experiment

#endif  // DRIFTWISE_EXPERIMENTS_HPP_
