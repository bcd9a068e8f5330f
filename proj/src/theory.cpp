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

#include "driftwise/theory.hpp"

#include <algorithm>
#include <cmath>

namespace driftwise::theory {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie strictly inside (0, 1)");
  }
}

std::unique_ptr<stream::Stream> agrawal_iid(std::uint64_t seed) {
  return std::make_unique<stream::AgrawalStream>(seed, 1);
}

}  // namespace

double static_bias(double alpha, std::uint64_t steps, double phi) {
  check_alpha(alpha);
  if (steps < 1) throw ConfigError("steps must be >= 1");
  return std::pow(1.0 - alpha, static_cast<double>(steps)) * phi;
}

double window_to_alpha(double window) {
  if (!(window >= 1.0)) throw ConfigError("window must be >= 1");
  return 2.0 / (window + 1.0);
}

double alpha_to_window(double alpha) {
  check_alpha(alpha);
  return 2.0 / alpha - 1.0;
}

double agrawal_class_a_probability() {
  // Each age band has probability 1/3 and a salary interval of width 50
  // out of 130.
  const double rectangle = (1.0 / 3.0) * (5.0 / 13.0);
  return 3.0 * rectangle;
}

ImportanceVector agrawal_ground_truth(int concept_id) {
  if (concept_id != 1) {
    throw ConfigError("ground truth is only available for agrawal concept 1");
  }
  const double p_a = 5.0 / 39.0;       // P(A_i)
  const double p_band_b = 5.0 / 13.0;  // salary-in-band probability
  const double third = 1.0 / 3.0;
  const double age = p_a * third + (p_band_b * third) * third +
                     2.0 * (p_a * 0.5 + (p_band_b * third +
                                         p_band_b * third * 0.5) * third);
  const double salary =
      3.0 * (p_a * (8.0 / 13.0) + ((8.0 / 13.0) * third) * p_band_b);
  ImportanceVector truth(stream::agrawal::kArity, 0.0);
  truth[stream::agrawal::kAge] = age;
  truth[stream::agrawal::kSalary] = salary;
  return truth;
}

// ------------------------------------------------------------- bias study

BiasReport run_bias_study(const BiasStudyConfig& config,
                          const learn::Model& model,
                          const StreamFactory& make_stream,
                          const ImportanceVector& truth) {
  check_alpha(config.alpha);
  if (config.replications < 2) throw ConfigError("need >= 2 replications");
  if (config.checkpoints.empty()) throw ConfigError("need checkpoints");
  std::vector<std::uint64_t> checkpoints = config.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  if (checkpoints.front() < 1) throw ConfigError("checkpoints must be >= 1");
  const std::uint64_t last = checkpoints.back();
  const std::size_t d = truth.size();

  // moments[c][j] over replications.
  std::vector<std::vector<learn::RunningMoments>> moments(
      checkpoints.size(), std::vector<learn::RunningMoments>(d));

  for (std::size_t r = 0; r < config.replications; ++r) {
    auto stream = make_stream(derive_seed(config.seed, 2 * r));
    if (stream->schema().arity() != d) {
      throw SchemaError("truth vector does not match the stream arity");
    }
    importance::IpfiOptions options;
    options.alpha = config.alpha;
    options.sampler = config.sampler;
    options.reservoir_length = config.reservoir_length;
    options.realizations = 1;
    options.seed = derive_seed(config.seed, 2 * r + 1);
    options.init = config.init;
    importance::IpfiEnsemble ensemble(d, options);

    std::uint64_t steps = 0;
    std::size_t next_checkpoint = 0;
    while (steps < last) {
      auto inst = stream->next();
      if (!inst) throw ConfigError("stream ended before the last checkpoint");
      if (!ensemble.ready()) {
        ensemble.observe(*inst);
        continue;
      }
      const auto estimate = ensemble.step(model, *inst);
      ++steps;
      while (next_checkpoint < checkpoints.size() &&
             checkpoints[next_checkpoint] == steps) {
        for (std::size_t j = 0; j < d; ++j) {
          moments[next_checkpoint][j].push(estimate[j]);
        }
        ++next_checkpoint;
      }
    }
  }

  BiasReport report;
  report.config = config;
  report.passed = true;
  const double reps = static_cast<double>(config.replications);
  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      BiasRow row;
      row.steps = checkpoints[c];
      row.feature = j;
      row.mean = moments[c][j].mean;
      row.variance = moments[c][j].variance();
      row.standard_error = std::sqrt(row.variance / reps);
      row.analytic_bias =
          config.init == importance::SmoothingInit::kZero
              ? static_bias(config.alpha, row.steps, truth[j])
              : 0.0;
      row.expected = truth[j] - row.analytic_bias;
      const double diff = row.mean - row.expected;
      if (row.standard_error > 0.0) {
        row.z = diff / row.standard_error;
        row.within = std::abs(row.z) <= config.z_threshold;
      } else {
        row.z = 0.0;
        row.within = std::abs(diff) <= 1e-12;
      }
      report.max_abs_z = std::max(report.max_abs_z, std::abs(row.z));
      report.passed = report.passed && row.within;
      report.rows.push_back(row);
    }
  }
  return report;
}

BiasReport run_bias_study(const BiasStudyConfig& config) {
  const auto oracle = learn::agrawal_oracle(1);
  return run_bias_study(config, oracle, agrawal_iid, agrawal_ground_truth(1));
}

// --------------------------------------------------------- variance study

namespace {

// Expected smoothed estimate over the sampler given the stream so far.
// Linear in the increments, so it is the smoothing of
// g_s = sum_r p_{s,r} lambda(x_s, x_r).
class ExpectedIpfi {
 public:
  ExpectedIpfi(std::size_t features, double alpha, sampling::SamplerKind kind,
               std::size_t reservoir_length, importance::SmoothingInit init)
      : kind_(kind),
        p_(1.0 / static_cast<double>(reservoir_length)),
        t0_(kind == sampling::SamplerKind::kUniformFull ? 1 : reservoir_length),
        smoothed_(features, alpha, init),
        g_(features) {}

  bool ready() const { return history_.size() >= t0_; }
  void observe(const Instance& inst) { history_.push_back(inst); }

  ImportanceVector step(const learn::Model& model, const Instance& x) {
    const std::size_t d = g_.size();
    const std::uint64_t s = history_.size();
    const double original = loss_(model.predict(x.features), x.target);
    std::fill(g_.begin(), g_.end(), 0.0);
    scratch_.assign(x.features.begin(), x.features.end());
    double mass = 0.0;
    auto accumulate = [&](const Instance& r, double w) {
      for (std::size_t j = 0; j < d; ++j) {
        scratch_[j] = r.features[j];
        g_[j] += w * loss_(model.predict(scratch_), x.target);
        scratch_[j] = x.features[j];
      }
      mass += w;
    };
    if (kind_ == sampling::SamplerKind::kGeometric) {
      // Newest first; stop once the remaining mass is negligible.
      double w = p_;
      std::uint64_t r = s;
      while (r-- > t0_ && 1.0 - mass > kTruncation) {
        accumulate(history_[r], w);
        w *= 1.0 - p_;
      }
      const double old = p_ * std::pow(1.0 - p_, static_cast<double>(s - t0_));
      for (std::uint64_t k = 0; k < t0_ && old * t0_ > kTruncation; ++k) {
        accumulate(history_[k], old);
      }
    } else {
      const double w = 1.0 / static_cast<double>(s);
      for (const auto& r : history_) accumulate(r, w);
    }
    ImportanceVector out(d);
    for (std::size_t j = 0; j < d; ++j) {
      smoothed_.update(j, g_[j] - mass * original);
      out[j] = *smoothed_.value(j);
    }
    history_.push_back(x);
    return out;
  }

 private:
  static constexpr double kTruncation = 1e-9;

  sampling::SamplerKind kind_;
  double p_;
  std::size_t t0_;
  importance::SmoothedImportance smoothed_;
  importance::Loss loss_;
  std::vector<Instance> history_;
  std::vector<double> g_;
  std::vector<double> scratch_;
};

VarianceRow variance_point(const VarianceStudyConfig& config, double alpha,
                           std::size_t reservoir_length, std::uint64_t salt,
                           const ModelFactory& make_model,
                           const StreamFactory& make_stream) {
  const auto horizon =
      static_cast<std::uint64_t>(std::ceil(config.horizon_factor / alpha));
  const auto tail = std::max<std::uint64_t>(
      1, static_cast<std::uint64_t>(
             std::ceil(config.tail_fraction * static_cast<double>(horizon))));
  const std::uint64_t tail_start = horizon - tail;

  std::vector<learn::RunningMoments> moments;
  std::size_t d = 0;
  std::uint64_t warmup = 0;
  for (std::size_t r = 0; r < config.replications; ++r) {
    const std::uint64_t rep_seed = derive_seed(config.seed, salt * 100003 + r);
    auto stream = make_stream(config.shared_stream
                                  ? derive_seed(config.seed, 0x5eed)
                                  : derive_seed(config.seed, 0x10000 + r));
    auto model = make_model();
    d = stream->schema().arity();
    if (moments.empty()) moments.resize(tail * d);

    importance::IpfiOptions options;
    options.alpha = alpha;
    options.sampler = config.sampler;
    options.reservoir_length = reservoir_length;
    options.realizations = 1;
    options.seed = derive_seed(rep_seed, 1);
    options.init = config.init;
    importance::IpfiEnsemble ensemble(d, options);
    ExpectedIpfi expected(d, alpha, config.sampler, reservoir_length,
                          config.init);
    const bool exact = config.estimand == VarianceEstimand::kExpected;
    warmup = ensemble.warmup();

    std::uint64_t steps = 0;
    while (steps < horizon) {
      auto inst = stream->next();
      if (!inst) throw ConfigError("stream ended before the study horizon");
      if (exact ? !expected.ready() : !ensemble.ready()) {
        if (exact) {
          expected.observe(*inst);
        } else {
          ensemble.observe(*inst);
        }
      } else {
        const auto estimate = exact ? expected.step(*model, *inst)
                                    : ensemble.step(*model, *inst);
        if (steps >= tail_start) {
          auto* row = &moments[(steps - tail_start) * d];
          for (std::size_t j = 0; j < d; ++j) row[j].push(estimate[j]);
        }
        ++steps;
      }
      model->learn_one(inst->features, inst->target);
    }
  }

  VarianceRow row;
  row.alpha = alpha;
  row.sampler = config.sampler;
  row.reservoir_length = reservoir_length;
  row.horizon = horizon;
  row.mean.assign(d, 0.0);
  row.variance.assign(d, 0.0);
  for (std::uint64_t k = 0; k < tail; ++k) {
    for (std::size_t j = 0; j < d; ++j) {
      row.mean[j] += moments[k * d + j].mean;
      row.variance[j] += moments[k * d + j].variance();
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    row.mean[j] /= static_cast<double>(tail);
    row.variance[j] /= static_cast<double>(tail);
    row.total_variance += row.variance[j];
  }
  const std::uint64_t s = warmup + horizon;
  row.collision_probability = sampling::collision_probability(
      config.sampler == sampling::SamplerKind::kGeometric
          ? sampling::SamplerKind::kGeometric
          : sampling::SamplerKind::kUniformFull,
      s, reservoir_length, reservoir_length);
  row.chebyshev_bound =
      std::min(1.0, row.total_variance / (config.epsilon * config.epsilon));
  return row;
}

}  // namespace

VarianceReport run_variance_study(const VarianceStudyConfig& config,
                                  const ModelFactory& make_model,
                                  const StreamFactory& make_stream) {
  if (config.replications < 30) {
    throw ConfigError("variance study needs at least 30 replications");
  }
  if (config.alphas.empty() || config.reservoir_lengths.empty()) {
    throw ConfigError("variance study needs a non-empty alpha and L grid");
  }
  for (const double a : config.alphas) check_alpha(a);
  for (std::size_t i = 1; i < config.alphas.size(); ++i) {
    if (!(config.alphas[i] < config.alphas[i - 1])) {
      throw ConfigError("alpha grid must be strictly decreasing");
    }
  }
  for (std::size_t i = 1; i < config.reservoir_lengths.size(); ++i) {
    if (!(config.reservoir_lengths[i] > config.reservoir_lengths[i - 1])) {
      throw ConfigError("reservoir length grid must be strictly increasing");
    }
  }
  if (!(config.tail_fraction > 0.0 && config.tail_fraction <= 1.0) ||
      !(config.horizon_factor > 0.0) || !(config.epsilon > 0.0)) {
    throw ConfigError("invalid horizon, tail fraction or epsilon");
  }

  VarianceReport report;
  report.config = config;
  const std::size_t n_alpha = config.alphas.size();
  const std::size_t n_len = config.reservoir_lengths.size();
  for (std::size_t a = 0; a < n_alpha; ++a) {
    for (std::size_t l = 0; l < n_len; ++l) {
      report.rows.push_back(variance_point(
          config, config.alphas[a], config.reservoir_lengths[l],
          a * n_len + l, make_model, make_stream));
    }
  }
  auto at = [&](std::size_t a, std::size_t l) {
    return report.rows[a * n_len + l].total_variance;
  };
  for (std::size_t l = 0; l < n_len; ++l) {
    for (std::size_t a = 1; a < n_alpha; ++a) {
      if (!(at(a, l) < at(a - 1, l))) report.alpha_monotone = false;
    }
  }
  for (std::size_t a = 0; a < n_alpha; ++a) {
    for (std::size_t l = 1; l < n_len; ++l) {
      if (!(at(a, l) < at(a, l - 1))) report.length_monotone = false;
    }
  }
  return report;
}

VarianceReport run_variance_study(const VarianceStudyConfig& config) {
  return run_variance_study(
      config,
      [] { return std::make_unique<learn::FrozenOracle>(learn::agrawal_oracle(1)); },
      agrawal_iid);
}

}  // namespace driftwise::theory
