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

#include "driftwise/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

namespace driftwise::experiment {

namespace fs = std::filesystem;
using sampling::SamplerKind;

// ------------------------------------------------------------------ names

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::kA:
      return "A";
    case Experiment::kB:
      return "B";
    case Experiment::kC:
      return "C";
    case Experiment::kTheoryBias:
      return "theory-bias";
    case Experiment::kTheoryVariance:
      return "theory-variance";
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  if (name == "A" || name == "a") return Experiment::kA;
  if (name == "B" || name == "b") return Experiment::kB;
  if (name == "C" || name == "c") return Experiment::kC;
  if (name == "theory-bias") return Experiment::kTheoryBias;
  if (name == "theory-variance") return Experiment::kTheoryVariance;
  throw ConfigError("unknown experiment '" + name + "'");
}

std::string estimator_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kUniformFull:
      return "ipfi_uniform";
    case SamplerKind::kUniformReservoir:
      return "ipfi_uniform_reservoir";
    case SamplerKind::kGeometric:
      return "ipfi_geometric";
  }
  return "ipfi";
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

importance::SmoothingInit parse_init(const std::string& s) {
  if (s == "assign") return importance::SmoothingInit::kAssign;
  if (s == "zero") return importance::SmoothingInit::kZero;
  throw ConfigError("unknown smoothing init '" + s + "' (assign|zero)");
}

std::string init_name(importance::SmoothingInit init) {
  return init == importance::SmoothingInit::kZero ? "zero" : "assign";
}

// Copies json[key] into `out` if present; records the key as consumed.
template <typename T>
void read(const Json& json, const char* key, T& out,
          std::set<std::string>& seen) {
  seen.insert(key);
  if (auto it = json.find(key); it != json.end() && !it->is_null()) {
    try {
      out = it->get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

void reject_unknown(const Json& json, const std::set<std::string>& seen,
                    const std::string& where) {
  for (auto it = json.begin(); it != json.end(); ++it) {
    if (!seen.count(it.key())) {
      throw ConfigError("unknown config key '" + where + it.key() + "'");
    }
  }
}

void require_object(const Json& json, const std::string& where) {
  if (!json.is_object()) {
    throw ConfigError("config section '" + where + "' must be an object");
  }
}

std::vector<SamplerKind> parse_samplers(const Json& value) {
  std::vector<SamplerKind> out;
  if (value.is_string()) {
    out.push_back(sampling::parse_sampler_kind(value.get<std::string>()));
  } else if (value.is_array()) {
    for (const auto& v : value) {
      out.push_back(sampling::parse_sampler_kind(v.get<std::string>()));
    }
  } else {
    throw ConfigError("'samplers' must be a string or a list of strings");
  }
  return out;
}

}  // namespace

// ----------------------------------------------------------------- config

RunConfig config_from_json(const Json& json) {
  require_object(json, "");
  RunConfig c;
  std::set<std::string> seen;

  std::string experiment = to_string(c.experiment);
  read(json, "experiment", experiment, seen);
  c.experiment = parse_experiment(experiment);

  seen.insert("stream");
  if (auto it = json.find("stream"); it != json.end()) {
    require_object(*it, "stream");
    std::set<std::string> s;
    read(*it, "generator", c.stream.generator, s);
    read(*it, "concept", c.stream.concept_id, s);
    read(*it, "csv_path", c.stream.csv_path, s);
    read(*it, "target_column", c.stream.target_column, s);
    reject_unknown(*it, s, "stream.");
  }

  seen.insert("drift");
  if (auto it = json.find("drift"); it != json.end() && !it->is_null()) {
    require_object(*it, "drift");
    DriftConfig d;
    std::set<std::string> s;
    read(*it, "kind", d.kind, s);
    read(*it, "position", d.position, s);
    read(*it, "profile", d.profile, s);
    read(*it, "width", d.width, s);
    read(*it, "from_concept", d.from_concept, s);
    read(*it, "to_concept", d.to_concept, s);
    s.insert("pairs");
    if (auto p = it->find("pairs"); p != it->end()) {
      for (const auto& pair : *p) {
        if (!pair.is_array() || pair.size() != 2) {
          throw ConfigError("drift.pairs entries must be two-element lists");
        }
        auto as_text = [](const Json& v) {
          return v.is_string() ? v.get<std::string>() : v.dump();
        };
        d.pairs.emplace_back(as_text(pair[0]), as_text(pair[1]));
      }
    }
    reject_unknown(*it, s, "drift.");
    c.drift = d;
  }

  seen.insert("model");
  if (auto it = json.find("model"); it != json.end()) {
    require_object(*it, "model");
    std::set<std::string> s;
    read(*it, "kind", c.model.kind, s);
    read(*it, "concept", c.model.concept_id, s);
    read(*it, "learning_rate", c.model.learning_rate, s);
    read(*it, "l2", c.model.l2, s);
    read(*it, "laplace", c.model.laplace, s);
    read(*it, "constant", c.model.constant, s);
    reject_unknown(*it, s, "model.");
  }

  seen.insert("samplers");
  if (auto it = json.find("samplers"); it != json.end()) {
    c.samplers = parse_samplers(*it);
  }
  read(json, "reservoir_length", c.reservoir_length, seen);
  read(json, "alpha", c.alpha, seen);
  read(json, "realizations", c.realizations, seen);
  read(json, "interval", c.interval, seen);
  read(json, "interval_permutations", c.interval_permutations, seen);
  read(json, "batch_permutations", c.batch_permutations, seen);
  read(json, "shuffles", c.shuffles, seen);
  read(json, "stream_length", c.stream_length, seen);
  read(json, "seed", c.seed, seen);
  read(json, "out", c.out, seen);
  read(json, "report_every", c.report_every, seen);
  read(json, "emit_realizations", c.emit_realizations, seen);
  read(json, "accuracy_window", c.accuracy_window, seen);

  seen.insert("bias");
  if (auto it = json.find("bias"); it != json.end()) {
    require_object(*it, "bias");
    std::set<std::string> s;
    auto& b = c.bias;
    read(*it, "alpha", b.alpha, s);
    read(*it, "replications", b.replications, s);
    read(*it, "checkpoints", b.checkpoints, s);
    read(*it, "reservoir_length", b.reservoir_length, s);
    read(*it, "z_threshold", b.z_threshold, s);
    std::string sampler = sampling::to_string(b.sampler);
    read(*it, "sampler", sampler, s);
    b.sampler = sampling::parse_sampler_kind(sampler);
    std::string init = init_name(b.init);
    read(*it, "init", init, s);
    b.init = parse_init(init);
    reject_unknown(*it, s, "bias.");
  }

  seen.insert("variance");
  if (auto it = json.find("variance"); it != json.end()) {
    require_object(*it, "variance");
    std::set<std::string> s;
    auto& v = c.variance;
    read(*it, "alphas", v.alphas, s);
    read(*it, "reservoir_lengths", v.reservoir_lengths, s);
    read(*it, "replications", v.replications, s);
    read(*it, "horizon_factor", v.horizon_factor, s);
    read(*it, "tail_fraction", v.tail_fraction, s);
    read(*it, "epsilon", v.epsilon, s);
    read(*it, "shared_stream", v.shared_stream, s);
    std::string estimand =
        v.estimand == theory::VarianceEstimand::kExpected ? "expected"
                                                          : "realization";
    read(*it, "estimand", estimand, s);
    if (estimand == "expected") {
      v.estimand = theory::VarianceEstimand::kExpected;
    } else if (estimand == "realization") {
      v.estimand = theory::VarianceEstimand::kRealization;
    } else {
      throw ConfigError("unknown variance estimand '" + estimand +
                        "' (realization|expected)");
    }
    std::string sampler = sampling::to_string(v.sampler);
    read(*it, "sampler", sampler, s);
    v.sampler = sampling::parse_sampler_kind(sampler);
    std::string init = init_name(v.init);
    read(*it, "init", init, s);
    v.init = parse_init(init);
    reject_unknown(*it, s, "variance.");
  }

  reject_unknown(json, seen, "");
  c.bias.seed = c.seed;
  c.variance.seed = c.seed;
  return c;
}

Json config_to_json(const RunConfig& c) {
  Json j;
  j["experiment"] = to_string(c.experiment);
  j["stream"] = {{"generator", c.stream.generator},
                 {"concept", c.stream.concept_id},
                 {"csv_path", c.stream.csv_path},
                 {"target_column", c.stream.target_column}};
  if (c.drift) {
    Json pairs = Json::array();
    for (const auto& [a, b] : c.drift->pairs) pairs.push_back({a, b});
    j["drift"] = {{"kind", c.drift->kind},
                  {"position", c.drift->position},
                  {"profile", c.drift->profile},
                  {"width", c.drift->width},
                  {"pairs", pairs},
                  {"from_concept", c.drift->from_concept},
                  {"to_concept", c.drift->to_concept}};
  } else {
    j["drift"] = nullptr;
  }
  j["model"] = {{"kind", c.model.kind},
                {"concept", c.model.concept_id},
                {"learning_rate", c.model.learning_rate},
                {"l2", c.model.l2},
                {"laplace", c.model.laplace},
                {"constant", c.model.constant}};
  Json samplers = Json::array();
  for (auto k : c.samplers) samplers.push_back(sampling::to_string(k));
  j["samplers"] = samplers;
  j["reservoir_length"] = c.reservoir_length;
  j["alpha"] = c.alpha;
  j["realizations"] = c.realizations;
  j["interval"] = c.interval;
  j["interval_permutations"] = c.interval_permutations;
  j["batch_permutations"] = c.batch_permutations;
  j["shuffles"] = c.shuffles;
  j["stream_length"] = c.stream_length;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["report_every"] = c.report_every;
  j["emit_realizations"] = c.emit_realizations;
  j["accuracy_window"] = c.accuracy_window;
  j["bias"] = {{"alpha", c.bias.alpha},
               {"replications", c.bias.replications},
               {"checkpoints", c.bias.checkpoints},
               {"sampler", sampling::to_string(c.bias.sampler)},
               {"reservoir_length", c.bias.reservoir_length},
               {"init", init_name(c.bias.init)},
               {"z_threshold", c.bias.z_threshold}};
  j["variance"] = {{"sampler", sampling::to_string(c.variance.sampler)},
                   {"alphas", c.variance.alphas},
                   {"reservoir_lengths", c.variance.reservoir_lengths},
                   {"replications", c.variance.replications},
                   {"horizon_factor", c.variance.horizon_factor},
                   {"tail_fraction", c.variance.tail_fraction},
                   {"init", init_name(c.variance.init)},
                   {"epsilon", c.variance.epsilon},
                   {"shared_stream", c.variance.shared_stream},
                   {"estimand", c.variance.estimand ==
                                        theory::VarianceEstimand::kExpected
                                    ? "expected"
                                    : "realization"}};
  return j;
}

void apply_override(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got '" +
                                 assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;

  Json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    if (!node->contains(key) || !(*node)[key].is_object()) {
      (*node)[key] = Json::object();
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json json;
  try {
    json = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " +
                      e.what());
  }
  return config_from_json(json);
}

namespace {

// Checks shared by every experiment kind.
void validate_common(const RunConfig& c) {
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) {
    throw ConfigError("alpha must lie strictly inside (0, 1)");
  }
  if (c.realizations < 1) throw ConfigError("realizations must be >= 1");
  if (c.stream_length < 1) throw ConfigError("stream_length must be >= 1");
  if (c.samplers.empty()) throw ConfigError("need at least one sampler");
  if (c.reservoir_length < 1) throw ConfigError("reservoir_length must be >= 1");
  if (c.report_every < 1) throw ConfigError("report_every must be >= 1");
  if (c.accuracy_window < 1) throw ConfigError("accuracy_window must be >= 1");
  if (c.stream.generator == "csv") {
    if (c.stream.csv_path.empty() || !fs::exists(c.stream.csv_path)) {
      throw ConfigError("CSV file '" + c.stream.csv_path + "' does not exist");
    }
  } else if (c.stream.generator != "agrawal" &&
             c.stream.generator != "stagger") {
    throw ConfigError("unknown generator '" + c.stream.generator + "'");
  }
}

}  // namespace

void validate(const RunConfig& c) {
  validate_common(c);
  switch (c.experiment) {
    case Experiment::kA:
      if (c.drift) {
        throw ConfigError("experiment A explains a static model; remove drift");
      }
      if (c.shuffles < 1 || c.batch_permutations < 1) {
        throw ConfigError("shuffles and batch_permutations must be >= 1");
      }
      if (c.stream_length < 2) {
        throw ConfigError("experiment A needs at least two observations");
      }
      break;
    case Experiment::kB:
    case Experiment::kC:
      if (!c.drift) {
        throw ConfigError("experiment " + to_string(c.experiment) +
                          " needs a drift specification");
      }
      if (c.experiment == Experiment::kC && c.drift->kind != "feature_swap") {
        throw ConfigError("experiment C needs a feature_swap drift");
      }
      if (c.interval < 2 || c.interval_permutations < 1) {
        throw ConfigError("interval must be >= 2 and permutations >= 1");
      }
      break;
    case Experiment::kTheoryBias:
    case Experiment::kTheoryVariance:
      break;
  }
}

// ----------------------------------------------------------------- builders

stream::DriftSpec resolve_drift(const DriftConfig& d, const Schema& schema) {
  stream::DriftSpec spec;
  spec.position = d.position;
  if (d.profile == "sudden") {
    spec.profile = stream::Sudden{};
  } else if (d.profile == "gradual") {
    spec.profile = stream::Gradual{d.width};
  } else {
    throw ConfigError("unknown drift profile '" + d.profile + "'");
  }
  auto index = [&schema](const std::string& ref) -> std::size_t {
    for (std::size_t j = 0; j < schema.arity(); ++j) {
      if (schema.feature(j).name == ref) return j;
    }
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(ref.data(), ref.data() + ref.size(), value);
    if (ec != std::errc() || ptr != ref.data() + ref.size()) {
      throw ConfigError("unknown feature '" + ref + "' in drift.pairs");
    }
    return value;
  };
  if (d.kind == "feature_swap") {
    stream::FeatureSwap swap;
    for (const auto& [a, b] : d.pairs) swap.pairs.emplace_back(index(a), index(b));
    spec.kind = swap;
  } else if (d.kind == "function_switch") {
    spec.kind = stream::FunctionSwitch{d.from_concept, d.to_concept};
  } else {
    throw ConfigError("unknown drift kind '" + d.kind + "'");
  }
  stream::validate_drift(spec, schema);
  return spec;
}

std::unique_ptr<stream::Stream> make_stream(const RunConfig& c) {
  std::unique_ptr<stream::Stream> base;
  const std::uint64_t seed = derive_seed(c.seed, 1);
  if (c.stream.generator == "agrawal") {
    base = std::make_unique<stream::AgrawalStream>(seed, c.stream.concept_id);
  } else if (c.stream.generator == "stagger") {
    base = std::make_unique<stream::StaggerStream>(seed, c.stream.concept_id);
  } else if (c.stream.generator == "csv") {
    stream::CsvOptions options;
    options.target_column = c.stream.target_column;
    base = stream::csv_stream(c.stream.csv_path, options);
  } else {
    throw ConfigError("unknown generator '" + c.stream.generator + "'");
  }
  if (!c.drift) return base;
  const auto spec = resolve_drift(*c.drift, base->schema());
  return stream::apply_drift(std::move(base), spec, derive_seed(c.seed, 2));
}

std::unique_ptr<learn::Model> make_model(const RunConfig& c,
                                         const Schema& schema) {
  const auto& kind = c.model.kind;
  if (kind == "oracle") {
    if (c.stream.generator == "agrawal") {
      return std::make_unique<learn::FrozenOracle>(
          learn::agrawal_oracle(c.model.concept_id));
    }
    if (c.stream.generator == "stagger") {
      return std::make_unique<learn::FrozenOracle>(
          learn::stagger_oracle(c.model.concept_id));
    }
    throw ConfigError("oracle models exist only for generated streams");
  }
  if (kind == "constant") {
    return std::make_unique<learn::FrozenOracle>(
        learn::constant_model(schema.arity(), c.model.constant));
  }
  if (kind == "naive_bayes") {
    return std::make_unique<learn::OnlineNaiveBayes>(schema, c.model.laplace);
  }
  if (kind == "logistic_regression") {
    return std::make_unique<learn::OnlineLogisticRegression>(
        schema, learn::LogisticOptions{c.model.learning_rate, c.model.l2});
  }
  throw ConfigError("unknown model kind '" + kind + "'");
}

// ------------------------------------------------------------- statistics

ErrorSummary summarize(std::vector<double> values, std::size_t undefined) {
  ErrorSummary s;
  s.count = values.size();
  s.undefined = undefined;
  if (values.empty()) {
    s.median = s.q1 = s.q3 = s.iqr = std::nan("");
    return s;
  }
  std::sort(values.begin(), values.end());
  auto quantile = [&values](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  s.median = quantile(0.5);
  s.q1 = quantile(0.25);
  s.q3 = quantile(0.75);
  s.iqr = s.q3 - s.q1;
  return s;
}

namespace {

std::size_t argmax(const ImportanceVector& v) {
  return static_cast<std::size_t>(
      std::max_element(v.begin(), v.end()) - v.begin());
}

std::uint64_t ensemble_seed(const RunConfig& c, SamplerKind kind,
                            std::uint64_t salt = 0) {
  return derive_seed(c.seed, 1000 + 16 * salt + static_cast<std::uint64_t>(kind));
}

importance::IpfiOptions ipfi_options(const RunConfig& c, SamplerKind kind,
                                     std::uint64_t salt = 0) {
  importance::IpfiOptions o;
  o.alpha = c.alpha;
  o.sampler = kind;
  o.reservoir_length = c.reservoir_length;
  o.realizations = c.realizations;
  o.seed = ensemble_seed(c, kind, salt);
  return o;
}

void append_rows(std::vector<ImportanceRow>& rows, std::uint64_t t,
                 const std::string& estimator,
                 const importance::IpfiEnsemble& ensemble,
                 bool emit_realizations) {
  const auto mean = ensemble.estimate();
  if (!mean) return;
  for (std::size_t j = 0; j < mean->size(); ++j) {
    rows.push_back({t, j, estimator, -1, (*mean)[j]});
    if (!emit_realizations) continue;
    for (std::size_t m = 0; m < ensemble.realizations(); ++m) {
      rows.push_back({t, j, estimator, static_cast<long>(m),
                      (*ensemble.realization_estimate(m))[j]});
    }
  }
}

}  // namespace

// ------------------------------------------------------------ experiment A

ExperimentAResult run_experiment_a(const RunConfig& config) {
  RunConfig c = config;
  c.experiment = Experiment::kA;
  validate(c);
  auto stream = make_stream(c);
  const Schema schema = stream->schema();
  const auto data = stream::take(*stream, c.stream_length);
  if (data.size() < 2) throw ConfigError("dataset has fewer than two rows");

  // Static model: an oracle, or a learner pre-trained on the dataset and
  // frozen before it is explained.
  auto trained = make_model(c, schema);
  for (const auto& inst : data) trained->learn_one(inst.features, inst.target);
  const auto model = learn::snapshot(*trained);

  ExperimentAResult result;
  result.feature_names = schema.names();
  result.samplers = c.samplers;
  result.errors.assign(c.samplers.size(), {});
  std::vector<std::size_t> undefined(c.samplers.size(), 0);

  for (std::size_t shuffle = 0; shuffle < c.shuffles; ++shuffle) {
    Rng order_rng(derive_seed(c.seed, 3000 + shuffle));
    const auto order = importance::random_permutation(data.size(), order_rng);
    std::vector<Instance> shuffled;
    shuffled.reserve(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      shuffled.push_back(data[order[i]]);
      shuffled.back().timestamp = i;
    }

    Rng batch_rng(derive_seed(c.seed, 4000 + shuffle));
    const auto batch = importance::batch_pfi_all(
        *model, shuffled, c.batch_permutations, batch_rng);
    if (shuffle == 0) result.batch = batch;

    for (std::size_t k = 0; k < c.samplers.size(); ++k) {
      importance::IpfiEnsemble ensemble(
          schema.arity(), ipfi_options(c, c.samplers[k], shuffle));
      const auto estimator = estimator_name(c.samplers[k]);
      for (const auto& inst : shuffled) {
        ensemble.explain_one(*model, inst);
        const bool report = (inst.timestamp + 1) % c.report_every == 0 ||
                            inst.timestamp + 1 == shuffled.size();
        if (shuffle == 0 && report) {
          append_rows(result.rows, inst.timestamp, estimator, ensemble,
                      c.emit_realizations);
        }
      }
      const auto final_estimate = ensemble.estimate();
      if (!final_estimate) {
        throw ConfigError("dataset shorter than the sampler warm-up");
      }
      if (shuffle == 0) result.final_ipfi.push_back(*final_estimate);
      if (auto e = importance::normalized_error(*final_estimate, batch)) {
        result.errors[k].push_back(*e);
      } else {
        ++undefined[k];
      }
    }
  }
  // Group shuffle-0 rows by time so both samplers interleave per step.
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [](const ImportanceRow& a, const ImportanceRow& b) {
                     return a.t < b.t;
                   });
  for (std::size_t k = 0; k < c.samplers.size(); ++k) {
    result.summaries.push_back(summarize(result.errors[k], undefined[k]));
  }
  return result;
}

// ------------------------------------------------------ prequential (B, C)

std::uint64_t longest_top_deviation(const std::vector<ImportanceVector>& series,
                                    std::uint64_t from) {
  if (from >= series.size() || series[from].empty()) return 0;
  const std::size_t reference = argmax(series[from]);
  std::uint64_t longest = 0;
  std::uint64_t run = 0;
  for (std::uint64_t t = from; t < series.size(); ++t) {
    if (!series[t].empty() && argmax(series[t]) != reference) {
      longest = std::max(longest, ++run);
    } else {
      run = 0;
    }
  }
  return longest;
}

PrequentialResult run_prequential(const RunConfig& c, const Trace& trace) {
  validate_common(c);
  if (c.interval < 2 || c.interval_permutations < 1) {
    throw ConfigError("interval must be >= 2 and permutations >= 1");
  }
  auto stream = make_stream(c);
  const Schema schema = stream->schema();
  auto model = make_model(c, schema);
  const std::size_t d = schema.arity();

  PrequentialResult result;
  result.feature_names = schema.names();
  result.samplers = c.samplers;
  std::vector<importance::IpfiEnsemble> ensembles;
  for (auto kind : c.samplers) ensembles.emplace_back(d, ipfi_options(c, kind));
  result.ipfi.assign(c.samplers.size(), {});
  importance::IntervalPfi interval(c.interval, c.interval_permutations,
                                   derive_seed(c.seed, 2000));

  std::deque<double> window;
  double window_sum = 0.0;
  const bool binary = schema.target_kind() == TargetKind::kBinary;

  std::uint64_t t = 0;
  for (; t < c.stream_length; ++t) {
    auto inst = stream->next();
    if (!inst) break;
    inst->timestamp = t;

    // Prequential score: accuracy (binary) or absolute error (regression).
    const double prediction = model->predict(inst->features);
    const double score =
        binary ? ((prediction >= 0.5) == (inst->target == 1.0) ? 1.0 : 0.0)
               : std::abs(prediction - inst->target);
    window.push_back(score);
    window_sum += score;
    if (window.size() > c.accuracy_window) {
      window_sum -= window.front();
      window.pop_front();
    }

    if (trace) trace(TraceEvent::kExplain, t);
    const bool report = (t + 1) % c.report_every == 0;
    for (std::size_t k = 0; k < ensembles.size(); ++k) {
      auto estimate = ensembles[k].explain_one(*model, *inst);
      result.ipfi[k].push_back(estimate ? std::move(*estimate)
                                        : ImportanceVector{});
      if (report) {
        append_rows(result.rows, t, estimator_name(c.samplers[k]),
                    ensembles[k], c.emit_realizations);
      }
    }
    if (auto point = interval.observe(*model, *inst)) {
      for (std::size_t j = 0; j < d; ++j) {
        result.rows.push_back({point->t, j, "interval_pfi", -1,
                               point->values[j]});
      }
      result.interval.push_back(std::move(*point));
    }
    if (trace) trace(TraceEvent::kLearn, t);
    model->learn_one(inst->features, inst->target);

    if ((t + 1) % c.accuracy_window == 0) {
      result.rolling_accuracy.emplace_back(
          t, window_sum / static_cast<double>(window.size()));
    }
  }
  result.steps = t;
  if (t > 0 && t % c.report_every != 0) {
    for (std::size_t k = 0; k < ensembles.size(); ++k) {
      append_rows(result.rows, t - 1, estimator_name(c.samplers[k]),
                  ensembles[k], c.emit_realizations);
    }
  }

  std::optional<stream::DriftSpec> drift;
  if (c.drift) {
    drift = resolve_drift(*c.drift, schema);
    result.drift_position = drift->position;
  }

  // Errors against interval PFI at every window boundary.
  for (std::size_t k = 0; k < c.samplers.size(); ++k) {
    std::vector<std::optional<double>> errors;
    std::vector<double> whole, pre, post;
    std::size_t undefined_whole = 0, undefined_pre = 0, undefined_post = 0;
    for (const auto& point : result.interval) {
      const auto& estimate = result.ipfi[k][point.t];
      std::optional<double> e;
      if (!estimate.empty()) e = importance::normalized_error(estimate, point.values);
      errors.push_back(e);
      const std::uint64_t start = point.t + 1 - c.interval;
      const bool is_pre = drift && point.t < drift->position;
      const bool is_post = drift && start >= drift->position;
      if (e) {
        whole.push_back(*e);
        if (is_pre) pre.push_back(*e);
        if (is_post) post.push_back(*e);
      } else {
        ++undefined_whole;
        undefined_pre += is_pre;
        undefined_post += is_post;
      }
    }
    result.interval_errors.push_back(std::move(errors));
    result.error_whole.push_back(summarize(whole, undefined_whole));
    result.error_pre_drift.push_back(summarize(pre, undefined_pre));
    result.error_post_drift.push_back(summarize(post, undefined_post));
  }

  // Rank-1 feature changes.
  for (std::size_t k = 0; k < c.samplers.size(); ++k) {
    std::vector<TopFeatureChange> changes;
    std::optional<std::size_t> top;
    for (std::uint64_t s = 0; s < result.steps; ++s) {
      const auto& v = result.ipfi[k][s];
      if (v.empty()) continue;
      const auto now = argmax(v);
      if (!top || *top != now) changes.push_back({s, now});
      top = now;
    }
    result.top_changes.push_back(std::move(changes));
  }

  // Reaction times after the drift.
  if (drift && drift->position > 0 && drift->position < result.steps) {
    const auto pos = drift->position;
    for (std::size_t k = 0; k < c.samplers.size(); ++k) {
      const auto& series = result.ipfi[k];
      const auto& before = series[pos - 1];
      if (before.empty()) continue;
      if (const auto* swap = std::get_if<stream::FeatureSwap>(&drift->kind)) {
        for (const auto& [a, b] : swap->pairs) {
          const std::size_t out = before[a] >= before[b] ? a : b;
          const std::size_t in = out == a ? b : a;
          Reaction r{c.samplers[k],
                     result.feature_names[in] + " overtakes " +
                         result.feature_names[out],
                     std::nullopt};
          for (std::uint64_t s = pos; s < result.steps; ++s) {
            if (series[s][in] > series[s][out]) {
              r.steps = s - pos;
              break;
            }
          }
          result.reactions.push_back(std::move(r));
        }
      } else {
        const std::size_t top = argmax(before);
        Reaction r{c.samplers[k],
                   "rank-1 feature changes from " + result.feature_names[top],
                   std::nullopt};
        for (std::uint64_t s = pos; s < result.steps; ++s) {
          if (argmax(series[s]) != top) {
            r.steps = s - pos;
            break;
          }
        }
        result.reactions.push_back(std::move(r));
      }
    }
  }
  return result;
}

PrequentialResult run_experiment_b(const RunConfig& config) {
  RunConfig c = config;
  c.experiment = Experiment::kB;
  validate(c);
  return run_prequential(c);
}

PrequentialResult run_experiment_c(const RunConfig& config) {
  RunConfig c = config;
  c.experiment = Experiment::kC;
  validate(c);
  return run_prequential(c);
}

// ---------------------------------------------------------------- outputs

void write_importance_csv(const std::string& path,
                          const std::vector<std::string>& feature_names,
                          const std::vector<ImportanceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "t,feature,estimator,realization,value\n";
  for (const auto& r : rows) {
    out << r.t << ',' << feature_names.at(r.feature) << ',' << r.estimator
        << ',';
    if (r.realization < 0) {
      out << "mean";
    } else {
      out << r.realization;
    }
    out << ',' << format_double(r.value) << '\n';
  }
}

namespace {

Json to_json(const ErrorSummary& s) {
  auto num = [](double v) { return std::isnan(v) ? Json(nullptr) : Json(v); };
  return {{"median", num(s.median)}, {"iqr", num(s.iqr)}, {"q1", num(s.q1)},
          {"q3", num(s.q3)},         {"count", s.count},  {"undefined", s.undefined}};
}

Json named_vector(const std::vector<std::string>& names,
                  const ImportanceVector& v) {
  Json j = Json::object();
  for (std::size_t i = 0; i < v.size(); ++i) j[names[i]] = v[i];
  return j;
}

}  // namespace

Json summary_json(const RunConfig& config, const ExperimentAResult& r) {
  Json j;
  j["experiment"] = "A";
  j["seed"] = config.seed;
  j["features"] = r.feature_names;
  Json errors = Json::object();
  Json finals = Json::object();
  for (std::size_t k = 0; k < r.samplers.size(); ++k) {
    Json e = to_json(r.summaries[k]);
    e["values"] = r.errors[k];
    errors[sampling::to_string(r.samplers[k])] = e;
    finals[estimator_name(r.samplers[k])] =
        named_vector(r.feature_names, r.final_ipfi[k]);
  }
  j["normalized_error"] = errors;
  j["final_ipfi"] = finals;
  j["batch_pfi"] = named_vector(r.feature_names, r.batch);
  return j;
}

Json summary_json(const RunConfig& config, const PrequentialResult& r) {
  Json j;
  j["experiment"] = to_string(config.experiment);
  j["seed"] = config.seed;
  j["steps"] = r.steps;
  j["drift_position"] =
      r.drift_position ? Json(*r.drift_position) : Json(nullptr);
  j["features"] = r.feature_names;
  Json errors = Json::object();
  Json finals = Json::object();
  Json changes = Json::object();
  for (std::size_t k = 0; k < r.samplers.size(); ++k) {
    errors[sampling::to_string(r.samplers[k])] = {
        {"whole", to_json(r.error_whole[k])},
        {"pre_drift", to_json(r.error_pre_drift[k])},
        {"post_drift", to_json(r.error_post_drift[k])}};
    const auto& series = r.ipfi[k];
    if (!series.empty() && !series.back().empty()) {
      finals[estimator_name(r.samplers[k])] =
          named_vector(r.feature_names, series.back());
    }
    changes[sampling::to_string(r.samplers[k])] = r.top_changes[k].size();
  }
  j["normalized_error"] = errors;
  Json reactions = Json::array();
  for (const auto& re : r.reactions) {
    reactions.push_back({{"sampler", sampling::to_string(re.sampler)},
                         {"event", re.description},
                         {"steps", re.steps ? Json(*re.steps) : Json(nullptr)}});
  }
  j["drift_reaction"] = reactions;
  j["top_feature_changes"] = changes;
  j["final_ipfi"] = finals;
  j["interval_points"] = r.interval.size();
  Json accuracy = Json::array();
  for (const auto& [t, a] : r.rolling_accuracy) accuracy.push_back({t, a});
  j["rolling_accuracy"] = accuracy;
  return j;
}

Json summary_json(const theory::BiasReport& report,
                  const std::vector<std::string>& names) {
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"steps", row.steps},
                    {"feature", names.at(row.feature)},
                    {"mean", row.mean},
                    {"expected", row.expected},
                    {"standard_error", row.standard_error},
                    {"z", row.z},
                    {"within", row.within}});
  }
  return {{"experiment", "theory-bias"},
          {"alpha", report.config.alpha},
          {"replications", report.config.replications},
          {"init", init_name(report.config.init)},
          {"max_abs_z", report.max_abs_z},
          {"passed", report.passed},
          {"rows", rows}};
}

Json summary_json(const theory::VarianceReport& report,
                  const std::vector<std::string>&) {
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"alpha", row.alpha},
                    {"sampler", sampling::to_string(row.sampler)},
                    {"L", row.reservoir_length},
                    {"horizon", row.horizon},
                    {"total_variance", row.total_variance},
                    {"collision_probability", row.collision_probability},
                    {"chebyshev_bound", row.chebyshev_bound}});
  }
  return {{"experiment", "theory-variance"},
          {"replications", report.config.replications},
          {"epsilon", report.config.epsilon},
          {"alpha_monotone", report.alpha_monotone},
          {"length_monotone", report.length_monotone},
          {"rows", rows}};
}

void write_study_csv(const std::string& path,
                     const std::vector<std::string>& names,
                     const theory::BiasReport& report) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "alpha,sampler,L,checkpoint,feature,mean,variance,analytic_bias\n";
  for (const auto& row : report.rows) {
    out << format_double(report.config.alpha) << ','
        << sampling::to_string(report.config.sampler) << ','
        << report.config.reservoir_length << ',' << row.steps << ','
        << names.at(row.feature) << ',' << format_double(row.mean) << ','
        << format_double(row.variance) << ','
        << format_double(row.analytic_bias) << '\n';
  }
}

void write_study_csv(const std::string& path,
                     const std::vector<std::string>& names,
                     const theory::VarianceReport& report) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "alpha,sampler,L,checkpoint,feature,mean,variance,analytic_bias\n";
  const auto truth = theory::agrawal_ground_truth(1);
  for (const auto& row : report.rows) {
    for (std::size_t j = 0; j < row.mean.size(); ++j) {
      const double bias =
          report.config.init == importance::SmoothingInit::kZero
              ? theory::static_bias(row.alpha, row.horizon, truth[j])
              : 0.0;
      out << format_double(row.alpha) << ','
          << sampling::to_string(row.sampler) << ',' << row.reservoir_length
          << ',' << row.horizon << ',' << names.at(j) << ','
          << format_double(row.mean[j]) << ','
          << format_double(row.variance[j]) << ',' << format_double(bias)
          << '\n';
    }
  }
}

Json run_and_write(const RunConfig& config) {
  validate(config);
  fs::create_directories(config.out);
  const fs::path out(config.out);
  Json summary;
  switch (config.experiment) {
    case Experiment::kA: {
      const auto result = run_experiment_a(config);
      write_importance_csv((out / "importance.csv").string(),
                           result.feature_names, result.rows);
      summary = summary_json(config, result);
      break;
    }
    case Experiment::kB:
    case Experiment::kC: {
      const auto result = config.experiment == Experiment::kB
                              ? run_experiment_b(config)
                              : run_experiment_c(config);
      write_importance_csv((out / "importance.csv").string(),
                           result.feature_names, result.rows);
      summary = summary_json(config, result);
      break;
    }
    case Experiment::kTheoryBias: {
      auto bias = config.bias;
      bias.seed = config.seed;
      const auto report = theory::run_bias_study(bias);
      const auto names = stream::agrawal_schema().names();
      write_study_csv((out / "study.csv").string(), names, report);
      summary = summary_json(report, names);
      break;
    }
    case Experiment::kTheoryVariance: {
      auto variance = config.variance;
      variance.seed = config.seed;
      const auto report = theory::run_variance_study(variance);
      const auto names = stream::agrawal_schema().names();
      write_study_csv((out / "study.csv").string(), names, report);
      summary = summary_json(report, names);
      break;
    }
  }
  std::ofstream(out / "summary.json") << summary.dump(2) << '\n';
  return summary;
}

// ------------------------------------------------------------ verification

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  std::vector<CheckResult> checks;
  auto add = [&checks](std::string name, bool passed, std::string detail) {
    checks.push_back({std::move(name), passed, std::move(detail)});
  };

  // Scaled permutation average over all N! permutations vs model reliance.
  {
    Rng rng(derive_seed(seed, 1));
    const learn::FrozenOracle model(
        3,
        [](std::span<const double> x) {
          return 1.0 / (1.0 + std::exp(-(1.5 * x[0] - 2.0 * x[1] + 0.5 * x[2])));
        },
        "smooth");
    double worst = 0.0;
    for (std::size_t n = 2; n <= 6; ++n) {
      std::vector<Instance> data(n);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (auto& inst : data) {
        inst.features = {u(rng), u(rng), u(rng)};
        inst.target = u(rng) > 0 ? 1.0 : 0.0;
      }
      for (std::size_t j = 0; j < 3; ++j) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        double sum = 0.0;
        double count = 0.0;
        do {
          sum += importance::permutation_pfi(model, data, perm, j);
          count += 1.0;
        } while (std::next_permutation(perm.begin(), perm.end()));
        const double nn = static_cast<double>(n);
        const double scaled = nn / (nn - 1.0) * sum / count;
        worst = std::max(worst,
                         std::abs(scaled - importance::expected_pfi(model, data, j)));
      }
    }
    add("permutation_expectation", worst <= 1e-10,
        "max |scaled mean over all permutations - expected PFI| = " +
            format_double(worst));
  }

  // Collision probabilities against direct summation.
  {
    double worst = 0.0;
    double worst_sum = 0.0;
    for (std::size_t L : {2, 4, 10, 100}) {
      for (std::uint64_t s = L; s <= 200; ++s) {
        double direct = 0.0;
        double total = 0.0;
        for (std::uint64_t r = 0; r < s; ++r) {
          const double p =
              sampling::marginal_probability(SamplerKind::kGeometric, s, r, L, L);
          direct += p * p;
          total += p;
        }
        worst = std::max(worst, std::abs(direct - sampling::collision_probability(
                                                      SamplerKind::kGeometric, s, L, L)));
        worst_sum = std::max(worst_sum, std::abs(total - 1.0));
      }
    }
    for (std::uint64_t s = 1; s <= 200; ++s) {
      double direct = 0.0;
      for (std::uint64_t r = 0; r < s; ++r) {
        const double p =
            sampling::marginal_probability(SamplerKind::kUniformFull, s, r, 1, 1);
        direct += p * p;
      }
      worst = std::max(worst, std::abs(direct - sampling::collision_probability(
                                                    SamplerKind::kUniformFull, s, 1, 1)));
    }
    add("collision_probability", worst <= 1e-12 && worst_sum <= 1e-12,
        "max deviation " + format_double(worst) + ", marginal sum deviation " +
            format_double(worst_sum));
  }

  // Closed-form ground truth against the empirical model reliance.
  {
    const auto truth = theory::agrawal_ground_truth(1);
    Rng rng(derive_seed(seed, 2));
    std::vector<Instance> data;
    for (int i = 0; i < 3000; ++i) data.push_back(stream::agrawal_next(rng, 1, i));
    const auto oracle = learn::agrawal_oracle(1);
    const double age = importance::expected_pfi(oracle, data, stream::agrawal::kAge);
    const double salary =
        importance::expected_pfi(oracle, data, stream::agrawal::kSalary);
    const bool ok = std::abs(age - truth[stream::agrawal::kAge]) <= 0.03 &&
                    std::abs(salary - truth[stream::agrawal::kSalary]) <= 0.03;
    add("agrawal_ground_truth", ok,
        "age " + format_double(age) + " vs " +
            format_double(truth[stream::agrawal::kAge]) + ", salary " +
            format_double(salary) + " vs " +
            format_double(truth[stream::agrawal::kSalary]));
  }

  // Static-model bias curve.
  {
    theory::BiasStudyConfig config;
    config.checkpoints = {50, 100, 460};
    config.seed = derive_seed(seed, 3);
    const auto report = theory::run_bias_study(config);
    add("static_bias", report.passed,
        "max |z| = " + format_double(report.max_abs_z));
  }

  // Variance ordering in alpha (uniform) and in p = 1/L (geometric).
  {
    theory::VarianceStudyConfig config;
    config.seed = derive_seed(seed, 4);
    const auto report = theory::run_variance_study(config);
    add("variance_alpha_order", report.alpha_monotone,
        "uniform sampler, alpha grid 0.05 > 0.02 > 0.01 > 0.005");

    theory::VarianceStudyConfig geo;
    geo.sampler = SamplerKind::kGeometric;
    geo.reservoir_lengths = {2, 8, 32};
    geo.alphas = {0.05};
    geo.estimand = theory::VarianceEstimand::kExpected;
    geo.seed = derive_seed(seed, 5);
    const auto geo_report = theory::run_variance_study(geo);
    add("variance_length_order", geo_report.length_monotone,
        "geometric sampler, sampler-averaged estimate, alpha 0.05, L grid "
        "2 < 8 < 32");
  }
  return checks;
}

}  // namespace driftwise::experiment
