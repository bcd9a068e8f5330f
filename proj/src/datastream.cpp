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

#include "driftwise/datastream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace driftwise::stream {

double Stream::relabel(std::span<const double>, int) const {
  throw ConfigError("stream has no labeling function to switch concepts");
}

std::vector<Instance> take(Stream& stream, std::size_t n) {
  std::vector<Instance> out;
  out.reserve(n);
  while (out.size() < n) {
    auto inst = stream.next();
    if (!inst) break;
    out.push_back(std::move(*inst));
  }
  return out;
}

// ---------------------------------------------------------------- agrawal

namespace {

void check_agrawal_concept(int concept_id) {
  if (concept_id < 1 || concept_id > 3) {
    throw ConfigError("agrawal concept must be 1, 2 or 3, got " +
                      std::to_string(concept_id));
  }
}

bool in_range(double v, double lo, double hi) { return lo <= v && v <= hi; }

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

FeatureSpec numeric(std::string name, double lo, double hi) {
  FeatureSpec f;
  f.name = std::move(name);
  f.kind = FeatureKind::kNumeric;
  f.min = lo;
  f.max = hi;
  return f;
}

FeatureSpec categorical(std::string name, std::vector<std::string> levels) {
  FeatureSpec f;
  f.name = std::move(name);
  f.kind = FeatureKind::kCategorical;
  f.cardinality = levels.size();
  f.levels = std::move(levels);
  return f;
}

std::vector<std::string> numbered_levels(int first, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(std::to_string(first + i));
  return out;
}

}  // namespace

const Schema& agrawal_schema() {
  static const Schema schema(
      {
          numeric("salary", 20.0, 150.0),
          numeric("commission", 0.0, 75.0),
          numeric("age", 20.0, 80.0),
          categorical("elevel", numbered_levels(0, 5)),
          categorical("car", numbered_levels(1, 20)),
          categorical("zipcode", numbered_levels(0, 9)),
          numeric("hvalue", 0.0, 1350.0),
          numeric("hyears", 1.0, 30.0),
          numeric("loan", 0.0, 500.0),
      },
      TargetKind::kBinary);
  return schema;
}

double agrawal_label(std::span<const double> x, int concept_id) {
  check_agrawal_concept(concept_id);
  if (x.size() != agrawal::kArity) {
    throw SchemaError("agrawal instance needs 9 features");
  }
  const double salary = x[agrawal::kSalary];
  const double age = x[agrawal::kAge];
  const int elevel = static_cast<int>(x[agrawal::kElevel]);
  bool group_a = false;
  switch (concept_id) {
    case 1:
      if (age < 40) {
        group_a = in_range(salary, 50, 100);
      } else if (age < 60) {
        group_a = in_range(salary, 75, 125);
      } else {
        group_a = in_range(salary, 25, 75);
      }
      break;
    case 2:
      if (age < 40) {
        group_a = elevel == 0 || elevel == 1;
      } else if (age < 60) {
        group_a = elevel >= 1 && elevel <= 3;
      } else {
        group_a = elevel >= 2 && elevel <= 4;
      }
      break;
    case 3:
      if (age < 40) {
        group_a = (elevel == 0 || elevel == 1) ? in_range(salary, 25, 75)
                                               : in_range(salary, 50, 100);
      } else if (age < 60) {
        group_a = (elevel >= 1 && elevel <= 3) ? in_range(salary, 50, 100)
                                               : in_range(salary, 75, 125);
      } else {
        group_a = (elevel >= 2 && elevel <= 4) ? in_range(salary, 50, 100)
                                               : in_range(salary, 25, 75);
      }
      break;
  }
  return group_a ? 1.0 : 0.0;
}

Instance agrawal_next(Rng& rng, int concept_id, std::uint64_t timestamp) {
  check_agrawal_concept(concept_id);
  Instance inst;
  inst.timestamp = timestamp;
  auto& x = inst.features;
  x.resize(agrawal::kArity);
  x[agrawal::kSalary] = uniform(rng, 20.0, 150.0);
  x[agrawal::kCommission] =
      x[agrawal::kSalary] >= 75.0 ? 0.0 : uniform(rng, 10.0, 75.0);
  x[agrawal::kAge] = uniform(rng, 20.0, 80.0);
  x[agrawal::kElevel] = uniform_int(rng, 0, 4);
  x[agrawal::kCar] = uniform_int(rng, 0, 19);
  x[agrawal::kZipcode] = uniform_int(rng, 0, 8);
  x[agrawal::kHvalue] =
      (9.0 - x[agrawal::kZipcode]) * 100.0 * uniform(rng, 0.5, 1.5);
  x[agrawal::kHyears] = uniform_int(rng, 1, 30);
  x[agrawal::kLoan] = uniform(rng, 0.0, 500.0);
  inst.target = agrawal_label(x, concept_id);
  return inst;
}

AgrawalStream::AgrawalStream(std::uint64_t seed, int concept_id)
    : rng_(seed), concept_(concept_id) {
  check_agrawal_concept(concept_id);
}

std::optional<Instance> AgrawalStream::next() {
  return agrawal_next(rng_, concept_, t_++);
}

double AgrawalStream::relabel(std::span<const double> x,
                              int concept_id) const {
  return agrawal_label(x, concept_id);
}

// ---------------------------------------------------------------- stagger

namespace {

void check_stagger_concept(int concept_id) {
  if (concept_id < 1 || concept_id > 3) {
    throw ConfigError("stagger concept must be 1, 2 or 3, got " +
                      std::to_string(concept_id));
  }
}

}  // namespace

const Schema& stagger_schema() {
  static const Schema schema(
      {
          categorical("shape", {"circle", "square", "triangle"}),
          categorical("size", {"small", "medium", "large"}),
          categorical("color", {"red", "green", "blue"}),
      },
      TargetKind::kBinary);
  return schema;
}

double stagger_label(std::span<const double> x, int concept_id) {
  check_stagger_concept(concept_id);
  if (x.size() != 3) throw SchemaError("stagger instance needs 3 features");
  const int shape = static_cast<int>(x[stagger::kShape]);
  const int size = static_cast<int>(x[stagger::kSize]);
  const int color = static_cast<int>(x[stagger::kColor]);
  bool positive = false;
  switch (concept_id) {
    case 1:
      positive = size == 0 && color == 0;
      break;
    case 2:
      positive = color == 1 || shape == 0;
      break;
    case 3:
      positive = size == 1 || size == 2;
      break;
  }
  return positive ? 1.0 : 0.0;
}

Instance stagger_next(Rng& rng, int concept_id, std::uint64_t timestamp) {
  check_stagger_concept(concept_id);
  Instance inst;
  inst.timestamp = timestamp;
  inst.features = {static_cast<double>(uniform_int(rng, 0, 2)),
                   static_cast<double>(uniform_int(rng, 0, 2)),
                   static_cast<double>(uniform_int(rng, 0, 2))};
  inst.target = stagger_label(inst.features, concept_id);
  return inst;
}

StaggerStream::StaggerStream(std::uint64_t seed, int concept_id)
    : rng_(seed), concept_(concept_id) {
  check_stagger_concept(concept_id);
}

std::optional<Instance> StaggerStream::next() {
  return stagger_next(rng_, concept_, t_++);
}

double StaggerStream::relabel(std::span<const double> x,
                              int concept_id) const {
  return stagger_label(x, concept_id);
}

// -------------------------------------------------------------------- csv

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(trim(field));
  return fields;
}

std::optional<double> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

struct Column {
  std::string name;
  FeatureKind kind = FeatureKind::kNumeric;
  std::vector<std::string> levels;
  std::map<std::string, std::size_t> index;
  double min = 0.0;
  double max = 0.0;

  double encode(const std::string& raw, std::size_t row) {
    if (kind == FeatureKind::kNumeric) {
      auto v = parse_number(raw);
      if (!v) {
        throw DataError("row " + std::to_string(row) + ": column '" + name +
                        "' value '" + raw + "' is not numeric");
      }
      return *v;
    }
    auto [it, inserted] = index.emplace(raw, levels.size());
    if (inserted) levels.push_back(raw);
    return static_cast<double>(it->second);
  }
};

}  // namespace

CsvStream::CsvStream(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("CSV file '" + path + "' has no header row");
  }
  const auto header = split_csv_line(line);
  std::vector<std::vector<std::string>> raw;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    raw.push_back(std::move(fields));
  }

  std::size_t target_col = header.size() - 1;
  if (!options.target_column.empty()) {
    auto it = std::find(header.begin(), header.end(), options.target_column);
    if (it == header.end()) {
      throw ConfigError("target column '" + options.target_column +
                        "' not found in '" + path + "'");
    }
    target_col = static_cast<std::size_t>(it - header.begin());
  }
  if (header.size() < 2) {
    throw DataError("CSV needs at least one feature column and a target");
  }

  std::vector<Column> cols(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    cols[c].name = header[c];
    if (auto hint = options.kind_hints.find(header[c]);
        hint != options.kind_hints.end()) {
      cols[c].kind = hint->second;
      continue;
    }
    const bool all_numeric =
        std::all_of(raw.begin(), raw.end(), [c](const auto& r) {
          return parse_number(r[c]).has_value();
        });
    cols[c].kind = all_numeric ? FeatureKind::kNumeric
                               : FeatureKind::kCategorical;
  }

  rows_.reserve(raw.size());
  for (std::size_t r = 0; r < raw.size(); ++r) {
    Instance inst;
    inst.timestamp = r;
    inst.features.reserve(header.size() - 1);
    for (std::size_t c = 0; c < header.size(); ++c) {
      const double v = cols[c].encode(raw[r][c], r + 2);
      if (c == target_col) {
        inst.target = v;
      } else {
        inst.features.push_back(v);
      }
      if (cols[c].kind == FeatureKind::kNumeric) {
        cols[c].min = r == 0 ? v : std::min(cols[c].min, v);
        cols[c].max = r == 0 ? v : std::max(cols[c].max, v);
      }
    }
    rows_.push_back(std::move(inst));
  }

  const Column& target = cols[target_col];
  TargetKind target_kind;
  if (options.target_kind) {
    target_kind = *options.target_kind;
  } else if (target.kind == FeatureKind::kCategorical) {
    target_kind = TargetKind::kBinary;
  } else {
    const bool zero_one = std::all_of(
        rows_.begin(), rows_.end(),
        [](const Instance& i) { return i.target == 0.0 || i.target == 1.0; });
    target_kind = zero_one ? TargetKind::kBinary : TargetKind::kRegression;
  }
  if (target_kind == TargetKind::kBinary) {
    if (target.kind == FeatureKind::kCategorical && target.levels.size() > 2) {
      throw DataError("target column '" + target.name + "' has " +
                      std::to_string(target.levels.size()) +
                      " classes; only binary targets are supported");
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (rows_[r].target != 0.0 && rows_[r].target != 1.0) {
        throw DataError("row " + std::to_string(r + 2) +
                        ": binary target must be 0 or 1");
      }
    }
  }

  std::vector<FeatureSpec> specs;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == target_col) continue;
    FeatureSpec f;
    f.name = cols[c].name;
    f.kind = cols[c].kind;
    if (f.is_categorical()) {
      f.levels = cols[c].levels;
      f.cardinality = std::max<std::size_t>(1, f.levels.size());
    } else {
      f.min = cols[c].min;
      f.max = cols[c].max;
    }
    specs.push_back(std::move(f));
  }
  schema_ = Schema(std::move(specs), target_kind);
}

std::optional<Instance> CsvStream::next() {
  if (pos_ >= rows_.size()) return std::nullopt;
  return rows_[pos_++];
}

std::unique_ptr<Stream> csv_stream(const std::string& path,
                                   const CsvOptions& options) {
  return std::make_unique<CsvStream>(path, options);
}

// ------------------------------------------------------------------ drift

void validate_drift(const DriftSpec& spec, const Schema& schema) {
  if (const auto* g = std::get_if<Gradual>(&spec.profile); g && g->width < 1) {
    throw ConfigError("gradual drift width must be >= 1");
  }
  if (const auto* swap = std::get_if<FeatureSwap>(&spec.kind)) {
    if (swap->pairs.empty()) {
      throw ConfigError("feature swap needs at least one pair");
    }
    for (const auto& [a, b] : swap->pairs) {
      if (a == b || a >= schema.arity() || b >= schema.arity()) {
        throw ConfigError("swap pair (" + std::to_string(a) + "," +
                          std::to_string(b) +
                          ") must reference two distinct valid features");
      }
      const auto& fa = schema.feature(a);
      const auto& fb = schema.feature(b);
      if (fa.kind != fb.kind ||
          (fa.is_categorical() && fa.cardinality != fb.cardinality)) {
        throw ConfigError("cannot swap '" + fa.name + "' and '" + fb.name +
                          "': incompatible kinds");
      }
    }
  }
}

DriftedStream::DriftedStream(std::unique_ptr<Stream> base, DriftSpec spec,
                             std::uint64_t seed)
    : base_(std::move(base)), spec_(std::move(spec)), rng_(seed) {
  validate_drift(spec_, base_->schema());
  if (const auto* sw = std::get_if<FunctionSwitch>(&spec_.kind)) {
    // Probe the labeling function so a stream without concepts fails here.
    std::vector<double> probe(base_->schema().arity(), 0.0);
    base_->relabel(probe, sw->from_concept);
    base_->relabel(probe, sw->to_concept);
  }
}

bool DriftedStream::use_new_concept(std::uint64_t index) {
  if (index < spec_.position) return false;
  if (std::holds_alternative<Sudden>(spec_.profile)) return true;
  const auto width = std::get<Gradual>(spec_.profile).width;
  const std::uint64_t k = index - spec_.position + 1;
  if (k >= width) return true;
  const double p = static_cast<double>(k) / static_cast<double>(width);
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p;
}

std::optional<Instance> DriftedStream::next() {
  auto inst = base_->next();
  if (!inst) return inst;
  const bool drifted = use_new_concept(index_++);
  if (const auto* sw = std::get_if<FunctionSwitch>(&spec_.kind)) {
    inst->target = base_->relabel(
        inst->features, drifted ? sw->to_concept : sw->from_concept);
  } else if (drifted) {
    for (const auto& [a, b] : std::get<FeatureSwap>(spec_.kind).pairs) {
      std::swap(inst->features[a], inst->features[b]);
    }
  }
  return inst;
}

std::unique_ptr<Stream> apply_drift(std::unique_ptr<Stream> base,
                                    const DriftSpec& spec,
                                    std::uint64_t seed) {
  return std::make_unique<DriftedStream>(std::move(base), spec, seed);
}

}  // namespace driftwise::stream
