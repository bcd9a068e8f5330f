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

// Labeled instance streams: the agrawal and stagger generators, CSV files
// replayed as streams, and concept drift injection on top of any of them.

#ifndef DRIFTWISE_DATASTREAM_HPP_
#define DRIFTWISE_DATASTREAM_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "driftwise/types.hpp"

namespace driftwise::stream {

class Stream {
 public:
  virtual ~Stream() = default;

  virtual const Schema& schema() const = 0;

  // Next instance, or nullopt once a finite stream is exhausted. Generators
  // never end.
  virtual std::optional<Instance> next() = 0;

  // Label `x` under another concept of the same generator. Streams without
  // a known labeling function throw ConfigError.
  virtual double relabel(std::span<const double> x, int concept_id) const;
};

// Pulls up to `n` instances (fewer if the stream ends).
std::vector<Instance> take(Stream& stream, std::size_t n);

// ---------------------------------------------------------------- agrawal

namespace agrawal {
inline constexpr std::size_t kSalary = 0;
inline constexpr std::size_t kCommission = 1;
inline constexpr std::size_t kAge = 2;
inline constexpr std::size_t kElevel = 3;
inline constexpr std::size_t kCar = 4;
inline constexpr std::size_t kZipcode = 5;
inline constexpr std::size_t kHvalue = 6;
inline constexpr std::size_t kHyears = 7;
inline constexpr std::size_t kLoan = 8;
inline constexpr std::size_t kArity = 9;
}  // namespace agrawal

// Nine features: salary, commission, age, elevel, car, zipcode, hvalue,
// hyears, loan. Money is in thousands, age in years.
const Schema& agrawal_schema();

// Label under concept 1 (age/salary bands), 2 (age/elevel bands) or
// 3 (age/elevel/salary). Returns 1.0 for class A, 0.0 for class B.
double agrawal_label(std::span<const double> x, int concept_id);

// Draws one instance. Throws ConfigError for concept ids outside 1..3.
Instance agrawal_next(Rng& rng, int concept_id, std::uint64_t timestamp = 0);

class AgrawalStream final : public Stream {
 public:
  AgrawalStream(std::uint64_t seed, int concept_id);

  const Schema& schema() const override { return agrawal_schema(); }
  std::optional<Instance> next() override;
  double relabel(std::span<const double> x, int concept_id) const override;

 private:
  Rng rng_;
  int concept_;
  std::uint64_t t_ = 0;
};

// ---------------------------------------------------------------- stagger

namespace stagger {
inline constexpr std::size_t kShape = 0;  // circle, square, triangle
inline constexpr std::size_t kSize = 1;   // small, medium, large
inline constexpr std::size_t kColor = 2;  // red, green, blue
}  // namespace stagger

const Schema& stagger_schema();

// Concept 1: size=small and color=red. Concept 2: color=green or
// shape=circle. Concept 3: size is medium or large.
double stagger_label(std::span<const double> x, int concept_id);

Instance stagger_next(Rng& rng, int concept_id, std::uint64_t timestamp = 0);

class StaggerStream final : public Stream {
 public:
  StaggerStream(std::uint64_t seed, int concept_id);

  const Schema& schema() const override { return stagger_schema(); }
  std::optional<Instance> next() override;
  double relabel(std::span<const double> x, int concept_id) const override;

 private:
  Rng rng_;
  int concept_;
  std::uint64_t t_ = 0;
};

// -------------------------------------------------------------------- csv

struct CsvOptions {
  // Empty selects the last column.
  std::string target_column;
  // Forces a column's kind; unlisted columns are auto-detected (numeric iff
  // every value parses as a number).
  std::map<std::string, FeatureKind> kind_hints;
  // Auto: categorical or {0,1}-valued targets are binary, else regression.
  std::optional<TargetKind> target_kind;
};

// Whole-file CSV replayed in file order. Categorical levels get indices in
// first-seen order and are recorded in the schema.
class CsvStream final : public Stream {
 public:
  CsvStream(const std::string& path, const CsvOptions& options = {});

  const Schema& schema() const override { return schema_; }
  std::optional<Instance> next() override;
  std::size_t size() const { return rows_.size(); }

 private:
  Schema schema_;
  std::vector<Instance> rows_;
  std::size_t pos_ = 0;
};

std::unique_ptr<Stream> csv_stream(const std::string& path,
                                   const CsvOptions& options = {});

// ------------------------------------------------------------------ drift

struct FunctionSwitch {
  int from_concept = 1;
  int to_concept = 2;
};

struct FeatureSwap {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

struct Sudden {};

// The probability of the new concept ramps linearly over `width` samples:
// sample position+k uses it with probability min(1, (k+1)/width).
struct Gradual {
  std::size_t width = 1;
};

struct DriftSpec {
  std::variant<FunctionSwitch, FeatureSwap> kind;
  std::uint64_t position = 0;
  std::variant<Sudden, Gradual> profile;
};

// Throws ConfigError unless `spec` is valid against `schema`: swap indices
// distinct, in range and of matching kind (equal cardinality for
// categoricals), gradual width >= 1.
void validate_drift(const DriftSpec& spec, const Schema& schema);

class DriftedStream final : public Stream {
 public:
  DriftedStream(std::unique_ptr<Stream> base, DriftSpec spec,
                std::uint64_t seed);

  const Schema& schema() const override { return base_->schema(); }
  std::optional<Instance> next() override;
  double relabel(std::span<const double> x, int concept_id) const override {
    return base_->relabel(x, concept_id);
  }
  const DriftSpec& spec() const { return spec_; }

 private:
  bool use_new_concept(std::uint64_t index);

  std::unique_ptr<Stream> base_;
  DriftSpec spec_;
  Rng rng_;
  std::uint64_t index_ = 0;
};

// FunctionSwitch relabels every instance: with from_concept before the
// drift, with to_concept once it applies. FeatureSwap exchanges the listed
// feature pairs once it applies.
std::unique_ptr<Stream> apply_drift(std::unique_ptr<Stream> base,
                                    const DriftSpec& spec, std::uint64_t seed);

}  // namespace driftwise::stream

#endif  // DRIFTWISE_DATASTREAM_HPP_
