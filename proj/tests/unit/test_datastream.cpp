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

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "driftwise/datastream.hpp"

namespace driftwise::stream {
namespace {

namespace fs = std::filesystem;
using namespace agrawal;

FeatureVector agrawal_point(double age, double salary) {
  FeatureVector x(kArity, 0.0);
  x[kAge] = age;
  x[kSalary] = salary;
  x[kCommission] = salary >= 75 ? 0.0 : 20.0;
  x[kHyears] = 10;
  x[kHvalue] = 100;
  x[kLoan] = 100;
  return x;
}

TEST(Agrawal, ConceptOneRules) {
  EXPECT_EQ(agrawal_label(agrawal_point(30, 60), 1), 1.0);
  EXPECT_EQ(agrawal_label(agrawal_point(30, 150), 1), 0.0);
  EXPECT_EQ(agrawal_label(agrawal_point(65, 50), 1), 1.0);
  EXPECT_EQ(agrawal_label(agrawal_point(50, 80), 1), 1.0);
  EXPECT_EQ(agrawal_label(agrawal_point(50, 60), 1), 0.0);
}

TEST(Agrawal, RejectsUnknownConcept) {
  Rng rng(1);
  EXPECT_THROW(agrawal_next(rng, 0, 0), ConfigError);
  EXPECT_THROW(agrawal_next(rng, 4, 0), ConfigError);
  EXPECT_THROW(AgrawalStream(1, 7), ConfigError);
}

TEST(Agrawal, InstancesSatisfySchemaAndRanges) {
  AgrawalStream s(3, 1);
  for (int i = 0; i < 5000; ++i) {
    const auto inst = *s.next();
    EXPECT_NO_THROW(s.schema().validate(inst));
    EXPECT_EQ(inst.timestamp, static_cast<std::uint64_t>(i));
    EXPECT_GE(inst.features[kAge], 20.0);
    EXPECT_LE(inst.features[kAge], 80.0);
    EXPECT_GE(inst.features[kSalary], 20.0);
    EXPECT_LE(inst.features[kSalary], 150.0);
    EXPECT_EQ(inst.target, agrawal_label(inst.features, 1));
  }
}

TEST(Agrawal, ClassAPrevalence) {
  AgrawalStream s(11, 1);
  double positives = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) positives += s.next()->target;
  EXPECT_NEAR(positives / n, 5.0 / 13.0, 0.01);
}

TEST(Agrawal, Deterministic) {
  AgrawalStream a(42, 2), b(42, 2);
  for (int i = 0; i < 100; ++i) {
    const auto x = *a.next();
    const auto y = *b.next();
    EXPECT_EQ(x.features, y.features);
    EXPECT_EQ(x.target, y.target);
  }
}

TEST(Stagger, RuleEvaluation) {
  // circle, small, red
  EXPECT_EQ(stagger_label(FeatureVector{0, 0, 0}, 1), 1.0);
  // circle, large, red
  EXPECT_EQ(stagger_label(FeatureVector{0, 2, 0}, 1), 0.0);
  // square, small, green
  EXPECT_EQ(stagger_label(FeatureVector{1, 0, 1}, 2), 1.0);
  EXPECT_EQ(stagger_label(FeatureVector{1, 0, 2}, 2), 0.0);
  EXPECT_EQ(stagger_label(FeatureVector{1, 1, 2}, 3), 1.0);
  Rng rng(0);
  EXPECT_THROW(stagger_next(rng, 9, 0), ConfigError);
}

TEST(Stagger, ConceptOneRate) {
  StaggerStream s(5, 1);
  double positives = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto inst = *s.next();
    s.schema().validate(inst);
    positives += inst.target;
  }
  EXPECT_NEAR(positives / n, 1.0 / 9.0, 0.01);
}

class CsvTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("driftwise_csv_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& text) {
    const auto path = (dir_ / "data.csv").string();
    std::ofstream(path) << text;
    return path;
  }

  fs::path dir_;
};

TEST_F(CsvTest, NumericRowsInOrder) {
  const auto path = write("a,b,y\n1,2,0\n3,4,1\n5,6,0\n");
  CsvStream s(path);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.schema().arity(), 2u);
  EXPECT_EQ(s.schema().target_kind(), TargetKind::kBinary);
  EXPECT_EQ(s.next()->features, (FeatureVector{1, 2}));
  EXPECT_EQ(s.next()->features, (FeatureVector{3, 4}));
  const auto last = s.next();
  EXPECT_EQ(last->features, (FeatureVector{5, 6}));
  EXPECT_EQ(last->timestamp, 2u);
  EXPECT_FALSE(s.next().has_value());
}

TEST_F(CsvTest, MissingTargetColumnIsNamed) {
  const auto path = write("a,b\n1,2\n");
  CsvOptions options;
  options.target_column = "label";
  try {
    CsvStream s(path, options);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("label"), std::string::npos);
  }
}

TEST_F(CsvTest, CategoricalFirstSeenIndices) {
  const auto path = write("c,x,y\na,1.5,2.5\nb,2,3\na,3,1.25\n");
  CsvStream s(path);
  const auto& f = s.schema().feature(0);
  EXPECT_TRUE(f.is_categorical());
  EXPECT_EQ(f.cardinality, 2u);
  EXPECT_EQ(s.schema().target_kind(), TargetKind::kRegression);
  EXPECT_EQ(s.next()->features[0], 0.0);
  EXPECT_EQ(s.next()->features[0], 1.0);
  EXPECT_EQ(s.next()->features[0], 0.0);
}

TEST_F(CsvTest, MalformedRowReportsRowNumber) {
  const auto path = write("a,y\n1,0\n2\n");
  try {
    CsvStream s(path);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos) << e.what();
  }
}

TEST_F(CsvTest, MissingFile) {
  EXPECT_ANY_THROW(CsvStream((dir_ / "nope.csv").string()));
}

TEST(Drift, SuddenFeatureSwap) {
  DriftSpec spec{FeatureSwap{{{0, 2}}}, 5, Sudden{}};
  auto drifted = apply_drift(std::make_unique<AgrawalStream>(9, 1), spec, 1);
  AgrawalStream base(9, 1);
  for (int i = 0; i < 10; ++i) {
    const auto d = *drifted->next();
    const auto b = *base.next();
    if (i < 5) {
      EXPECT_EQ(d.features, b.features);
    } else {
      EXPECT_EQ(d.features[0], b.features[2]);
      EXPECT_EQ(d.features[2], b.features[0]);
      EXPECT_EQ(d.features[1], b.features[1]);
    }
    EXPECT_EQ(d.target, b.target);
  }
}

TEST(Drift, FeatureSwapIsInvolution) {
  DriftSpec spec{FeatureSwap{{{kSalary, kHyears}}}, 3, Sudden{}};
  auto once = apply_drift(std::make_unique<AgrawalStream>(4, 1), spec, 2);
  auto twice = apply_drift(std::move(once), spec, 3);
  AgrawalStream base(4, 1);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(twice->next()->features, base.next()->features);
  }
}

TEST(Drift, SuddenFunctionSwitch) {
  DriftSpec spec{FunctionSwitch{1, 2}, 10000, Sudden{}};
  auto drifted = apply_drift(std::make_unique<AgrawalStream>(8, 1), spec, 1);
  for (int i = 0; i < 20000; ++i) {
    const auto inst = *drifted->next();
    EXPECT_EQ(inst.target, agrawal_label(inst.features, i < 10000 ? 1 : 2));
  }
}

TEST(Drift, GradualRampReachesNewConcept) {
  const std::size_t width = 200;
  DriftSpec spec{FunctionSwitch{1, 3}, 100, Gradual{width}};
  auto drifted = apply_drift(std::make_unique<AgrawalStream>(8, 1), spec, 5);
  int new_before_end = 0;
  for (std::size_t i = 0; i < 100 + 3 * width; ++i) {
    const auto inst = *drifted->next();
    const double c1 = agrawal_label(inst.features, 1);
    const double c3 = agrawal_label(inst.features, 3);
    if (i < 100) {
      EXPECT_EQ(inst.target, c1);
    }
    if (i >= 100 + width) {
      EXPECT_EQ(inst.target, c3);
    }
    if (i >= 100 && i < 100 + width / 4 && c1 != c3 && inst.target == c3) {
      ++new_before_end;
    }
  }
  // Some early ramp samples already follow the new concept.
  EXPECT_GT(new_before_end, 0);
}

TEST(Drift, RejectsIncompatibleSwaps) {
  const auto& schema = agrawal_schema();
  EXPECT_THROW(validate_drift({FeatureSwap{{{kSalary, kElevel}}}, 0, Sudden{}},
                              schema),
               ConfigError);
  EXPECT_THROW(validate_drift({FeatureSwap{{{kSalary, kSalary}}}, 0, Sudden{}},
                              schema),
               ConfigError);
  EXPECT_THROW(
      validate_drift({FeatureSwap{{{kSalary, 40}}}, 0, Sudden{}}, schema),
      ConfigError);
  EXPECT_THROW(validate_drift({FunctionSwitch{1, 2}, 0, Gradual{0}}, schema),
               ConfigError);
  EXPECT_NO_THROW(
      validate_drift({FeatureSwap{{{kSalary, kLoan}}}, 0, Sudden{}}, schema));
}

TEST(Drift, FunctionSwitchNeedsLabelingFunction) {
  const auto dir = fs::temp_directory_path() / "driftwise_csv_switch";
  fs::create_directories(dir);
  const auto path = (dir / "d.csv").string();
  std::ofstream(path) << "a,y\n1,0\n2,1\n";
  EXPECT_THROW(
      apply_drift(csv_stream(path), {FunctionSwitch{1, 2}, 0, Sudden{}}, 1),
      ConfigError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace driftwise::stream
