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

#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "driftwise/datastream.hpp"
#include "driftwise/learners.hpp"

namespace driftwise::learn {
namespace {

using stream::agrawal::kAge;
using stream::agrawal::kSalary;

FeatureVector probe_point(Rng& rng) {
  return stream::agrawal_next(rng, 1).features;
}

TEST(FrozenOracle, AgrawalConceptOne) {
  const auto oracle = agrawal_oracle(1);
  FeatureVector x(stream::agrawal::kArity, 1.0);
  x[kAge] = 30;
  x[kSalary] = 60;
  EXPECT_EQ(oracle.predict(x), 1.0);
  x[kSalary] = 150;
  EXPECT_EQ(oracle.predict(x), 0.0);
}

TEST(FrozenOracle, LearnIsNoOpAndSnapshotMatches) {
  auto oracle = agrawal_oracle(1);
  Rng rng(2);
  std::vector<FeatureVector> probes;
  std::vector<double> before;
  for (int i = 0; i < 50; ++i) {
    probes.push_back(probe_point(rng));
    before.push_back(oracle.predict(probes.back()));
  }
  const auto snap = snapshot(oracle);
  for (int i = 0; i < 50; ++i) oracle.learn_one(probes[i], 1.0 - before[i]);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(oracle.predict(probes[i]), before[i]);
    EXPECT_EQ(snap->predict(probes[i]), before[i]);
  }
}

TEST(FrozenOracle, RejectsWrongArity) {
  const auto oracle = agrawal_oracle(1);
  EXPECT_THROW(oracle.predict(FeatureVector{1.0, 2.0}), SchemaError);
}

TEST(RunningMoments, MatchesBatchOnEveryPrefix) {
  Rng rng(7);
  std::normal_distribution<double> normal(1e3, 5.0);
  std::vector<double> xs;
  RunningMoments m;
  for (int n = 1; n <= 500; ++n) {
    xs.push_back(normal(rng));
    m.push(xs.back());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : xs) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(m.mean, mean, 1e-10 * std::abs(mean));
    if (n > 1) {
      const double var = ss / (n - 1);
      EXPECT_NEAR(m.variance(), var, 1e-10 * var);
    }
  }
}

TEST(NaiveBayes, UntrainedPredictsHalf) {
  OnlineNaiveBayes nb(stream::agrawal_schema());
  Rng rng(1);
  EXPECT_EQ(nb.predict(probe_point(rng)), 0.5);
}

TEST(NaiveBayes, OneClassHistoryDominatedByPrior) {
  OnlineNaiveBayes nb(stream::agrawal_schema());
  Rng rng(3);
  for (int i = 0; i < 100; ++i) nb.learn_one(probe_point(rng), 1.0);
  for (int i = 0; i < 200; ++i) EXPECT_GT(nb.predict(probe_point(rng)), 0.9);
}

TEST(NaiveBayes, StatisticsMatchBatch) {
  OnlineNaiveBayes nb(stream::agrawal_schema());
  stream::AgrawalStream s(5, 1);
  std::vector<double> ages[2];
  for (int i = 0; i < 2000; ++i) {
    const auto inst = *s.next();
    nb.learn_one(inst.features, inst.target);
    ages[static_cast<int>(inst.target)].push_back(inst.features[kAge]);
  }
  for (int c = 0; c < 2; ++c) {
    const auto& v = ages[c];
    EXPECT_EQ(nb.class_count(c), static_cast<double>(v.size()));
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0.0;
    for (double a : v) ss += (a - mean) * (a - mean);
    EXPECT_NEAR(nb.moments(kAge, c).mean, mean, 1e-10 * mean);
    EXPECT_NEAR(nb.moments(kAge, c).variance(), ss / (v.size() - 1),
                1e-10 * ss / (v.size() - 1));
  }
}

TEST(NaiveBayes, ProbabilitiesValidAndLearnsSignal) {
  OnlineNaiveBayes nb(stream::stagger_schema());
  stream::StaggerStream s(9, 2);
  for (int i = 0; i < 3000; ++i) {
    const auto inst = *s.next();
    nb.learn_one(inst.features, inst.target);
  }
  int correct = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto inst = *s.next();
    const double p = nb.predict(inst.features);
    ASSERT_GE(p, 0.0);
    ASSERT_LE(p, 1.0);
    correct += (p >= 0.5) == (inst.target == 1.0);
  }
  EXPECT_GT(correct, 700);
}

TEST(NaiveBayes, ZeroVarianceUsesFloor) {
  const Schema schema({{"x", FeatureKind::kNumeric, 0, 1, 0, {}}}, TargetKind::kBinary);
  OnlineNaiveBayes nb(schema);
  for (int i = 0; i < 5; ++i) {
    nb.learn_one(FeatureVector{0.25}, 0.0);
    nb.learn_one(FeatureVector{0.75}, 1.0);
  }
  EXPECT_LT(nb.predict(FeatureVector{0.25}), 1e-6);
  EXPECT_GT(nb.predict(FeatureVector{0.75}), 1 - 1e-6);
  EXPECT_TRUE(std::isfinite(nb.predict(FeatureVector{0.5})));
}

TEST(NaiveBayes, SnapshotIsFrozen) {
  OnlineNaiveBayes nb(stream::agrawal_schema());
  stream::AgrawalStream s(1, 1);
  for (int i = 0; i < 500; ++i) {
    const auto inst = *s.next();
    nb.learn_one(inst.features, inst.target);
  }
  const auto snap = snapshot(nb);
  Rng rng(4);
  std::vector<FeatureVector> probes;
  std::vector<double> at_snapshot;
  for (int i = 0; i < 100; ++i) {
    probes.push_back(probe_point(rng));
    at_snapshot.push_back(nb.predict(probes.back()));
  }
  for (int i = 0; i < 500; ++i) {
    const auto inst = *s.next();
    nb.learn_one(inst.features, 1.0 - inst.target);
  }
  double max_delta = 0.0;
  for (int i = 0; i < 100; ++i) {
    max_delta = std::max(max_delta, std::abs(snap->predict(probes[i]) - at_snapshot[i]));
  }
  EXPECT_EQ(max_delta, 0.0);
}

TEST(NaiveBayes, RejectsSchemaMismatch) {
  OnlineNaiveBayes nb(stream::stagger_schema());
  EXPECT_THROW(nb.learn_one(FeatureVector{0, 0}, 1.0), SchemaError);
  EXPECT_THROW(nb.learn_one(FeatureVector{0, 0, 7}, 1.0), SchemaError);
  EXPECT_THROW(nb.learn_one(FeatureVector{0, 0, 1}, 0.5), std::invalid_argument);
}

TEST(LogisticRegression, ZeroWeightsPredictHalf) {
  OnlineLogisticRegression lr(stream::agrawal_schema());
  Rng rng(1);
  EXPECT_DOUBLE_EQ(lr.predict(probe_point(rng)), 0.5);
}

TEST(LogisticRegression, StepTowardsTarget) {
  OnlineLogisticRegression lr(stream::agrawal_schema(), {0.01, 0.0});
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto x = probe_point(rng);
    const double before = lr.predict(x);
    lr.learn_one(x, 1.0);
    EXPECT_GT(lr.predict(x), before);
  }
}

TEST(LogisticRegression, GradientMatchesFiniteDifferences) {
  OnlineLogisticRegression lr(stream::agrawal_schema(), {0.05, 0.01});
  Rng rng(6);
  std::normal_distribution<double> normal(0.0, 0.5);
  std::vector<double> w(lr.weights().size());
  for (auto& v : w) v = normal(rng);
  lr.set_parameters(w, 0.3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = probe_point(rng);
    const double y = trial % 2;
    const auto grad = lr.gradient(x, y);
    ASSERT_EQ(grad.size(), w.size() + 1);
    const double h = 1e-6;
    for (std::size_t k = 0; k <= w.size(); ++k) {
      auto wp = w, wm = w;
      double bp = 0.3, bm = 0.3;
      if (k < w.size()) {
        wp[k] += h;
        wm[k] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      const double numeric =
          (lr.loss(x, y, wp, bp) - lr.loss(x, y, wm, bm)) / (2 * h);
      const double scale = std::max(1e-3, std::abs(numeric));
      EXPECT_NEAR(grad[k], numeric, 1e-5 * scale) << "parameter " << k;
    }
  }
}

TEST(LogisticRegression, LearnsLinearlySeparableData) {
  const Schema schema({{"a", FeatureKind::kNumeric, -1, 1, 0, {}},
                       {"b", FeatureKind::kNumeric, -1, 1, 0, {}}},
                      TargetKind::kBinary);
  OnlineLogisticRegression lr(schema, {0.5, 0.0});
  Rng rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 5000; ++i) {
    FeatureVector x{u(rng), u(rng)};
    lr.learn_one(x, x[0] + x[1] > 0 ? 1.0 : 0.0);
  }
  EXPECT_GT(lr.predict(FeatureVector{0.8, 0.8}), 0.9);
  EXPECT_LT(lr.predict(FeatureVector{-0.8, -0.8}), 0.1);
}

TEST(LogisticRegression, OneHotEncodesCategoricals) {
  OnlineLogisticRegression lr(stream::stagger_schema());
  const auto e = lr.encode(FeatureVector{2, 0, 1});
  ASSERT_EQ(e.size(), 9u);
  EXPECT_EQ(e, (std::vector<double>{0, 0, 1, 1, 0, 0, 0, 1, 0}));
}

TEST(Learners, DeterministicGivenData) {
  OnlineNaiveBayes a(stream::agrawal_schema()), b(stream::agrawal_schema());
  stream::AgrawalStream s1(3, 1), s2(3, 1);
  for (int i = 0; i < 300; ++i) {
    const auto x = *s1.next();
    const auto y = *s2.next();
    a.learn_one(x.features, x.target);
    b.learn_one(y.features, y.target);
    EXPECT_EQ(a.predict(x.features), b.predict(y.features));
  }
}

}  // namespace
}  // namespace driftwise::learn
