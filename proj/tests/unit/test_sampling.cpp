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
#include <map>

#include <gtest/gtest.h>

#include "driftwise/sampling.hpp"

namespace driftwise::sampling {
namespace {

Instance numbered(std::uint64_t t) {
  return Instance{{static_cast<double>(t)}, 0.0, t};
}

// Feeds observations 0..s-1 and draws once; returns the drawn index.
std::uint64_t draw_after(Sampler& sampler, std::uint64_t s) {
  for (std::uint64_t t = 0; t < s; ++t) sampler.update(numbered(t));
  return sampler.draw().timestamp;
}

// Upper 1% quantile of chi-square with k degrees of freedom
// (Wilson-Hilferty).
double chi_square_critical(double k) {
  const double z = 2.3263478740408408;
  const double a = 2.0 / (9.0 * k);
  return k * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

TEST(Sampler, ParsesKinds) {
  EXPECT_EQ(parse_sampler_kind("uniform"), SamplerKind::kUniformFull);
  EXPECT_EQ(parse_sampler_kind("uniform_reservoir"),
            SamplerKind::kUniformReservoir);
  EXPECT_EQ(parse_sampler_kind("geometric"), SamplerKind::kGeometric);
  EXPECT_THROW(parse_sampler_kind("histogram"), ConfigError);
  for (auto k : {SamplerKind::kUniformFull, SamplerKind::kUniformReservoir,
                 SamplerKind::kGeometric}) {
    EXPECT_EQ(parse_sampler_kind(to_string(k)), k);
  }
}

TEST(Sampler, DrawBeforeWarmupThrows) {
  Sampler full(SamplerKind::kUniformFull, 10, 1);
  EXPECT_THROW(full.draw(), PreconditionError);
  Sampler geo(SamplerKind::kGeometric, 3, 1);
  geo.update(numbered(0));
  geo.update(numbered(1));
  EXPECT_FALSE(geo.ready());
  EXPECT_THROW(geo.draw(), PreconditionError);
  geo.update(numbered(2));
  EXPECT_TRUE(geo.ready());
  EXPECT_NO_THROW(geo.draw());
}

TEST(Sampler, UniformFullKeepsEverything) {
  Sampler s(SamplerKind::kUniformFull, 1, 1);
  for (std::uint64_t t = 0; t < 37; ++t) s.update(numbered(t));
  EXPECT_EQ(s.contents().size(), 37u);
  EXPECT_EQ(s.warmup(), 1u);
}

TEST(Sampler, ReservoirsHoldExactlyL) {
  for (auto kind : {SamplerKind::kUniformReservoir, SamplerKind::kGeometric}) {
    Sampler s(kind, 8, 2);
    for (std::uint64_t t = 0; t < 100; ++t) {
      s.update(numbered(t));
      EXPECT_EQ(s.contents().size(), std::min<std::size_t>(t + 1, 8));
      for (const auto& inst : s.contents()) EXPECT_LE(inst.timestamp, t);
    }
    EXPECT_EQ(s.warmup(), 8u);
  }
}

TEST(Sampler, GeometricSingleSlotHoldsLatest) {
  Sampler s(SamplerKind::kGeometric, 1, 3);
  for (std::uint64_t t = 0; t < 50; ++t) {
    s.update(numbered(t));
    EXPECT_EQ(s.draw().timestamp, t);
  }
}

TEST(Sampler, GeometricSlotReplacementFrequency) {
  const int runs = 100000;
  std::vector<int> replaced(4, 0);
  Sampler s(SamplerKind::kGeometric, 4, 5);
  for (std::uint64_t t = 0; t < 4; ++t) s.update(numbered(t));
  for (int i = 0; i < runs; ++i) {
    std::vector<std::uint64_t> before;
    for (const auto& inst : s.contents()) before.push_back(inst.timestamp);
    s.update(numbered(4 + i));
    for (std::size_t k = 0; k < 4; ++k) {
      if (s.contents()[k].timestamp != before[k]) ++replaced[k];
    }
  }
  for (int r : replaced) EXPECT_NEAR(static_cast<double>(r) / runs, 0.25, 0.01);
}

TEST(Sampler, UniformFullDrawFrequencies) {
  Sampler s(SamplerKind::kUniformFull, 1, 9);
  for (std::uint64_t t = 0; t < 4; ++t) s.update(numbered(t));
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[s.draw().timestamp];
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.25, 0.01);
}

// Empirical law of the drawn index over independent sampler runs against
// the analytic marginals.
void check_draw_law(SamplerKind kind, std::size_t L, std::uint64_t s,
                    int runs) {
  const std::size_t t0 = kind == SamplerKind::kUniformFull ? 1 : L;
  std::vector<double> counts(s, 0.0);
  for (int i = 0; i < runs; ++i) {
    Sampler sampler(kind, L, derive_seed(1234, i));
    counts[draw_after(sampler, s)] += 1.0;
  }
  double chi2 = 0.0;
  double cells = 0.0;
  for (std::uint64_t r = 0; r < s; ++r) {
    const double p = marginal_probability(kind, s, r, L, t0);
    const double expected = p * runs;
    const double se = std::sqrt(runs * p * (1 - p));
    if (kind == SamplerKind::kGeometric && r >= t0) {
      EXPECT_LE(std::abs(counts[r] - expected), 3.0 * se + 1.0)
          << "index " << r;
    }
    if (expected >= 5.0) {
      chi2 += (counts[r] - expected) * (counts[r] - expected) / expected;
      cells += 1.0;
    }
  }
  EXPECT_LT(chi2, chi_square_critical(cells - 1.0));
}

TEST(Sampler, GeometricDrawLawMatchesMarginals) {
  check_draw_law(SamplerKind::kGeometric, 5, 30, 100000);
}

TEST(Sampler, UniformReservoirDrawLawMatchesMarginals) {
  check_draw_law(SamplerKind::kUniformReservoir, 5, 30, 100000);
}

TEST(Sampler, UniformFullDrawLawMatchesMarginals) {
  check_draw_law(SamplerKind::kUniformFull, 1, 20, 100000);
}

TEST(Marginals, Examples) {
  for (std::uint64_t r = 0; r < 5; ++r) {
    EXPECT_DOUBLE_EQ(marginal_probability(SamplerKind::kUniformFull, 5, r, 1, 1),
                     0.2);
  }
  EXPECT_DOUBLE_EQ(marginal_probability(SamplerKind::kGeometric, 3, 2, 2, 2), 0.5);
  EXPECT_THROW(marginal_probability(SamplerKind::kUniformFull, 5, 5, 1, 1),
               std::invalid_argument);
  EXPECT_THROW(marginal_probability(SamplerKind::kGeometric, 10, 3, 4, 2),
               std::invalid_argument);
}

TEST(Marginals, SumToOne) {
  for (auto kind : {SamplerKind::kUniformFull, SamplerKind::kUniformReservoir,
                    SamplerKind::kGeometric}) {
    for (std::size_t L : {1, 2, 4, 10, 100}) {
      const std::size_t t0 = kind == SamplerKind::kUniformFull ? 1 : L;
      for (std::uint64_t s = std::max<std::uint64_t>(t0, 1); s <= 300; ++s) {
        double total = 0.0;
        for (std::uint64_t r = 0; r < s; ++r) {
          total += marginal_probability(kind, s, r, L, t0);
        }
        ASSERT_NEAR(total, 1.0, 1e-12) << to_string(kind) << " L=" << L
                                       << " s=" << s;
      }
    }
  }
}

TEST(Marginals, GeometricRecencyAndNonIncreasingResampling) {
  const std::size_t L = 6;
  for (std::uint64_t s = L + 1; s < 80; ++s) {
    for (std::uint64_t r = L; r + 1 < s; ++r) {
      EXPECT_LE(marginal_probability(SamplerKind::kGeometric, s, r, L, L),
                marginal_probability(SamplerKind::kGeometric, s, r + 1, L, L));
    }
    for (std::uint64_t r = 0; r < s; ++r) {
      for (auto kind : {SamplerKind::kUniformFull, SamplerKind::kGeometric}) {
        const std::size_t t0 = kind == SamplerKind::kGeometric ? L : 1;
        EXPECT_LE(marginal_probability(kind, s + 1, r, L, t0),
                  marginal_probability(kind, s, r, L, t0) + 1e-15);
      }
    }
  }
}

TEST(Collision, Examples) {
  EXPECT_DOUBLE_EQ(collision_probability(SamplerKind::kUniformFull, 4, 1, 1), 0.25);
  EXPECT_DOUBLE_EQ(collision_probability(SamplerKind::kGeometric, 3, 2, 2), 0.375);
  EXPECT_NEAR(collision_probability(SamplerKind::kGeometric, 2 + 100000, 2, 2),
              1.0 / 3.0, 1e-12);
}

TEST(Collision, MatchesDirectSummation) {
  for (std::size_t L : {2, 4, 10, 100}) {
    for (std::uint64_t s = L; s <= 200; ++s) {
      double direct = 0.0;
      for (std::uint64_t r = 0; r < s; ++r) {
        const double p = marginal_probability(SamplerKind::kGeometric, s, r, L, L);
        direct += p * p;
      }
      ASSERT_NEAR(collision_probability(SamplerKind::kGeometric, s, L, L), direct,
                  1e-12);
    }
  }
  for (std::uint64_t s = 1; s <= 200; ++s) {
    double direct = 0.0;
    for (std::uint64_t r = 0; r < s; ++r) {
      const double p = marginal_probability(SamplerKind::kUniformFull, s, r, 1, 1);
      direct += p * p;
    }
    ASSERT_NEAR(collision_probability(SamplerKind::kUniformFull, s, 1, 1), direct,
                1e-12);
  }
}

TEST(Collision, IndependentRunsCollideAtCollisionProbability) {
  const std::size_t L = 4;
  const std::uint64_t s = L + 3;
  const int runs = 200000;
  int collisions = 0;
  for (int i = 0; i < runs; ++i) {
    Sampler a(SamplerKind::kGeometric, L, derive_seed(77, 2 * i));
    Sampler b(SamplerKind::kGeometric, L, derive_seed(77, 2 * i + 1));
    collisions += draw_after(a, s) == draw_after(b, s);
  }
  const double p = collision_probability(SamplerKind::kGeometric, s, L, L);
  const double se = std::sqrt(p * (1 - p) / runs);
  EXPECT_NEAR(static_cast<double>(collisions) / runs, p, 4 * se);
}

}  // namespace
}  // namespace driftwise::sampling
