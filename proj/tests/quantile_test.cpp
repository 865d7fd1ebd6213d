// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "tarstop/quantile.hpp"

namespace tarstop {
namespace {

// Fig. 1-style sample: ten sampled positives with d_8 = 18307, d_9 = 22151.
PositiveSample worked_sample() {
  return PositiveSample({412, 1630, 2987, 5120, 8874, 11002, 15450, 18307, 22151, 30980});
}

std::vector<std::uint64_t> random_sorted_ranks(std::mt19937_64& gen, std::uint64_t r) {
  std::vector<std::uint64_t> ranks;
  std::uint64_t next = 0;
  for (std::uint64_t i = 0; i < r; ++i) {
    next += 1 + gen() % 50;
    ranks.push_back(next);
  }
  return ranks;
}

TEST(PositiveSample, Invariants) {
  EXPECT_THROW(PositiveSample({3, 3}), DataError);
  EXPECT_THROW(PositiveSample({5, 2}), DataError);
  EXPECT_THROW(PositiveSample({0, 2}), DataError);
  EXPECT_THROW(PositiveSample({1, 2, 3}, 2), DataError);
  EXPECT_NO_THROW(PositiveSample({1, 2, 3}, 0));
  EXPECT_THROW(worked_sample().order_stat(11), InsufficientSampleError);
  EXPECT_EQ(worked_sample().order_stat(8), 18307u);
}

TEST(Q7Anchor, Examples) {
  const auto a = q7_anchor(10, Probability{0.8});
  EXPECT_NEAR(a.h, 8.2, 1e-12);
  EXPECT_EQ(a.j, 8u);
  EXPECT_NEAR(a.fraction, 0.2, 1e-12);
  EXPECT_FALSE(a.integral());

  const auto b = q7_anchor(11, Probability{0.5});
  EXPECT_EQ(b.j, 6u);
  EXPECT_TRUE(b.integral());

  const auto c = q7_anchor(5, Probability{0.25});
  EXPECT_EQ(c.j, 2u);
  EXPECT_TRUE(c.integral());
}

TEST(Q7Anchor, RatioAndRealAgreeOnIntegrality) {
  // 0.7 * 10 is 7.000000000000001 in binary floating point.
  const auto real = q7_anchor(11, Probability{0.7});
  const auto exact = q7_anchor(11, RecallRatio{7, 10});
  EXPECT_TRUE(real.integral());
  EXPECT_TRUE(exact.integral());
  EXPECT_EQ(real.j, 8u);
  EXPECT_EQ(exact.j, 8u);
  for (std::uint64_t r = 2; r <= 400; ++r) {
    for (std::uint64_t num = 1; num < 20; ++num) {
      const auto e = q7_anchor(r, RecallRatio{num, 20});
      const auto f = q7_anchor(r, Probability{static_cast<double>(num) / 20.0});
      EXPECT_EQ(e.j, f.j) << r << " " << num;
      EXPECT_EQ(e.integral(), f.integral()) << r << " " << num;
    }
  }
}

TEST(Q7Anchor, Errors) {
  EXPECT_THROW(q7_anchor(1, Probability{0.5}), DomainError);
  EXPECT_THROW(q7_anchor(5, Probability{0.0}), DomainError);
  EXPECT_THROW(q7_anchor(5, Probability{1.0}), DomainError);
  EXPECT_THROW(q7_anchor(5, RecallRatio{3, 3}), DomainError);
}

TEST(Q7Estimate, WorkedExampleExample) {
  const auto est = q7_estimate(worked_sample(), Probability{0.8});
  EXPECT_NEAR(est.raw, 19075.8, 1e-9);
  EXPECT_EQ(est.rank, 19076u);
}

TEST(Q7Estimate, Examples) {
  const auto est = q7_estimate(PositiveSample({10, 20}), Probability{0.5});
  EXPECT_DOUBLE_EQ(est.raw, 15.0);
  EXPECT_EQ(est.rank, 15u);
  const auto exact = q7_estimate(PositiveSample({4, 9, 13, 40, 41}), Probability{0.25});
  EXPECT_DOUBLE_EQ(exact.raw, 9.0);
  EXPECT_EQ(exact.rank, 9u);
  EXPECT_THROW(q7_estimate(PositiveSample({4}), Probability{0.5}), InsufficientSampleError);
}

TEST(Q7Estimate, LiesBetweenNeighbouringOrderStatistics) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> unit(0.001, 0.999);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::uint64_t r = 2 + gen() % 60;
    const PositiveSample s(random_sorted_ranks(gen, r));
    const Probability t{unit(gen)};
    const auto a = q7_anchor(r, t);
    const auto est = q7_estimate(s, t);
    const auto lo = static_cast<double>(s.order_stat(a.j));
    if (a.integral()) {
      EXPECT_EQ(est.raw, lo);
    } else {
      EXPECT_GE(est.raw, lo);
      EXPECT_LE(est.raw, static_cast<double>(s.order_stat(a.j + 1)));
    }
    EXPECT_GE(static_cast<double>(est.rank), est.raw);
    EXPECT_LT(static_cast<double>(est.rank) - est.raw, 1.0);
  }
}

TEST(Q7Estimate, MonotoneUnderPointwiseIncrease) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> unit(0.001, 0.999);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::uint64_t r = 2 + gen() % 40;
    auto base = random_sorted_ranks(gen, r);
    auto bumped = base;
    std::uint64_t shift = 0;
    for (auto& x : bumped) {
      shift += gen() % 5;  // nondecreasing shifts keep the ranks strictly increasing
      x += shift;
    }
    const Probability t{unit(gen)};
    EXPECT_LE(q7_estimate(PositiveSample(base), t).raw,
              q7_estimate(PositiveSample(bumped), t).raw);
  }
}

TEST(StopIndex, Examples) {
  EXPECT_EQ(qpet_stop_index(10, Probability{0.8}), 9u);
  EXPECT_EQ(qpet_stop_index(11, Probability{0.5}), 6u);
  EXPECT_EQ(qpet_stop_index(22, Probability{0.8}), 18u);
  EXPECT_EQ(pet_stop_index(10, Probability{0.8}), 8u);
  EXPECT_EQ(pet_stop_index(22, Probability{0.8}), 18u);
  EXPECT_EQ(pet_stop_index(14, Probability{0.8}), 12u);
  EXPECT_EQ(pet_stop_index(10, RecallRatio{4, 5}), 8u);
  EXPECT_EQ(qpet_stop_index(10, RecallRatio{4, 5}), 9u);
}

TEST(StopIndex, QpetNeverMoreThanOneBeyondPet) {
  for (std::uint64_t r = 2; r <= 2000; ++r) {
    for (int i = 1; i < 200; ++i) {
      const Probability t{static_cast<double>(i) / 200.0};
      const auto q = qpet_stop_index(r, t);
      const auto p = pet_stop_index(r, t);
      ASSERT_GE(q, p) << r << " " << t.value();
      ASSERT_LE(q - p, 1u) << r << " " << t.value();
    }
  }
}

TEST(StopIndex, RatioOverloadsMatchBruteForce) {
  for (std::uint64_t r = 2; r <= 300; ++r) {
    for (std::uint64_t num = 1; num < 40; ++num) {
      const RecallRatio t{num, 40};
      // PET: smallest j with j/r >= num/40.
      std::uint64_t j = 1;
      while (j * 40 < r * num) ++j;
      EXPECT_EQ(pet_stop_index(r, t), j);
      const auto q = qpet_stop_index(r, t);
      EXPECT_TRUE(q == j || q == j + 1) << r << " " << num;
    }
  }
}

TEST(PetExpectedRecall, ClosedForm) {
  EXPECT_NEAR(pet_expected_recall_all_relevant(10000, 10), 0.454591, 5e-7);
  EXPECT_NEAR(pet_expected_recall_all_relevant(20, 4), 0.42, 1e-15);
  EXPECT_NEAR(pet_expected_recall_all_relevant(20, 20), 0.5, 1e-15);
  EXPECT_THROW(pet_expected_recall_all_relevant(21, 4), DomainError);
  EXPECT_THROW(pet_expected_recall_all_relevant(20, 3), DomainError);
  EXPECT_THROW(pet_expected_recall_all_relevant(20, 22), DomainError);
}

TEST(PetExpectedRecall, BelowHalfAndApproachesHalf) {
  for (std::uint64_t N = 2; N <= 400; N += 2) {
    double prev = 0.0;
    for (std::uint64_t n = 2; n < N; n += 2) {
      const double v = pet_expected_recall_all_relevant(N, n);
      EXPECT_LT(v, 0.5);
      EXPECT_GT(v, prev);
      prev = v;
    }
    EXPECT_DOUBLE_EQ(pet_expected_recall_all_relevant(N, N), 0.5);
  }
}

}  // namespace
}  // namespace tarstop
