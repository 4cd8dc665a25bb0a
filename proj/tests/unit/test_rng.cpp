// Copyright 2026 The anomem Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "anomem/rng.hpp"

namespace anomem {
namespace {

TEST(RngStream, EqualSeedAndLabelGiveIdenticalSequences) {
  RngStream a(42, "weights"), b(42, "weights");
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(a.normal(), b.normal());
    ASSERT_EQ(a.student_t(3.0), b.student_t(3.0));
    ASSERT_EQ(a.uniform(), b.uniform());
  }
}

TEST(RngStream, LabelsAndSeedsSeparateStreams) {
  RngStream a(42, "weights"), b(42, "task-split"), c(43, "weights");
  const auto x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
}

TEST(RngStream, SubstreamDependsOnlyOnParentIdentity) {
  RngStream a(5, "weights");
  const RngStream s1 = a.substream(3);
  a.next_u64();
  RngStream s2 = a.substream(3);
  RngStream s1c = s1;
  EXPECT_EQ(s1c.next_u64(), s2.next_u64());
  RngStream t = a.substream(4);
  RngStream s3 = a.substream(3);
  EXPECT_NE(t.next_u64(), s3.next_u64());
}

TEST(RngStream, UniformInHalfOpenUnitInterval) {
  RngStream rng(1, "u");
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 20000.0, 0.5, 0.01);
}

TEST(RngStream, UniformIndexCoversRange) {
  RngStream rng(2, "idx");
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto k = rng.uniform_index(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_GT(c, 800);
}

TEST(RngStream, NormalMoments) {
  RngStream rng(3, "n");
  double s = 0.0, s2 = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.03);
  EXPECT_NEAR(s2 / n, 1.0, 0.03);
}

TEST(RngStream, GammaMean) {
  RngStream rng(4, "g");
  for (double shape : {0.5, 1.5, 4.0}) {
    double s = 0.0;
    for (int i = 0; i < 20000; ++i) {
      const double g = rng.gamma(shape);
      ASSERT_GT(g, 0.0);
      s += g;
    }
    EXPECT_NEAR(s / 20000.0, shape, 0.05 * shape + 0.02);
  }
}

TEST(RngStream, StudentTVariance) {
  // Var = nu / (nu - 2) for nu > 2; nu = 10 keeps the estimate stable.
  RngStream rng(5, "t");
  double s2 = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.student_t(10.0);
    s2 += x * x;
  }
  EXPECT_NEAR(s2 / n, 1.25, 0.06);
}

TEST(RngStream, ShuffleIsPermutation) {
  RngStream rng(6, "s");
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  rng.shuffle(std::span(w));
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}

TEST(Hashing, KnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

}  // namespace
}  // namespace anomem
