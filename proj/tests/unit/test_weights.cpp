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

#include "anomem/auroc.hpp"
#include "anomem/error.hpp"
#include "anomem/weights.hpp"
#include "synthetic.hpp"

namespace anomem {
namespace {

ValidationSet random_validation(RngStream& rng, std::size_t n, std::size_t n_scales = 4) {
  ValidationSet v;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i < 2 ? static_cast<int>(i) : static_cast<int>(rng.uniform_index(2));
    std::vector<double> ref(n_scales), anom(n_scales);
    for (auto& x : ref) x = std::min(1.0, rng.uniform() * 0.8 + 0.2 * label);
    for (auto& x : anom) x = std::min(1.0, rng.uniform() * 0.8 + 0.1 * label);
    v.scores.emplace_back(rng.uniform(), ref, anom);
    v.labels.push_back(label);
  }
  return v;
}

std::vector<double> values(const WeightVector& w) { return {w.values().begin(), w.values().end()}; }

TEST(SampleWeights, UniformRange) {
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    SamplingSpec spec;
    spec.seed = seed;
    for (std::size_t k = 0; k < 20; ++k) {
      const WeightVector w = sample_weights(spec, k);
      ASSERT_EQ(w.size(), 9u);
      for (double x : w.values()) {
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, 1.0);
      }
    }
  }
}

TEST(SampleWeights, ZeroSpreadNormalIsBaseline) {
  SamplingSpec spec;
  spec.distribution = Distribution::kNormal;
  spec.scale_factor = 0.0;
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(sample_weights(spec, k), baseline_weights(4));
  spec.distribution = Distribution::kStudentT;
  EXPECT_EQ(sample_weights(spec, 3), baseline_weights(4));
}

TEST(SampleWeights, DeterministicPerIndex) {
  for (Distribution d : {Distribution::kUniform, Distribution::kNormal, Distribution::kStudentT}) {
    SamplingSpec spec;
    spec.distribution = d;
    spec.seed = 123;
    EXPECT_EQ(sample_weights(spec, 3), sample_weights(spec, 3));
    EXPECT_NE(sample_weights(spec, 3), sample_weights(spec, 4));
    SamplingSpec other = spec;
    other.seed = 124;
    EXPECT_NE(sample_weights(spec, 3), sample_weights(other, 3));
  }
}

TEST(SampleWeights, PerturbationsAreNonnegativeAndCentered) {
  SamplingSpec spec;
  spec.distribution = Distribution::kNormal;
  spec.seed = 5;
  std::vector<double> mean(9, 0.0);
  const int n = 4000;
  for (int k = 0; k < n; ++k) {
    const auto w = values(sample_weights(spec, static_cast<std::size_t>(k)));
    for (std::size_t i = 0; i < 9; ++i) {
      EXPECT_GE(w[i], 0.0);
      mean[i] += w[i] / n;
    }
  }
  const auto base = values(baseline_weights(4));
  // Clamping at 0 shifts the mean up slightly (by ~0.4% of the baseline at sd 0.5).
  for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(mean[i], base[i], 0.05 * base[i]);
}

TEST(SampleWeights, InvalidSpecs) {
  SamplingSpec spec;
  spec.n_samples = 0;
  spec.include_baseline = false;
  EXPECT_THROW(candidate_weights(spec), Error);
  spec = {};
  spec.scale_factor = -1.0;
  EXPECT_THROW(sample_weights(spec, 0), Error);
  EXPECT_EQ(parse_distribution("student-t"), Distribution::kStudentT);
  EXPECT_THROW(parse_distribution("cauchy"), Error);
}

TEST(Search, PerfectZeroShotSeparator) {
  ValidationSet v;
  for (int i = 0; i < 10; ++i) {
    const int label = i % 2;
    // Only a_zs ranks correctly; the other components point the wrong way.
    const double wrong = 1.0 - label;
    v.scores.emplace_back(label ? 0.9 : 0.1, std::vector<double>{wrong, wrong}, std::vector<double>{wrong, wrong});
    v.labels.push_back(label);
  }
  const std::vector<WeightVector> c{baseline_weights(2), WeightVector({0, 1, 1, 1, 1}), WeightVector({1, 0, 0, 0, 0})};
  const SearchResult r = select_best(v, c, true);
  EXPECT_EQ(r.trace[0].auroc, 0.0);
  EXPECT_EQ(r.best_auroc, 1.0);
  EXPECT_EQ(r.best_index, 2u);
}

TEST(Search, NeverBelowBaseline) {
  RngStream rng(7, "search");
  for (int trial = 0; trial < 30; ++trial) {
    const ValidationSet v = random_validation(rng, 10);
    SamplingSpec spec;
    spec.seed = trial;
    spec.n_samples = 20;
    spec.distribution = static_cast<Distribution>(trial % 3);
    const SearchResult r = monte_carlo_search(v, spec);
    ASSERT_TRUE(r.trace.front().baseline);
    EXPECT_GE(r.best_auroc, r.trace.front().auroc);
  }
}

TEST(Search, MatchesExhaustiveReevaluation) {
  RngStream rng(8, "exhaustive");
  const ValidationSet v = random_validation(rng, 6);
  SamplingSpec spec;
  spec.n_samples = 5;
  spec.seed = 42;
  const SearchResult r = monte_carlo_search(v, spec);
  ASSERT_EQ(r.trace.size(), 6u);
  // Independent recomputation of every candidate.
  std::vector<WeightVector> cands{baseline_weights(4)};
  for (std::size_t k = 0; k < 5; ++k) cands.push_back(sample_weights(spec, k));
  double best = -1.0;
  std::size_t best_i = 0;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    std::vector<double> s;
    for (const auto& sc : v.scores) {
      std::vector<double> comps(sc.components().begin(), sc.components().end());
      s.push_back(testing::oracle_dot(comps, values(cands[c])));
    }
    const double a = testing::oracle_auroc(s, v.labels);
    EXPECT_EQ(r.trace[c].weights, cands[c]);
    EXPECT_EQ(r.trace[c].auroc, a);
    EXPECT_EQ(r.trace[c].candidate_index, c);
    if (a > best) {
      best = a;
      best_i = c;
    }
  }
  EXPECT_EQ(r.best_index, best_i);
  EXPECT_EQ(r.best_auroc, best);
  EXPECT_EQ(r.best_weights, cands[best_i]);
}

TEST(Search, TiesGoToEarliestCandidate) {
  ValidationSet v;
  v.scores = {ScoreVector(0.2, {0.1}, {0.1}), ScoreVector(0.8, {0.9}, {0.9})};
  v.labels = {0, 1};
  const std::vector<WeightVector> c{WeightVector({0, 1, 0}), WeightVector({1, 0, 0}), WeightVector({0, 0, 1})};
  EXPECT_EQ(select_best(v, c, false).best_index, 0u);
}

TEST(Search, DeterministicAndThreadIndependent) {
  RngStream rng(9, "det");
  const ValidationSet v = random_validation(rng, 12);
  SamplingSpec spec;
  spec.seed = 77;
  spec.distribution = Distribution::kStudentT;
  const SearchResult a = monte_carlo_search(v, spec, {1, false});
  const SearchResult b = monte_carlo_search(v, spec, {4, false});
  EXPECT_EQ(trace_csv(a), trace_csv(b));
  EXPECT_EQ(a.best_weights, b.best_weights);
  EXPECT_EQ(a.best_auroc, b.best_auroc);
}

TEST(Search, TraceLengthAndFormat) {
  RngStream rng(10, "trace");
  const ValidationSet v = random_validation(rng, 8);
  for (bool with_base : {true, false}) {
    SamplingSpec spec;
    spec.n_samples = 7;
    spec.include_baseline = with_base;
    const SearchResult r = monte_carlo_search(v, spec);
    EXPECT_EQ(r.trace.size(), 7u + (with_base ? 1u : 0u));
    const std::string csv = trace_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "candidate_index,w1,w2,w3,w4,w5,w6,w7,w8,w9,val_auroc");
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), r.trace.size() + 1);
  }
}

TEST(Search, ScalingCandidatesKeepsSelection) {
  RngStream rng(11, "scale");
  for (int trial = 0; trial < 10; ++trial) {
    const ValidationSet v = random_validation(rng, 14);
    SamplingSpec spec;
    spec.seed = 1000 + trial;
    spec.n_samples = 15;
    const auto cands = candidate_weights(spec);
    std::vector<WeightVector> scaled;
    for (const auto& c : cands) scaled.push_back(c.scaled(7.3));
    EXPECT_EQ(select_best(v, cands, true).best_index, select_best(v, scaled, true).best_index);
  }
}

TEST(Search, DegenerateValidation) {
  ValidationSet v;
  v.scores = {ScoreVector(0.2, {0.1}, {0.1}), ScoreVector(0.8, {0.9}, {0.9})};
  v.labels = {1, 1};
  try {
    monte_carlo_search(v, SamplingSpec{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDegenerateValidation);
  }
  v.labels = {0};
  EXPECT_THROW(monte_carlo_search(v, SamplingSpec{}), Error);
}

}  // namespace
}  // namespace anomem
