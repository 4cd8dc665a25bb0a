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

#include <cmath>

#include "anomem/error.hpp"
#include "anomem/scoring.hpp"
#include "synthetic.hpp"

namespace anomem {
namespace {

using testing::random_unit;

// Unit vector with prescribed inner products 0.8 / 0.2 against e0 / e1 is
// not needed: the states below are built around a fixed global embedding.
TextStatePair states_with_products(const std::vector<float>& f, double to_anom, double to_norm,
                                   RngStream& rng) {
  // t = a*f + b*u with u ⟂ f, a = target product, b = sqrt(1 - a^2).
  auto build = [&](double a) {
    std::vector<float> u = random_unit(rng, f.size());
    double p = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) p += double(u[k]) * f[k];
    for (std::size_t k = 0; k < f.size(); ++k) u[k] = static_cast<float>(u[k] - p * f[k]);
    normalize_in_place(u);
    const double b = std::sqrt(1.0 - a * a);
    std::vector<float> t(f.size());
    for (std::size_t k = 0; k < f.size(); ++k) t[k] = static_cast<float>(a * f[k] + b * u[k]);
    return FeatureVector(t);
  };
  return TextStatePair{build(to_norm), build(to_anom)};
}

MemoryBank bank_from(BankRole role, const std::vector<int>& scales,
                     const std::vector<std::vector<std::vector<float>>>& entries) {
  MemoryBank bank(role, scales, entries.front().empty() ? entries.back().front().size() : entries.front().front().size());
  for (std::size_t s = 0; s < scales.size(); ++s) {
    for (std::size_t i = 0; i < entries[s].size(); ++i) bank.add(scales[s], entries[s][i], {"e", 0, static_cast<int>(i)});
  }
  return bank;
}

TEST(ZeroShot, EqualProductsGiveHalf) {
  RngStream rng(1, "zs");
  const auto f = random_unit(rng, 16);
  const TextStatePair s = states_with_products(f, 0.3, 0.3, rng);
  for (double tau : {1.0, 100.0, 1000.0}) EXPECT_NEAR(zero_shot_score(FeatureVector(f), s, tau), 0.5, 1e-5);
}

TEST(ZeroShot, KnownValue) {
  RngStream rng(2, "zs");
  const auto f = random_unit(rng, 16);
  const TextStatePair s = states_with_products(f, 0.8, 0.2, rng);
  EXPECT_NEAR(zero_shot_score(FeatureVector(f), s, 1.0), 1.0 / (1.0 + std::exp(-0.6)), 1e-6);
  EXPECT_NEAR(zero_shot_score(FeatureVector(f), s, 1.0), 0.6457, 1e-4);
}

TEST(ZeroShot, SwappingStatesComplements) {
  RngStream rng(3, "zs");
  for (int i = 0; i < 200; ++i) {
    const FeatureVector f(random_unit(rng, 12));
    const TextStatePair s{FeatureVector(random_unit(rng, 12)), FeatureVector(random_unit(rng, 12))};
    const TextStatePair swapped{s.anomalous, s.normal};
    for (double tau : {1.0, 100.0}) {
      EXPECT_NEAR(zero_shot_score(f, swapped, tau), 1.0 - zero_shot_score(f, s, tau), 1e-9);
    }
  }
}

TEST(ZeroShot, LargeTemperatureIsStable) {
  const FeatureVector f({1.0f, 0.0f});
  const TextStatePair s{FeatureVector({-1.0f, 0.0f}), FeatureVector({1.0f, 0.0f})};
  const double v = zero_shot_score(f, s, 1e6);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_EQ(v, 1.0);
  EXPECT_THROW(zero_shot_score(f, s, 0.0), Error);
}

TEST(Maps, IdenticalAndOrthogonalEntries) {
  const std::vector<int> scales{16};
  const ScaleGrid g = testing::make_grid(16, 1, 2, {{1, 0, 0}, {0, 1, 0}});
  const MemoryBank same = bank_from(BankRole::kReference, scales, {{{1, 0, 0}, {0, 1, 0}}});
  const MemoryBank orth = bank_from(BankRole::kReference, scales, {{{0, 0, 1}}});
  const AnomalyMap r_same = reference_map(g, same);
  EXPECT_EQ(r_same.cells, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(reference_map(g, orth).cells, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(anomalous_map(g, same).cells, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(anomalous_map(g, orth).cells, (std::vector<double>{0.5, 0.5}));
}

TEST(Maps, MatchBruteForceOnRandomGrid) {
  RngStream rng(4, "maps");
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 2 + rng.uniform_index(30);
    std::vector<std::vector<float>> patches, entries;
    for (int p = 0; p < 9; ++p) patches.push_back(random_unit(rng, dim));
    for (int e = 0; e < 20; ++e) entries.push_back(random_unit(rng, dim));
    const ScaleGrid g = testing::make_grid(32, 3, 3, patches);
    const MemoryBank bank = bank_from(BankRole::kReference, {32}, {entries});
    const AnomalyMap ref = reference_map(g, bank, 2);
    const AnomalyMap anom = anomalous_map(g, bank);
    for (std::size_t p = 0; p < 9; ++p) {
      const auto o = testing::oracle_top1(testing::to_vector(g.patch(p)), entries);
      EXPECT_EQ(ref.cells[p], 0.5 * (1.0 - o.similarity));
      EXPECT_EQ(anom.cells[p], 0.5 * (1.0 + o.similarity));
    }
    EXPECT_EQ(ref.rows, 3);
    EXPECT_EQ(ref.at(2, 1), ref.cells[7]);
  }
}

TEST(ScaleScore, Examples) {
  EXPECT_EQ(scale_score(AnomalyMap{16, 2, 2, {0.3, 0.3, 0.3, 0.3}}), 0.3);
  EXPECT_EQ(scale_score(AnomalyMap{16, 2, 2, {0.1, 0.9, 0.1, 0.1}}), 0.9);
  RngStream rng(5, "max");
  AnomalyMap m{16, 4, 5, {}};
  double best = -1.0;
  for (int i = 0; i < 20; ++i) {
    m.cells.push_back(rng.uniform());
    best = std::max(best, m.cells.back());
  }
  EXPECT_EQ(scale_score(m), best);
}

TEST(ScoreVector, SelfScoringBundle) {
  RngStream rng(6, "self");
  const EmbeddingBundle b = testing::random_bundle(rng, "self", 8, {16, 32});
  const TrainingSample s{b, std::nullopt};
  const MemoryBank ref = build_reference_bank(std::span(&s, 1));
  MemoryBank anom(BankRole::kAnomalous, b.scales(), 8);
  for (const ScaleGrid& g : b.grids) anom.add(g.scale_px(), g.patch(3), {"self", 0, 3});
  const TextStatePair st{FeatureVector(random_unit(rng, 8)), FeatureVector(random_unit(rng, 8))};
  const ScoreVector sc = score_vector(b, ref, anom, st);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(sc.reference(i), 0.0, 1e-7);
    EXPECT_NEAR(sc.anomalous(i), 1.0, 1e-7);
    EXPECT_TRUE(sc.anomalous_present(i));
  }
}

TEST(ScoreVector, EmptyAnomalousBankGivesZeros) {
  RngStream rng(7, "empty");
  const EmbeddingBundle b = testing::random_bundle(rng, "img", 8, {16, 32, 48, 112});
  const TrainingSample s{b, std::nullopt};
  const MemoryBank ref = build_reference_bank(std::span(&s, 1));
  const MemoryBank anom(BankRole::kAnomalous, b.scales(), 8);
  const TextStatePair st{FeatureVector(random_unit(rng, 8)), FeatureVector(random_unit(rng, 8))};
  const ScoreVector sc = score_vector(testing::random_bundle(rng, "q", 8, {16, 32, 48, 112}), ref, anom, st);
  ASSERT_EQ(sc.size(), 9u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(sc.anomalous(i), 0.0);
    EXPECT_FALSE(sc.anomalous_present(i));
  }
}

TEST(ScoreVector, MatchesComposedOracle) {
  RngStream rng(8, "compose");
  const std::vector<int> scales{16, 32};
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dim = 3 + rng.uniform_index(20);
    const EmbeddingBundle q = testing::random_bundle(rng, "q", dim, scales, 48);
    std::vector<std::vector<std::vector<float>>> ref_e(2), anom_e(2), grid_p;
    for (int s = 0; s < 2; ++s) {
      for (std::size_t i = 0; i < 1 + rng.uniform_index(12); ++i) ref_e[s].push_back(random_unit(rng, dim));
      const std::size_t n_anom = (trial % 4 == 0 && s == 1) ? 0 : 1 + rng.uniform_index(6);
      for (std::size_t i = 0; i < n_anom; ++i) anom_e[s].push_back(random_unit(rng, dim));
      grid_p.push_back(testing::patches_of(q.grids[s]));
    }
    const MemoryBank ref = bank_from(BankRole::kReference, scales, ref_e);
    const MemoryBank anom = bank_from(BankRole::kAnomalous, scales, anom_e);
    const TextStatePair st{FeatureVector(random_unit(rng, dim)), FeatureVector(random_unit(rng, dim))};
    const double tau = trial % 2 ? 1.0 : 100.0;
    const ScoreVector sc = score_vector(q, ref, anom, st, {tau, 1});
    const auto oracle = testing::oracle_score_vector(testing::to_vector(q.global_embedding.values()),
                                                     testing::to_vector(st.normal.values()),
                                                     testing::to_vector(st.anomalous.values()), tau, grid_p,
                                                     ref_e, anom_e);
    ASSERT_EQ(oracle.size(), sc.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) EXPECT_NEAR(sc.components()[i], oracle[i], 1e-9) << i;
    for (double c : sc.components()) {
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
    }
  }
}

TEST(ScoreVector, ScaleMismatch) {
  RngStream rng(9, "mismatch");
  const EmbeddingBundle b = testing::random_bundle(rng, "img", 8, {16, 32});
  const TrainingSample s{b, std::nullopt};
  const MemoryBank ref = build_reference_bank(std::span(&s, 1));
  const MemoryBank anom(BankRole::kAnomalous, b.scales(), 8);
  const TextStatePair st{FeatureVector(random_unit(rng, 8)), FeatureVector(random_unit(rng, 8))};
  try {
    score_vector(testing::random_bundle(rng, "q", 8, {16}), ref, anom, st);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kScaleMismatch);
  }
}

TEST(Weights, Baseline) {
  const WeightVector w4 = baseline_weights(4);
  ASSERT_EQ(w4.size(), 9u);
  EXPECT_EQ(w4[0], 1.0 / 3.0);
  for (std::size_t i = 1; i < 9; ++i) EXPECT_EQ(w4[i], 1.0 / 12.0);
  const WeightVector w1 = baseline_weights(1);
  EXPECT_EQ(std::vector<double>(w1.values().begin(), w1.values().end()),
            (std::vector<double>{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}));
  for (std::size_t n = 1; n <= 8; ++n) {
    const WeightVector w = baseline_weights(n);
    double sum = 0.0;
    for (double x : w.values()) sum += x;
    EXPECT_NEAR(sum, 1.0, 1e-15);
  }
}

TEST(Weights, CompatAndValidation) {
  const WeightVector w = winclip_compat_weights(4);
  EXPECT_EQ(w[0], 0.5);
  for (std::size_t i = 1; i < 5; ++i) EXPECT_EQ(w[i], 0.125);
  for (std::size_t i = 5; i < 9; ++i) EXPECT_EQ(w[i], 0.0);
  EXPECT_EQ(mode_weights(ScoringMode::kWinclipCompat, 4), w);
  EXPECT_EQ(parse_scoring_mode("winclip-compat"), ScoringMode::kWinclipCompat);
  EXPECT_THROW(parse_scoring_mode("nope"), Error);
  EXPECT_THROW(WeightVector({0.0, 0.0}), Error);
  EXPECT_THROW(WeightVector({0.5, -0.1}), Error);
}

TEST(Aggregate, Examples) {
  const ScoreVector sc(0.6, {0.3, 0.3, 0.3, 0.3}, {0.9, 0.9, 0.9, 0.9});
  EXPECT_NEAR(aggregate(sc, baseline_weights(4)), 0.6, 1e-15);
  EXPECT_EQ(aggregate(sc, WeightVector({1, 0, 0, 0, 0, 0, 0, 0, 0})), 0.6);
  EXPECT_THROW(aggregate(sc, WeightVector({1, 0, 0, 0, 0, 0, 0, 0})), Error);
}

TEST(Aggregate, DotProductOracleAndScaling) {
  RngStream rng(10, "agg");
  for (int i = 0; i < 300; ++i) {
    std::vector<double> ref(4), anom(4), w(9);
    for (auto& x : ref) x = rng.uniform();
    for (auto& x : anom) x = rng.uniform();
    for (auto& x : w) x = rng.uniform();
    const ScoreVector sc(rng.uniform(), ref, anom);
    const WeightVector wv(w);
    std::vector<double> comps(sc.components().begin(), sc.components().end());
    EXPECT_NEAR(aggregate(sc, wv), testing::oracle_dot(comps, w), 1e-15);
    const double c = 0.1 + 10.0 * rng.uniform();
    EXPECT_NEAR(aggregate(sc, wv.scaled(c)), c * aggregate(sc, wv), 1e-12);
  }
}

TEST(Aggregate, RenormalizeEmptyScales) {
  const ScoreVector sc(0.6, {0.3, 0.3}, {0.9, 0.0}, {true, false});
  const WeightVector w = baseline_weights(2);
  EXPECT_NEAR(aggregate(sc, w), (0.6 + 0.3 + 0.45) / 3.0, 1e-15);
  // The empty scale's mass (1/6) moves to the one nonempty scale.
  EXPECT_NEAR(aggregate(sc, w, true), 0.6 / 3 + 0.3 / 3 + 0.9 / 3, 1e-15);
  const ScoreVector none(0.6, {0.3, 0.3}, {0.0, 0.0}, {false, false});
  EXPECT_NEAR(aggregate(none, w, true), aggregate(none, w), 1e-15);
}

}  // namespace
}  // namespace anomem
