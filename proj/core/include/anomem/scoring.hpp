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

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "anomem/bundle.hpp"
#include "anomem/memory.hpp"

namespace anomem {

inline constexpr double kDefaultTemperature = 100.0;

// Per-window scores of one scale, each in [0, 1].
struct AnomalyMap {
  int scale_px = 0;
  int rows = 0;
  int cols = 0;
  std::vector<double> cells;

  double at(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * cols + col];
  }
};

// (a_zs, a_n_1..a_n_S, a_p_1..a_p_S) with scales ascending.
class ScoreVector {
 public:
  ScoreVector() = default;
  ScoreVector(double zero_shot, std::vector<double> reference,
              std::vector<double> anomalous);
  // Marks which anomalous scales had bank entries; defaults to all.
  ScoreVector(double zero_shot, std::vector<double> reference,
              std::vector<double> anomalous, std::vector<bool> anomalous_present);

  std::size_t n_scales() const noexcept { return (components_.size() - 1) / 2; }
  std::size_t size() const noexcept { return components_.size(); }
  std::span<const double> components() const noexcept { return components_; }

  double zero_shot() const { return components_[0]; }
  double reference(std::size_t s) const { return components_[1 + s]; }
  double anomalous(std::size_t s) const { return components_[1 + n_scales() + s]; }
  bool anomalous_present(std::size_t s) const { return anomalous_present_[s]; }

 private:
  std::vector<double> components_{0.0};
  std::vector<bool> anomalous_present_;
};

// Nonnegative, finite, not all zero.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  WeightVector scaled(double factor) const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> values_;
};

enum class ScoringMode { kComposite, kWinclipCompat };

std::string_view to_string(ScoringMode mode) noexcept;
// Accepts "composite", "winclip-compat" and "winclip_compat".
ScoringMode parse_scoring_mode(std::string_view text);

// (1/3, 1/(3S) x S, 1/(3S) x S).
WeightVector baseline_weights(std::size_t n_scales = 4);
// (1/2, 1/(2S) x S, 0 x S): zero-shot plus averaged reference maxima.
WeightVector winclip_compat_weights(std::size_t n_scales = 4);
WeightVector mode_weights(ScoringMode mode, std::size_t n_scales);

// Two-way softmax of temperature-scaled similarities, the anomalous share.
double zero_shot_score(const FeatureVector& global_embedding,
                       const TextStatePair& states,
                       double temperature = kDefaultTemperature);

// cell = 1/2 (1 - max_r <F_ij, r>) over the reference bank.
AnomalyMap reference_map(const ScaleGrid& grid, const MemoryBank& bank,
                         std::size_t threads = 1);
// cell = 1/2 (1 + max_r <F_ij, r>) over the anomalous bank.
AnomalyMap anomalous_map(const ScaleGrid& grid, const MemoryBank& bank,
                         std::size_t threads = 1);

// Maximum cell. Throws kInvalidArgument on an empty map.
double scale_score(const AnomalyMap& map);

struct ScoringOptions {
  double temperature = kDefaultTemperature;
  std::size_t threads = 1;
};

// Scales of the bundle, the reference bank and the anomalous bank must agree.
// Anomalous components of scales with an empty anomalous bank are 0.
ScoreVector score_vector(const EmbeddingBundle& bundle, const MemoryBank& reference,
                         const MemoryBank& anomalous, const TextStatePair& states,
                         const ScoringOptions& options = {});

// Dot product with fixed order: zero-shot, reference ascending, anomalous
// ascending. With `renormalize_empty_scales`, the weight of anomalous scales
// flagged empty is spread evenly over the nonempty anomalous scales.
double aggregate(const ScoreVector& scores, const WeightVector& weights,
                 bool renormalize_empty_scales = false);

}  // namespace anomem
