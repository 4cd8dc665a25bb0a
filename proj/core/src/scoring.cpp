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

#include "anomem/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anomem/error.hpp"

namespace anomem {

ScoreVector::ScoreVector(double zero_shot, std::vector<double> reference,
                         std::vector<double> anomalous)
    : ScoreVector(zero_shot, reference, std::move(anomalous),
                  std::vector<bool>(reference.size(), true)) {}

ScoreVector::ScoreVector(double zero_shot, std::vector<double> reference,
                         std::vector<double> anomalous, std::vector<bool> anomalous_present)
    : anomalous_present_(std::move(anomalous_present)) {
  if (reference.size() != anomalous.size() || anomalous_present_.size() != reference.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "score vector needs one reference and one anomalous score per scale");
  }
  components_.clear();
  components_.reserve(1 + 2 * reference.size());
  components_.push_back(zero_shot);
  components_.insert(components_.end(), reference.begin(), reference.end());
  components_.insert(components_.end(), anomalous.begin(), anomalous.end());
  for (double c : components_) {
    if (!std::isfinite(c)) throw Error(ErrorKind::kInvalidArgument, "score vector component is not finite");
  }
}

WeightVector::WeightVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorKind::kInvalidArgument, "weight vector is empty");
  bool any_positive = false;
  for (double w : values_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorKind::kInvalidArgument, "weights must be finite and nonnegative");
    }
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) throw Error(ErrorKind::kInvalidArgument, "weights must not all be zero");
}

WeightVector WeightVector::scaled(double factor) const {
  std::vector<double> out(values_);
  for (double& w : out) w *= factor;
  return WeightVector(std::move(out));
}

std::string_view to_string(ScoringMode mode) noexcept {
  return mode == ScoringMode::kComposite ? "composite" : "winclip-compat";
}

ScoringMode parse_scoring_mode(std::string_view text) {
  if (text == "composite") return ScoringMode::kComposite;
  if (text == "winclip-compat" || text == "winclip_compat") return ScoringMode::kWinclipCompat;
  throw Error(ErrorKind::kInvalidArgument, "unknown scoring mode '" + std::string(text) + "'");
}

WeightVector baseline_weights(std::size_t n_scales) {
  if (n_scales == 0) throw Error(ErrorKind::kInvalidArgument, "n_scales must be >= 1");
  std::vector<double> w(1 + 2 * n_scales, 1.0 / (3.0 * static_cast<double>(n_scales)));
  w[0] = 1.0 / 3.0;
  return WeightVector(std::move(w));
}

WeightVector winclip_compat_weights(std::size_t n_scales) {
  if (n_scales == 0) throw Error(ErrorKind::kInvalidArgument, "n_scales must be >= 1");
  std::vector<double> w(1 + 2 * n_scales, 0.0);
  w[0] = 0.5;
  for (std::size_t s = 0; s < n_scales; ++s) w[1 + s] = 1.0 / (2.0 * static_cast<double>(n_scales));
  return WeightVector(std::move(w));
}

WeightVector mode_weights(ScoringMode mode, std::size_t n_scales) {
  return mode == ScoringMode::kComposite ? baseline_weights(n_scales) : winclip_compat_weights(n_scales);
}

double zero_shot_score(const FeatureVector& global_embedding, const TextStatePair& states,
                       double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorKind::kInvalidArgument, "temperature must be positive");
  }
  const double anomalous_logit = temperature * cosine(global_embedding, states.anomalous);
  const double normal_logit = temperature * cosine(global_embedding, states.normal);
  const double top = std::max(anomalous_logit, normal_logit);
  const double ea = std::exp(anomalous_logit - top);
  const double en = std::exp(normal_logit - top);
  return ea / (ea + en);
}

namespace {

AnomalyMap similarity_map(const ScaleGrid& grid, const MemoryBank& bank, double sign,
                          std::size_t threads) {
  const BankScale& entries = bank.at_scale(grid.scale_px());
  if (entries.dim() != grid.dim) {
    throw Error(ErrorKind::kDimensionMismatch, "grid dim differs from bank dim");
  }
  const auto best = top1_batch(grid.data, entries, threads);
  AnomalyMap map{grid.scale_px(), grid.layout.rows, grid.layout.cols, {}};
  map.cells.reserve(best.size());
  for (const Top1& t : best) map.cells.push_back(0.5 * (1.0 + sign * t.similarity));
  return map;
}

}  // namespace

AnomalyMap reference_map(const ScaleGrid& grid, const MemoryBank& bank, std::size_t threads) {
  return similarity_map(grid, bank, -1.0, threads);
}

AnomalyMap anomalous_map(const ScaleGrid& grid, const MemoryBank& bank, std::size_t threads) {
  return similarity_map(grid, bank, 1.0, threads);
}

double scale_score(const AnomalyMap& map) {
  if (map.cells.empty()) throw Error(ErrorKind::kInvalidArgument, "anomaly map is empty");
  return *std::max_element(map.cells.begin(), map.cells.end());
}

ScoreVector score_vector(const EmbeddingBundle& bundle, const MemoryBank& reference,
                         const MemoryBank& anomalous, const TextStatePair& states,
                         const ScoringOptions& options) {
  const auto scales = bundle.scales();
  if (reference.scales() != scales || anomalous.scales() != scales) {
    throw Error(ErrorKind::kScaleMismatch,
                "bundle '" + bundle.image_id + "' scales do not match the memory banks");
  }
  const double zs = zero_shot_score(bundle.global_embedding, states, options.temperature);
  std::vector<double> ref, anom;
  std::vector<bool> present;
  for (const ScaleGrid& g : bundle.grids) {
    ref.push_back(scale_score(reference_map(g, reference, options.threads)));
    if (anomalous.at_scale(g.scale_px()).empty()) {
      anom.push_back(0.0);
      present.push_back(false);
    } else {
      anom.push_back(scale_score(anomalous_map(g, anomalous, options.threads)));
      present.push_back(true);
    }
  }
  return ScoreVector(zs, std::move(ref), std::move(anom), std::move(present));
}

double aggregate(const ScoreVector& scores, const WeightVector& weights,
                 bool renormalize_empty_scales) {
  if (scores.size() != weights.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "score vector has " + std::to_string(scores.size()) +
                                                   " components but weights " + std::to_string(weights.size()));
  }
  const auto c = scores.components();
  const auto w = weights.values();
  if (!renormalize_empty_scales) {
    double sum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) sum += c[i] * w[i];
    return sum;
  }
  const std::size_t n = scores.n_scales();
  double empty_mass = 0.0;
  std::size_t nonempty = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (scores.anomalous_present(s)) {
      ++nonempty;
    } else {
      empty_mass += w[1 + n + s];
    }
  }
  const double bonus = nonempty > 0 ? empty_mass / static_cast<double>(nonempty) : 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < 1 + n; ++i) sum += c[i] * w[i];
  for (std::size_t s = 0; s < n; ++s) {
    if (scores.anomalous_present(s)) sum += c[1 + n + s] * (w[1 + n + s] + bonus);
  }
  return sum;
}

}  // namespace anomem
