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
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anomem/scoring.hpp"

namespace anomem {

enum class Distribution { kUniform, kNormal, kStudentT };

std::string_view to_string(Distribution d) noexcept;
// "uniform", "normal", "student-t" (also "student_t", "studentt").
Distribution parse_distribution(std::string_view text);

// Candidate generator for the weight search.
//
// Uniform draws every component i.i.d. on [0, 1]. Normal and StudentT
// perturb the baseline vector: component i is baseline_i + scale_factor *
// baseline_i * X with X standard normal or Student-t(dof), clamped at 0.
struct SamplingSpec {
  Distribution distribution = Distribution::kUniform;
  std::size_t n_samples = 100;
  std::uint64_t seed = 0;
  double scale_factor = 0.5;
  double dof = 3.0;
  bool include_baseline = true;

  void validate() const;
};

// k-th sampled vector of length 1 + 2 * n_scales, a pure function of
// (spec, k, n_scales). All-zero draws are redrawn; after 100 consecutive
// rejections throws kDegenerateDistribution.
WeightVector sample_weights(const SamplingSpec& spec, std::size_t k,
                            std::size_t n_scales = 4);

// Baseline first (when included), then samples 0..n_samples-1.
std::vector<WeightVector> candidate_weights(const SamplingSpec& spec,
                                            std::size_t n_scales = 4);

struct ValidationSet {
  std::vector<ScoreVector> scores;
  std::vector<int> labels;  // 1 = anomalous

  // Throws kDegenerateValidation unless both classes are present and all
  // score vectors share a length.
  void validate() const;
};

struct TraceRow {
  std::size_t candidate_index = 0;
  bool baseline = false;
  WeightVector weights;
  double auroc = 0.0;
};

struct SearchResult {
  WeightVector best_weights;
  double best_auroc = 0.0;
  std::size_t best_index = 0;
  std::vector<TraceRow> trace;  // ordered by candidate index
};

struct SearchOptions {
  std::size_t threads = 1;
  bool renormalize_empty_scales = false;
};

// AUROC of the aggregated validation scores for every candidate; argmax with
// ties to the earliest candidate.
SearchResult select_best(const ValidationSet& validation,
                         std::span<const WeightVector> candidates,
                         bool first_is_baseline, const SearchOptions& options = {});

SearchResult monte_carlo_search(const ValidationSet& validation,
                                const SamplingSpec& spec,
                                const SearchOptions& options = {});

// candidate_index,w1..wK,val_auroc
std::string trace_csv(const SearchResult& result);

}  // namespace anomem
