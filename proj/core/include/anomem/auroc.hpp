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

namespace anomem {

// P(score_pos > score_neg) + 1/2 P(tie), i.e. the normalized Mann-Whitney U.
// O(n log n). Labels are 0/1. Throws kDegenerateLabels unless both classes
// occur, kInvalidArgument for non-finite scores or a length mismatch.
double auroc(std::span<const double> scores, std::span<const int> labels);

struct RunSummary {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t n = 0;
};

// Mean with a normal-approximation confidence half width
// z * sample_sd / sqrt(n); zero for a single run.
RunSummary aggregate_runs(std::span<const double> values, double confidence = 0.95);

// Two-sided standard normal quantile: z such that P(|Z| <= z) = confidence.
double two_sided_z(double confidence);

}  // namespace anomem
