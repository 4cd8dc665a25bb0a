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

#include "anomem/weights.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anomem/auroc.hpp"
#include "anomem/error.hpp"
#include "anomem/parallel.hpp"
#include "anomem/rng.hpp"
#include "anomem/text.hpp"

namespace anomem {

std::string_view to_string(Distribution d) noexcept {
  switch (d) {
    case Distribution::kUniform: return "uniform";
    case Distribution::kNormal: return "normal";
    case Distribution::kStudentT: return "student-t";
  }
  return "uniform";
}

Distribution parse_distribution(std::string_view text) {
  if (text == "uniform") return Distribution::kUniform;
  if (text == "normal") return Distribution::kNormal;
  if (text == "student-t" || text == "student_t" || text == "studentt") return Distribution::kStudentT;
  throw Error(ErrorKind::kInvalidArgument, "unknown distribution '" + std::string(text) + "'");
}

void SamplingSpec::validate() const {
  if (n_samples == 0 && !include_baseline) {
    throw Error(ErrorKind::kInvalidArgument, "weight search needs at least one candidate");
  }
  if (!(scale_factor >= 0.0) || !std::isfinite(scale_factor)) {
    throw Error(ErrorKind::kInvalidArgument, "scale factor must be finite and nonnegative");
  }
  if (distribution == Distribution::kStudentT && !(dof >= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "student-t needs dof >= 1");
  }
}

WeightVector sample_weights(const SamplingSpec& spec, std::size_t k, std::size_t n_scales) {
  spec.validate();
  const WeightVector base = baseline_weights(n_scales);
  RngStream rng = RngStream(spec.seed, "weights").substream(k);
  constexpr int kMaxRejections = 100;
  for (int attempt = 0; attempt <= kMaxRejections; ++attempt) {
    std::vector<double> w(base.size());
    bool any_positive = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      double v = 0.0;
      switch (spec.distribution) {
        case Distribution::kUniform:
          v = rng.uniform();
          break;
        case Distribution::kNormal:
          v = base[i] + spec.scale_factor * base[i] * rng.normal();
          break;
        case Distribution::kStudentT:
          v = base[i] + spec.scale_factor * base[i] * rng.student_t(spec.dof);
          break;
      }
      w[i] = v > 0.0 ? v : 0.0;
      any_positive = any_positive || w[i] > 0.0;
    }
    if (any_positive) return WeightVector(std::move(w));
  }
  throw Error(ErrorKind::kDegenerateDistribution,
              "candidate " + std::to_string(k) + " was all-zero " + std::to_string(kMaxRejections) + " times");
}

std::vector<WeightVector> candidate_weights(const SamplingSpec& spec, std::size_t n_scales) {
  spec.validate();
  std::vector<WeightVector> out;
  out.reserve(spec.n_samples + 1);
  if (spec.include_baseline) out.push_back(baseline_weights(n_scales));
  for (std::size_t k = 0; k < spec.n_samples; ++k) out.push_back(sample_weights(spec, k, n_scales));
  return out;
}

void ValidationSet::validate() const {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::kDegenerateValidation, "validation scores and labels differ in length");
  }
  bool pos = false, neg = false;
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error(ErrorKind::kDegenerateValidation, "validation labels must be 0/1");
    pos = pos || l == 1;
    neg = neg || l == 0;
  }
  if (!pos || !neg) {
    throw Error(ErrorKind::kDegenerateValidation, "validation set must contain both normal and anomalous images");
  }
  for (const auto& s : scores) {
    if (s.size() != scores.front().size()) {
      throw Error(ErrorKind::kDegenerateValidation, "validation score vectors differ in length");
    }
  }
}

SearchResult select_best(const ValidationSet& validation, std::span<const WeightVector> candidates,
                         bool first_is_baseline, const SearchOptions& options) {
  validation.validate();
  if (candidates.empty()) throw Error(ErrorKind::kInvalidArgument, "no weight candidates");
  SearchResult result;
  result.trace.resize(candidates.size());
  parallel_for(candidates.size(), options.threads, [&](std::size_t c) {
    std::vector<double> aggregated;
    aggregated.reserve(validation.scores.size());
    for (const auto& s : validation.scores) {
      aggregated.push_back(aggregate(s, candidates[c], options.renormalize_empty_scales));
    }
    result.trace[c] = TraceRow{c, first_is_baseline && c == 0, candidates[c],
                               auroc(aggregated, validation.labels)};
  });
  std::size_t best = 0;
  for (std::size_t c = 1; c < result.trace.size(); ++c) {
    if (result.trace[c].auroc > result.trace[best].auroc) best = c;
  }
  result.best_index = best;
  result.best_auroc = result.trace[best].auroc;
  result.best_weights = result.trace[best].weights;
  return result;
}

SearchResult monte_carlo_search(const ValidationSet& validation, const SamplingSpec& spec,
                                const SearchOptions& options) {
  validation.validate();
  const std::size_t n_scales = validation.scores.front().n_scales();
  const auto candidates = candidate_weights(spec, n_scales);
  return select_best(validation, candidates, spec.include_baseline, options);
}

std::string trace_csv(const SearchResult& result) {
  std::string out = "candidate_index";
  const std::size_t k = result.trace.empty() ? 0 : result.trace.front().weights.size();
  for (std::size_t i = 1; i <= k; ++i) out += ",w" + std::to_string(i);
  out += ",val_auroc\n";
  for (const auto& row : result.trace) {
    out += std::to_string(row.candidate_index);
    for (double w : row.weights.values()) out += "," + format_double(w);
    out += "," + format_double(row.auroc) + "\n";
  }
  return out;
}

}  // namespace anomem
