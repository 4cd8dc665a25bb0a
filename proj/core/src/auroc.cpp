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

#include "anomem/auroc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "anomem/error.hpp"

namespace anomem {

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::kInvalidArgument, "scores and labels differ in length");
  }
  std::uint64_t n_pos = 0, n_neg = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw Error(ErrorKind::kInvalidArgument, "non-finite score");
    if (labels[i] == 1) {
      ++n_pos;
    } else if (labels[i] == 0) {
      ++n_neg;
    } else {
      throw Error(ErrorKind::kInvalidArgument, "labels must be 0 or 1");
    }
  }
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorKind::kDegenerateLabels, "AUROC needs at least one positive and one negative");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Walk groups of equal scores in ascending order. Each positive beats every
  // negative below its group and ties with the negatives inside it.
  std::uint64_t wins = 0, ties = 0, neg_below = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t pos_here = 0, neg_here = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == 1 ? pos_here : neg_here) += 1;
      ++j;
    }
    wins += pos_here * neg_below;
    ties += pos_here * neg_here;
    neg_below += neg_here;
    i = j;
  }
  return (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double two_sided_z(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "confidence must lie in (0, 1)");
  }
  const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, 0.5 + 0.5 * confidence);
}

RunSummary aggregate_runs(std::span<const double> values, double confidence) {
  if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "no runs to aggregate");
  RunSummary s;
  s.n = values.size();
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    s.mean = values.front();
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    s.half_width = two_sided_z(confidence) * sd / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

}  // namespace anomem
