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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "anomem/auroc.hpp"
#include "anomem/weights.hpp"

namespace {

void BM_Auroc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u;
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>(i % 2);
    scores[i] = u(gen) + 0.2 * labels[i];
  }
  for (auto _ : state) benchmark::DoNotOptimize(anomem::auroc(scores, labels));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// Full weight search: N candidates over a validation set of the given size.
void BM_MonteCarloSearch(benchmark::State& state) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u;
  anomem::ValidationSet val;
  for (int i = 0; i < state.range(0); ++i) {
    std::vector<double> ref(4), anom(4);
    for (auto& x : ref) x = u(gen);
    for (auto& x : anom) x = u(gen);
    val.scores.emplace_back(u(gen), ref, anom);
    val.labels.push_back(i % 2);
  }
  anomem::SamplingSpec spec;
  spec.n_samples = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(anomem::monte_carlo_search(val, spec));
}

}  // namespace

BENCHMARK(BM_Auroc)->Arg(100)->Arg(10000);
BENCHMARK(BM_MonteCarloSearch)->Args({10, 100})->Args({100, 100});
