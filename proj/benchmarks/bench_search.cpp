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

#include "anomem/memory.hpp"
#include "anomem/vector.hpp"

namespace {

std::vector<float> random_units(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<float> normal;
  std::vector<float> out(n * dim);
  for (auto& x : out) x = normal(gen);
  for (std::size_t i = 0; i < n; ++i) anomem::normalize_in_place(std::span<float>(out).subspan(i * dim, dim));
  return out;
}

anomem::BankScale make_bank(std::size_t n, std::size_t dim) {
  anomem::BankScale bank(16, dim);
  const auto data = random_units(n, dim, 1);
  for (std::size_t i = 0; i < n; ++i) {
    bank.append(std::span<const float>(data).subspan(i * dim, dim), {"bench", 0, static_cast<int>(i)});
  }
  return bank;
}

// One grid of 16-px patches (14x14) against a single-image bank.
void BM_Top1Sequential(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(1));
  const auto bank = make_bank(static_cast<std::size_t>(state.range(0)), dim);
  const auto queries = random_units(196, dim, 2);
  for (auto _ : state) {
    for (std::size_t q = 0; q < 196; ++q) {
      benchmark::DoNotOptimize(anomem::top1_similarity(std::span<const float>(queries).subspan(q * dim, dim), bank));
    }
  }
  state.SetItemsProcessed(state.iterations() * 196 * state.range(0));
}

void BM_Top1Blocked(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(1));
  const auto bank = make_bank(static_cast<std::size_t>(state.range(0)), dim);
  const auto queries = random_units(196, dim, 2);
  const auto threads = static_cast<std::size_t>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(anomem::top1_batch(queries, bank, threads));
  state.SetItemsProcessed(state.iterations() * 196 * state.range(0));
}

}  // namespace

BENCHMARK(BM_Top1Sequential)->Args({196, 640})->Args({1000, 640})->Args({196, 768});
BENCHMARK(BM_Top1Blocked)->Args({196, 640, 1})->Args({1000, 640, 1})->Args({196, 768, 1})->Args({1000, 640, 4});
