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

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace anomem {

// Seeded random stream used everywhere randomness is consumed.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the C++
// standard. The engine seed is splitmix64(seed ^ splitmix64(fnv1a64(label)))
// so that each consumer ("weights", "task-split", ...) gets an independent
// stream. Distributions are implemented here rather than taken from
// <random>, whose distribution algorithms differ between standard libraries.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view label);

  // Independent child stream, a pure function of (parent seed, label, index).
  RngStream substream(std::uint64_t index) const;

  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& label() const noexcept { return label_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // Unbiased integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  // Standard normal (Marsaglia polar method).
  double normal();
  // Gamma(shape, 1) via Marsaglia-Tsang.
  double gamma(double shape);
  // Student-t with `dof` degrees of freedom.
  double student_t(double dof);

  // Fisher-Yates.
  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_index(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  RngStream(std::uint64_t seed, std::string label, std::uint64_t engine_seed);

  std::uint64_t seed_;
  std::string label_;
  std::uint64_t engine_seed_;
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace anomem
