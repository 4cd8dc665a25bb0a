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
#include <vector>

namespace anomem {

// Dense float32 embedding. Construction rejects empty or non-finite input.
class FeatureVector {
 public:
  FeatureVector() = default;
  explicit FeatureVector(std::vector<float> values);

  std::size_t dim() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::span<const float> values() const noexcept { return values_; }
  float operator[](std::size_t i) const { return values_[i]; }

  double norm() const;
  bool is_unit(double tolerance = 1e-5) const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::vector<float> values_;
};

// Sequential double-precision inner product. The summation order is fixed
// (index ascending) so every caller gets bit-identical results for the same
// operands; no dimension check.
inline double dot(std::span<const float> a, std::span<const float> b) noexcept {
  double acc = 0.0;
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    acc += static_cast<double>(a[k]) * static_cast<double>(b[k]);
  }
  return acc;
}

double norm(std::span<const float> v) noexcept;

// Throws ErrorKind::kZeroVector when the norm is below 1e-12.
FeatureVector normalize(const FeatureVector& v);
void normalize_in_place(std::span<float> v);

// Inner product of unit vectors clamped to [-1, 1].
// Throws ErrorKind::kDimensionMismatch when sizes differ.
double cosine(std::span<const float> u, std::span<const float> v);
double cosine(const FeatureVector& u, const FeatureVector& v);

inline double clamp_similarity(double s) noexcept {
  return s > 1.0 ? 1.0 : (s < -1.0 ? -1.0 : s);
}

}  // namespace anomem
