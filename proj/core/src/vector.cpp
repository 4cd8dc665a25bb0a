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

#include "anomem/vector.hpp"

#include <cmath>
#include <string>

#include "anomem/error.hpp"

namespace anomem {

FeatureVector::FeatureVector(std::vector<float> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "feature vector must have dim >= 1");
  }
  for (float v : values_) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::kInvalidArgument, "feature vector has a non-finite component");
    }
  }
}

double FeatureVector::norm() const { return anomem::norm(values_); }

bool FeatureVector::is_unit(double tolerance) const {
  return !values_.empty() && std::abs(norm() - 1.0) <= tolerance;
}

double norm(std::span<const float> v) noexcept { return std::sqrt(dot(v, v)); }

void normalize_in_place(std::span<float> v) {
  const double n = norm(v);
  if (!(n >= 1e-12)) {
    throw Error(ErrorKind::kZeroVector, "cannot normalize a vector of norm " + std::to_string(n));
  }
  for (float& x : v) x = static_cast<float>(static_cast<double>(x) / n);
}

FeatureVector normalize(const FeatureVector& v) {
  std::vector<float> out(v.values().begin(), v.values().end());
  normalize_in_place(out);
  return FeatureVector(std::move(out));
}

double cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "cosine of dims " + std::to_string(u.size()) + " and " + std::to_string(v.size()));
  }
  return clamp_similarity(dot(u, v));
}

double cosine(const FeatureVector& u, const FeatureVector& v) {
  return cosine(u.values(), v.values());
}

}  // namespace anomem
